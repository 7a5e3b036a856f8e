#include "bli/evaluation.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

using nlohmann::json;

void EvalConfig::validate() const {
  if (ks.empty()) throw ConfigError("ks must not be empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0) throw ConfigError("K values must be >= 1");
    if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("K values must be strictly ascending");
  }
}

std::size_t EvalReport::correct_at_1() const {
  return static_cast<std::size_t>(std::count(correctness.begin(), correctness.end(), true));
}

EvalReport score(std::span<const Prediction> predictions, const GoldMap& gold, const EvalConfig& cfg,
                 std::string label) {
  cfg.validate();
  EvalReport r;
  r.label = std::move(label);
  r.n_items = predictions.size();
  std::map<std::size_t, std::size_t> hits;
  for (auto k : cfg.ks) hits[k] = 0;
  double rr_sum = 0.0;

  for (const auto& p : predictions) {
    auto g = gold.find(p.query);
    if (g == gold.end()) throw UnknownQuery("no gold translation for query '" + p.query + "'");
    std::vector<std::string> gold_lower;
    for (const auto& t : g->second) gold_lower.push_back(text::to_lower(t));

    std::vector<std::string> ranked;
    if (p.predicted) ranked.push_back(*p.predicted);
    for (const auto& c : p.candidates_ranked)
      if (!p.predicted || c != *p.predicted) ranked.push_back(c);

    ItemResult item{p.query, p.predicted, std::nullopt};
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      const std::string lowered = text::to_lower(ranked[i]);
      if (std::find(gold_lower.begin(), gold_lower.end(), lowered) != gold_lower.end()) {
        item.gold_rank = i + 1;
        break;
      }
    }
    for (auto k : cfg.ks)
      if (item.gold_rank && *item.gold_rank <= k) ++hits[k];
    if (item.gold_rank) rr_sum += 1.0 / static_cast<double>(*item.gold_rank);
    r.correctness.push_back(item.gold_rank == std::size_t{1});
    r.per_item.push_back(std::move(item));
  }

  const double n = static_cast<double>(r.n_items);
  for (auto [k, h] : hits) r.p_at_k[k] = r.n_items ? static_cast<double>(h) / n : 0.0;
  r.mrr = r.n_items ? rr_sum / n : 0.0;
  return r;
}

// --- serialization --------------------------------------------------------

std::string report_to_json(const EvalReport& r) {
  json j;
  j["format"] = "bli-eval-report";
  j["version"] = 1;
  j["label"] = r.label;
  j["n_items"] = r.n_items;
  j["correct_at_1"] = r.correct_at_1();
  json pk = json::object();
  for (auto [k, v] : r.p_at_k) pk[std::to_string(k)] = v;
  j["p_at_k"] = pk;
  j["mrr"] = r.mrr;
  j["correctness"] = r.correctness;
  json items = json::array();
  for (const auto& it : r.per_item) {
    items.push_back({{"query", it.query},
                     {"predicted", it.predicted ? json(*it.predicted) : json(nullptr)},
                     {"gold_rank", it.gold_rank ? json(*it.gold_rank) : json(nullptr)}});
  }
  j["per_item"] = items;
  return j.dump(2);
}

EvalReport report_from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    if (j.value("format", "") != "bli-eval-report") throw SchemaMismatch("not a bli-eval-report document");
    if (j.at("version").get<int>() != 1) throw SchemaMismatch("unsupported report version");
    EvalReport r;
    r.label = j.value("label", "");
    r.n_items = j.at("n_items").get<std::size_t>();
    for (const auto& [k, v] : j.at("p_at_k").items()) {
      std::size_t kk = 0;
      try {
        kk = std::stoul(k);
      } catch (const std::exception&) {
        throw SchemaMismatch("bad K '" + k + "'");
      }
      double f = v.get<double>();
      if (kk == 0 || !(f >= 0.0 && f <= 1.0)) throw SchemaMismatch("p_at_k entry out of range");
      r.p_at_k[kk] = f;
    }
    r.mrr = j.at("mrr").get<double>();
    if (!(r.mrr >= 0.0 && r.mrr <= 1.0)) throw SchemaMismatch("mrr out of range");
    r.correctness = j.at("correctness").get<std::vector<bool>>();
    if (r.correctness.size() != r.n_items) throw SchemaMismatch("correctness length differs from n_items");
    if (j.contains("correct_at_1") && j["correct_at_1"].get<std::size_t>() != r.correct_at_1())
      throw SchemaMismatch("correct_at_1 disagrees with correctness");
    if (j.contains("per_item")) {
      for (const auto& it : j["per_item"]) {
        ItemResult item;
        item.query = it.at("query").get<std::string>();
        if (!it.at("predicted").is_null()) item.predicted = it["predicted"].get<std::string>();
        if (!it.at("gold_rank").is_null()) item.gold_rank = it["gold_rank"].get<std::size_t>();
        r.per_item.push_back(std::move(item));
      }
      if (!r.per_item.empty() && r.per_item.size() != r.n_items)
        throw SchemaMismatch("per_item length differs from n_items");
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("report: ") + e.what());
  }
}

void save_report(const std::filesystem::path& path, const EvalReport& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_json(r) << '\n';
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

void write_report_table(std::ostream& out, std::span<const EvalReport> reports) {
  std::vector<std::size_t> ks;
  for (const auto& r : reports)
    for (auto [k, v] : r.p_at_k)
      if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  std::sort(ks.begin(), ks.end());

  std::size_t label_w = 9;
  for (const auto& r : reports) label_w = std::max(label_w, r.label.size());

  out << std::left << std::setw(static_cast<int>(label_w)) << "direction" << std::right;
  for (auto k : ks) out << std::setw(9) << ("P@" + std::to_string(k));
  out << std::setw(9) << "MRR" << std::setw(8) << "n" << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(label_w)) << (r.label.empty() ? "-" : r.label)
        << std::right;
    for (auto k : ks) {
      auto it = r.p_at_k.find(k);
      if (it == r.p_at_k.end())
        out << std::setw(9) << "-";
      else
        out << std::setw(9) << it->second * 100.0;
    }
    out << std::setw(9) << r.mrr * 100.0 << std::setw(8) << r.n_items << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

// --- significance ---------------------------------------------------------

ChiSquareResult chi_square_compare(std::size_t correct_a, std::size_t total_a, std::size_t correct_b,
                                   std::size_t total_b) {
  if (total_a == 0 || total_b == 0) throw std::invalid_argument("chi-square: totals must be > 0");
  if (correct_a > total_a || correct_b > total_b)
    throw std::invalid_argument("chi-square: correct count exceeds total");

  const double obs[2][2] = {{double(correct_a), double(total_a - correct_a)},
                            {double(correct_b), double(total_b - correct_b)}};
  const double row[2] = {double(total_a), double(total_b)};
  const double col[2] = {obs[0][0] + obs[1][0], obs[0][1] + obs[1][1]};
  const double n = row[0] + row[1];
  if (col[0] == 0.0 || col[1] == 0.0) return {0.0, 1.0, true};

  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double e = row[i] * col[j] / n;
      const double d = obs[i][j] - e;
      chi2 += d * d / e;
    }
  // Survival function of chi2 with 1 dof.
  const double p = chi2 > 0.0 ? boost::math::gamma_q(0.5, chi2 / 2.0) : 1.0;
  return {chi2, p, false};
}

ChiSquareResult chi_square_pooled(std::span<const EvalReport> a, std::span<const EvalReport> b) {
  std::size_t ca = 0, ta = 0, cb = 0, tb = 0;
  for (const auto& r : a) ca += r.correct_at_1(), ta += r.n_items;
  for (const auto& r : b) cb += r.correct_at_1(), tb += r.n_items;
  return chi_square_compare(ca, ta, cb, tb);
}

std::vector<ChiSquareResult> chi_square_per_direction(std::span<const EvalReport> a,
                                                      std::span<const EvalReport> b) {
  if (a.size() != b.size()) throw std::invalid_argument("per-direction test needs paired reports");
  std::vector<ChiSquareResult> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(chi_square_compare(a[i].correct_at_1(), a[i].n_items, b[i].correct_at_1(), b[i].n_items));
  return out;
}

std::string_view significance_label(double p) {
  if (p < 1e-3) return "highly significant";
  if (p < 0.05) return "significant";
  return "not significant";
}

}  // namespace bli
