#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "bli/errors.hpp"
#include "bli/evaluation.hpp"
#include "support/toy_world.hpp"

using namespace bli;

namespace {

// Closed-form 2x2 statistic and the 1-dof survival function via erfc.
std::pair<double, double> chi2_oracle(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double num = n * (a * d - b * c) * (a * d - b * c);
  const double chi2 = num / ((a + b) * (c + d) * (a + c) * (b + d));
  return {chi2, std::erfc(std::sqrt(chi2 / 2.0))};
}

Prediction pred(std::string q, std::optional<std::string> p, std::vector<std::string> cands = {}) {
  if (cands.empty() && p) cands = {*p};
  return {std::move(q), std::move(p), p ? std::optional<std::size_t>(1) : std::nullopt, std::move(cands)};
}

}  // namespace

TEST(ChiSquare, MatchesFrozenReferenceValues) {
  struct Case {
    std::size_t a, b, c, d;
    double chi2, p;
  };
  const Case cases[] = {
      {1200, 800, 1000, 1000, 40.4040404040404, 2.0651359139394069e-10},
      {600, 400, 400, 600, 80.0, 3.744097384202887e-19},
      {1203, 797, 1118, 882, 7.416039019142875, 0.006464497198946084},
      {45, 55, 30, 70, 4.8, 0.028459736916310638},
  };
  for (const auto& k : cases) {
    auto r = chi_square_compare(k.a, k.a + k.b, k.c, k.c + k.d);
    EXPECT_NEAR(r.chi2, k.chi2, 1e-6);
    EXPECT_NEAR(r.p, k.p, 1e-6);
    EXPECT_NEAR(r.p / k.p, 1.0, 1e-6);
    EXPECT_FALSE(r.degenerate);
  }
}

TEST(ChiSquare, EqualProportionsGivePOne) {
  auto r = chi_square_compare(500, 1000, 500, 1000);
  EXPECT_EQ(r.chi2, 0.0);
  EXPECT_EQ(r.p, 1.0);
}

TEST(ChiSquare, RandomTablesAgainstErfcOracle) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 20; ++t) {
    const std::size_t na = 50 + rng() % 2000, nb = 50 + rng() % 2000;
    const std::size_t ca = 1 + rng() % (na - 1), cb = 1 + rng() % (nb - 1);
    auto r = chi_square_compare(ca, na, cb, nb);
    auto [chi2, p] = chi2_oracle(double(ca), double(na - ca), double(cb), double(nb - cb));
    EXPECT_NEAR(r.chi2, chi2, 1e-6 * std::max(1.0, chi2));
    EXPECT_NEAR(r.p, p, 1e-6);
  }
}

TEST(ChiSquare, SymmetricAndBounded) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t na = 1 + rng() % 300, nb = 1 + rng() % 300;
    const std::size_t ca = rng() % (na + 1), cb = rng() % (nb + 1);
    auto ab = chi_square_compare(ca, na, cb, nb);
    auto ba = chi_square_compare(cb, nb, ca, na);
    EXPECT_NEAR(ab.chi2, ba.chi2, 1e-9 * std::max(1.0, ab.chi2));
    EXPECT_NEAR(ab.p, ba.p, 1e-12);
    EXPECT_GE(ab.chi2, 0.0);
    EXPECT_GT(ab.p, 0.0);
    EXPECT_LE(ab.p, 1.0);
  }
}

TEST(ChiSquare, DegenerateAndInvalidTables) {
  auto r = chi_square_compare(0, 10, 0, 20);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_TRUE(chi_square_compare(10, 10, 20, 20).degenerate);
  EXPECT_THROW(chi_square_compare(1, 0, 1, 2), std::invalid_argument);
  EXPECT_THROW(chi_square_compare(3, 2, 1, 2), std::invalid_argument);
}

TEST(ChiSquare, SignificanceVocabulary) {
  EXPECT_EQ(significance_label(0.0009), "highly significant");
  EXPECT_EQ(significance_label(0.001), "significant");
  EXPECT_EQ(significance_label(0.049), "significant");
  EXPECT_EQ(significance_label(0.05), "not significant");
  EXPECT_EQ(significance_label(1.0), "not significant");
}

TEST(ChiSquare, PooledSumsCountsAcrossReports) {
  EvalReport a1, a2, b1, b2;
  a1.correctness = {true, true, false};
  a2.correctness = {true, false};
  b1.correctness = {false, false, false};
  b2.correctness = {true, false};
  for (auto* r : {&a1, &a2, &b1, &b2}) r->n_items = r->correctness.size();
  std::vector<EvalReport> a = {a1, a2}, b = {b1, b2};
  auto pooled = chi_square_pooled(a, b);
  auto direct = chi_square_compare(3, 5, 1, 5);
  EXPECT_DOUBLE_EQ(pooled.chi2, direct.chi2);
  EXPECT_DOUBLE_EQ(pooled.p, direct.p);
  EXPECT_EQ(chi_square_per_direction(a, b).size(), 2u);
  std::vector<EvalReport> one = {a1};
  EXPECT_THROW(chi_square_per_direction(a, one), std::invalid_argument);
}

TEST(Score, MultiGoldSecondVariantCounts) {
  GoldMap gold = {{"hund", {"chien", "toutou"}}, {"katze", {"chat"}}};
  std::vector<Prediction> preds = {pred("hund", "toutou"), pred("katze", "chien")};
  auto r = score(preds, gold);
  EXPECT_EQ(r.p_at_k.at(1), 0.5);
  EXPECT_EQ(r.correctness, (std::vector<bool>{true, false}));
}

TEST(Score, CaseInsensitiveMatch) {
  GoldMap gold = {{"hund", {"Hound"}}};
  std::vector<Prediction> preds = {pred("hund", "hOUND")};
  EXPECT_EQ(score(preds, gold).p_at_k.at(1), 1.0);
}

TEST(Score, WrongFirstCandidateGoldSecond) {
  GoldMap gold = {{"x", {"x_gold"}}};
  std::vector<Prediction> preds = {pred("x", "x_wrong", {"x_wrong", "x_gold"})};
  auto r = score(preds, gold);
  EXPECT_EQ(r.p_at_k.at(1), 0.0);
  EXPECT_EQ(r.p_at_k.at(5), 1.0);
  EXPECT_EQ(r.mrr, 0.5);
  EXPECT_EQ(r.per_item[0].gold_rank, 2u);
}

TEST(Score, MissingPredictionIsWrong) {
  GoldMap gold = {{"x", {"y"}}};
  std::vector<Prediction> preds = {pred("x", std::nullopt)};
  auto r = score(preds, gold);
  EXPECT_EQ(r.p_at_k.at(1), 0.0);
  EXPECT_EQ(r.mrr, 0.0);
  EXPECT_FALSE(r.per_item[0].gold_rank);
}

TEST(Score, UnknownQueryThrows) {
  GoldMap gold = {{"x", {"y"}}};
  std::vector<Prediction> preds = {pred("z", "y")};
  EXPECT_THROW(score(preds, gold), UnknownQuery);
}

TEST(EvalConfig, Validation) {
  EvalConfig c;
  EXPECT_NO_THROW(c.validate());
  c.ks = {};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ks = {5, 1};
  EXPECT_THROW(c.validate(), ConfigError);
  c.ks = {0, 1};
  EXPECT_THROW(c.validate(), ConfigError);
}

// Randomized fixtures: P@K rises with K, agrees with a direct count, is
// invariant under permutation of the items, and the report survives JSON.
TEST(Score, RandomFixturesMonotoneStableAndRoundTrip) {
  std::mt19937_64 rng(11);
  const EvalConfig cfg{{1, 2, 3, 5, 10}};
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const std::size_t n = 1 + rng() % 20;
    GoldMap gold;
    std::vector<Prediction> preds;
    std::vector<std::optional<std::size_t>> first_hit;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      const std::size_t n_gold = 1 + rng() % 3;
      for (std::size_t g = 0; g < n_gold; ++g) gold[q].insert(q + "_g" + std::to_string(g));
      std::vector<std::string> cands;
      std::optional<std::size_t> hit;
      const std::size_t nc = rng() % 8;
      for (std::size_t c = 0; c < nc; ++c) {
        if (rng() % 4 == 0) {
          cands.push_back(q + "_g" + std::to_string(rng() % n_gold));
          if (!hit) hit = c + 1;
        } else {
          cands.push_back(q + "_w" + std::to_string(c));
        }
      }
      // Remove duplicate gold hits so ranks stay as built.
      std::vector<std::string> dedup;
      hit.reset();
      for (const auto& c : cands) {
        if (std::find(dedup.begin(), dedup.end(), c) != dedup.end()) continue;
        dedup.push_back(c);
        if (!hit && gold[q].count(c)) hit = dedup.size();
      }
      first_hit.push_back(hit);
      preds.push_back(pred(q, dedup.empty() ? std::nullopt : std::optional<std::string>(dedup[0]), dedup));
    }
    auto r = score(preds, gold, cfg, "fx");
    double prev = -1;
    for (std::size_t k : cfg.ks) {
      std::size_t want = 0;
      for (const auto& h : first_hit) want += h && *h <= k;
      ASSERT_DOUBLE_EQ(r.p_at_k.at(k), double(want) / double(n)) << "fixture " << fixture << " k " << k;
      ASSERT_GE(r.p_at_k.at(k), prev);
      prev = r.p_at_k.at(k);
    }
    double mrr = 0;
    for (const auto& h : first_hit) mrr += h ? 1.0 / double(*h) : 0.0;
    ASSERT_NEAR(r.mrr, mrr / double(n), 1e-12);

    auto shuffled = preds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto rs = score(shuffled, gold, cfg, "fx");
    ASSERT_EQ(rs.p_at_k, r.p_at_k);
    ASSERT_NEAR(rs.mrr, r.mrr, 1e-12);

    ASSERT_EQ(report_from_json(report_to_json(r)), r);
  }
}

TEST(Report, RejectsInconsistentJson) {
  GoldMap gold = {{"x", {"y"}}};
  std::vector<Prediction> preds = {pred("x", "y")};
  auto json = report_to_json(score(preds, gold));
  EXPECT_THROW(report_from_json("{}"), SchemaMismatch);
  EXPECT_THROW(report_from_json("nope"), SchemaMismatch);
  auto tampered = nlohmann::json::parse(json);
  tampered["n_items"] = 2;
  EXPECT_THROW(report_from_json(tampered.dump()), SchemaMismatch);
  tampered = nlohmann::json::parse(json);
  tampered["version"] = 99;
  EXPECT_THROW(report_from_json(tampered.dump()), SchemaMismatch);
}

TEST(Report, SaveLoadAndTable) {
  GoldMap gold = {{"x", {"y"}}, {"a", {"b"}}};
  std::vector<Prediction> preds = {pred("x", "y"), pred("a", "c")};
  auto r = score(preds, gold, {}, "de-fr");
  auto dir = toy::scratch_dir("report");
  save_report(dir / "r.json", r);
  EXPECT_EQ(load_report(dir / "r.json"), r);
  std::ostringstream out;
  std::vector<EvalReport> rs = {r};
  write_report_table(out, rs);
  EXPECT_NE(out.str().find("de-fr"), std::string::npos);
  EXPECT_NE(out.str().find("50.00"), std::string::npos);
}
