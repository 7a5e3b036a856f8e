#include "bli/extraction.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <unordered_set>

#include "bli/errors.hpp"
#include "bli/templates.hpp"
#include "bli/text.hpp"

namespace bli {

TargetVocabulary::TargetVocabulary(const EmbeddingStore& store) {
  by_lower_.reserve(store.size());
  for (const auto& t : store.tokens()) add(t);
}

TargetVocabulary::TargetVocabulary(std::span<const std::string> tokens) {
  by_lower_.reserve(tokens.size());
  for (const auto& t : tokens) add(t);
}

// Frequency order: the first token with a given lowercase form represents it.
void TargetVocabulary::add(const std::string& token) { by_lower_.try_emplace(text::to_lower(token), token); }

const std::string* TargetVocabulary::find(std::string_view word) const {
  auto it = by_lower_.find(text::to_lower(word));
  return it == by_lower_.end() ? nullptr : &it->second;
}

std::vector<std::string> special_token_profile(std::string_view model_family) {
  const std::string f = canonical_model_family(model_family);
  auto is = [&](std::string_view prefix) { return text::starts_with(f, prefix); };
  if (is("mt5") || is("mt0")) return {"<extra_id_0>", "<extra_id_1>", "<pad>", "</s>", "<unk>"};
  if (is("llama")) return {"<s>", "</s>", "<unk>"};
  if (is("xglm") || is("mgpt")) return {"<s>", "</s>", "<pad>", "<unk>"};
  return {"<pad>", "<s>", "</s>", "<mask>", "<unk>"};
}

namespace {

constexpr std::array<std::string_view, 10> kPunct = {".", ",", ":", ";", "!", "?", "\"", "'",
                                                     "»", "«"};

// Length of a strippable character at the front (or back) of `s`, or 0.
std::size_t punct_prefix(std::string_view s) {
  for (auto p : kPunct)
    if (s.starts_with(p)) return p.size();
  return 0;
}

std::size_t punct_suffix(std::string_view s) {
  for (auto p : kPunct)
    if (s.ends_with(p)) return p.size();
  return 0;
}

std::string_view skip_specials(std::string_view s, std::span<const std::string> specials) {
  for (bool progressed = true; progressed;) {
    progressed = false;
    s = text::trim(s);
    for (const auto& tok : specials)
      if (!tok.empty() && s.starts_with(tok)) {
        s.remove_prefix(tok.size());
        progressed = true;
      }
  }
  return s;
}

}  // namespace

bool is_strippable_punct(std::string_view utf8_char) {
  for (auto p : kPunct)
    if (utf8_char == p) return true;
  return false;
}

std::string_view strip_punct(std::string_view word) {
  while (std::size_t n = punct_prefix(word)) word.remove_prefix(n);
  while (std::size_t n = punct_suffix(word)) word.remove_suffix(n);
  return word;
}

std::vector<std::string> clean_beam(std::string_view text, const PromptInstance& prompt,
                                    const GenerationParams& params,
                                    std::span<const std::string> special_tokens) {
  std::vector<std::string> specials(special_tokens.begin(), special_tokens.end());
  if (prompt.mask_token && !prompt.mask_token->empty()) specials.push_back(*prompt.mask_token);

  std::string_view body = text;
  if (params.echo_input) {
    std::string_view after = skip_specials(body, specials);
    if (!prompt.rendered.empty() && after.starts_with(prompt.rendered))
      body = after.substr(prompt.rendered.size());
  }

  std::string cleaned(body);
  for (const auto& tok : specials)
    if (!tok.empty()) cleaned = text::replace_all(cleaned, tok, " ");

  std::vector<std::string> words;
  for (auto piece : text::split_ws(cleaned)) {
    auto w = strip_punct(piece);
    if (!w.empty()) words.emplace_back(w);
  }
  return words;
}

Prediction extract(const BeamResult& beams, const PromptInstance& prompt,
                   const TargetVocabulary& vocab, const GenerationParams& params,
                   std::span<const std::string> special_tokens) {
  Prediction out;
  out.query = prompt.query;
  std::unordered_set<std::string> seen;
  for (std::size_t b = 0; b < beams.sequences.size(); ++b) {
    for (const auto& w : clean_beam(beams.sequences[b].text, prompt, params, special_tokens)) {
      const std::string* hit = vocab.find(w);
      if (!hit) continue;
      if (!out.predicted) {
        out.predicted = *hit;
        out.beam_rank_used = b + 1;
      }
      if (seen.insert(*hit).second) out.candidates_ranked.push_back(*hit);
      break;
    }
  }
  return out;
}

Prediction extract(const BeamResult& beams, const PromptInstance& prompt,
                   const EmbeddingStore& tgt_vocab, const GenerationParams& params,
                   std::span<const std::string> special_tokens) {
  return extract(beams, prompt, TargetVocabulary(tgt_vocab), params, special_tokens);
}

std::vector<Prediction> extract_all(std::span<const BeamResult> beams,
                                    std::span<const PromptInstance> prompts,
                                    const TargetVocabulary& vocab, const GenerationParams& params,
                                    std::span<const std::string> special_tokens) {
  if (beams.size() != prompts.size())
    throw MalformedResponse(std::to_string(beams.size()) + " beam results for " +
                            std::to_string(prompts.size()) + " prompts");
  std::vector<Prediction> out(prompts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < prompts.size(); ++i)
    out[i] = extract(beams[i], prompts[i], vocab, params, special_tokens);
  return out;
}

// --- persistence ----------------------------------------------------------

void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions) {
    out << p.query << '\t' << p.predicted.value_or("") << '\t';
    if (p.beam_rank_used) out << *p.beam_rank_used;
    out << '\n';
  }
}

std::vector<Prediction> read_predictions_tsv(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw SchemaMismatch("predictions TSV line " + std::to_string(lineno) + ": expected 3 fields");
    Prediction p;
    p.query = line.substr(0, t1);
    std::string pred = line.substr(t1 + 1, t2 - t1 - 1);
    std::string rank = line.substr(t2 + 1);
    if (!pred.empty()) {
      std::size_t r = 0;
      auto [ptr, ec] = std::from_chars(rank.data(), rank.data() + rank.size(), r);
      if (ec != std::errc() || ptr != rank.data() + rank.size() || r == 0)
        throw SchemaMismatch("predictions TSV line " + std::to_string(lineno) + ": bad beam rank");
      p.predicted = pred;
      p.beam_rank_used = r;
      p.candidates_ranked.push_back(pred);
    } else if (!rank.empty()) {
      throw SchemaMismatch("predictions TSV line " + std::to_string(lineno) +
                           ": beam rank without prediction");
    }
    out.push_back(std::move(p));
  }
  return out;
}

void write_predictions_jsonl(std::ostream& out, std::span<const Prediction> predictions) {
  for (const auto& p : predictions) {
    nlohmann::json j;
    j["query"] = p.query;
    j["predicted"] = p.predicted ? nlohmann::json(*p.predicted) : nlohmann::json(nullptr);
    j["beam_rank"] = p.beam_rank_used ? nlohmann::json(*p.beam_rank_used) : nlohmann::json(nullptr);
    j["candidates"] = p.candidates_ranked;
    out << j.dump() << '\n';
  }
}

std::vector<Prediction> read_predictions_jsonl(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Prediction p;
      p.query = j.at("query").get<std::string>();
      if (!j.at("predicted").is_null()) p.predicted = j["predicted"].get<std::string>();
      if (!j.at("beam_rank").is_null()) p.beam_rank_used = j["beam_rank"].get<std::size_t>();
      p.candidates_ranked = j.at("candidates").get<std::vector<std::string>>();
      if (p.predicted.has_value() != p.beam_rank_used.has_value())
        throw SchemaMismatch("predicted and beam_rank must both be set or both be null");
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaMismatch("predictions JSONL line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (path.extension() == ".jsonl") return read_predictions_jsonl(in);
  return read_predictions_tsv(in);
}

}  // namespace bli
