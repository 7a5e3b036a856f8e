#include "bli/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "bli/errors.hpp"
#include "bli/retrieval.hpp"
#include "bli/text.hpp"

namespace bli {

namespace {

std::optional<std::size_t> rank_in(const EmbeddingStore& store, const std::string& word) {
  if (auto r = store.frequency_rank(word)) return r;
  return store.frequency_rank(text::to_lower(word));
}

}  // namespace

ExampleSelector::ExampleSelector(const Lexicon& seed, const EmbeddingStore& aux_store,
                                 const EmbeddingStore* tgt_store)
    : aux_(&aux_store) {
  // One candidate per distinct source; keep the most frequent target.
  std::unordered_map<std::string, std::size_t> by_source;
  std::vector<std::size_t> best_rank;
  constexpr auto kAbsent = std::numeric_limits<std::size_t>::max();
  for (const auto& e : seed.entries()) {
    const std::size_t rank = tgt_store ? rank_in(*tgt_store, e.target).value_or(kAbsent) : kAbsent;
    auto [it, inserted] = by_source.emplace(e.source, candidates_.size());
    if (inserted) {
      candidates_.push_back({e.source, text::to_lower(e.source), e.target, rank_in(aux_store, e.source)});
      best_rank.push_back(rank);
    } else if (rank < best_rank[it->second]) {
      candidates_[it->second].target = e.target;
      best_rank[it->second] = rank;
    }
  }

  std::vector<std::string> tokens;
  std::vector<float> rows;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (!candidates_[c].aux_rank) continue;
    auto row = aux_store.row(*candidates_[c].aux_rank);
    bool nonzero = std::any_of(row.begin(), row.end(), [](float v) { return v != 0.0f; });
    if (!nonzero) continue;
    embedded_.push_back(c);
    tokens.push_back(candidates_[c].source);
    rows.insert(rows.end(), row.begin(), row.end());
  }
  const std::size_t n = tokens.size();
  candidate_store_ = EmbeddingStore::from_rows(std::move(tokens), DenseMatrix(n, aux_store.dim(), std::move(rows)),
                                               /*normalize=*/true);

  by_frequency_ = embedded_;
  std::stable_sort(by_frequency_.begin(), by_frequency_.end(), [&](std::size_t a, std::size_t b) {
    return *candidates_[a].aux_rank < *candidates_[b].aux_rank;
  });
}

std::optional<std::span<const float>> ExampleSelector::query_vector(std::string_view query) const {
  if (auto e = aux_->lookup(query)) return e->vector;
  if (auto e = aux_->lookup(text::to_lower(query))) return e->vector;
  return std::nullopt;
}

std::vector<std::size_t> ExampleSelector::excluded_for(std::string_view query, bool exclude_self) const {
  std::vector<std::size_t> out;
  if (!exclude_self) return out;
  const auto lowered = text::to_lower(query);
  for (std::size_t c = 0; c < candidates_.size(); ++c)
    if (candidates_[c].lowered == lowered) out.push_back(c);
  return out;
}

IclExample ExampleSelector::example(std::size_t c) const {
  return {candidates_[c].source, candidates_[c].target, candidates_[c].aux_rank};
}

Selection ExampleSelector::finish(std::vector<std::size_t> picked, Provenance prov,
                                  const PromptConfig& cfg) const {
  if (cfg.strict && picked.size() < cfg.n_shots)
    throw InsufficientSeeds("only " + std::to_string(picked.size()) + " usable seed pairs for " +
                            std::to_string(cfg.n_shots) + " shots");
  Selection s;
  s.provenance = prov;
  for (std::size_t c : picked) s.examples.push_back(example(c));
  return s;
}

Selection ExampleSelector::fallback(std::string_view query, const PromptConfig& cfg,
                                    bool exclude_self) const {
  const auto excluded = excluded_for(query, exclude_self);
  std::vector<std::size_t> picked;
  for (std::size_t c : by_frequency_) {
    if (picked.size() == cfg.n_shots) break;
    if (std::find(excluded.begin(), excluded.end(), c) == excluded.end()) picked.push_back(c);
  }
  return finish(std::move(picked), Provenance::FrequencyFallback, cfg);
}

Selection ExampleSelector::random(std::string_view query, const PromptConfig& cfg,
                                  bool exclude_self) const {
  const auto excluded = excluded_for(query, exclude_self);
  std::vector<std::size_t> pool;
  for (std::size_t c = 0; c < candidates_.size(); ++c)
    if (std::find(excluded.begin(), excluded.end(), c) == excluded.end()) pool.push_back(c);

  // Seeded per query so that the draw does not depend on processing order.
  std::mt19937_64 rng(text::fnv1a64(query, cfg.random_seed ^ 0x9e3779b97f4a7c15ULL));
  const std::size_t take = std::min(cfg.n_shots, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return finish(std::move(pool), Provenance::Random, cfg);
}

Selection ExampleSelector::select(std::string_view query, const PromptConfig& cfg, bool exclude_self) const {
  std::string q(query);
  return std::move(select_batch(std::span<const std::string>(&q, 1), cfg, exclude_self).front());
}

std::vector<Selection> ExampleSelector::select_batch(std::span<const std::string> queries,
                                                     const PromptConfig& cfg, bool exclude_self) const {
  std::vector<Selection> out(queries.size());
  if (cfg.selection == SelectionMode::None || cfg.n_shots == 0) return out;

  if (cfg.selection == SelectionMode::Random) {
    for (std::size_t i = 0; i < queries.size(); ++i) out[i] = random(queries[i], cfg, exclude_self);
    return out;
  }

  // Nearest mode. Queries without a vector take the frequency fallback; the
  // rest share one batched search.
  std::vector<std::size_t> embedded_queries;
  std::vector<float> qmat;
  std::size_t max_excluded = 0;
  std::vector<std::vector<std::size_t>> excluded(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto v = query_vector(queries[i]);
    if (!v) {
      out[i] = fallback(queries[i], cfg, exclude_self);
      continue;
    }
    embedded_queries.push_back(i);
    qmat.insert(qmat.end(), v->begin(), v->end());
    excluded[i] = excluded_for(queries[i], exclude_self);
    max_excluded = std::max(max_excluded, excluded[i].size());
  }
  if (embedded_queries.empty()) return out;

  if (candidate_store_.size() == 0) {
    for (std::size_t i : embedded_queries) out[i] = finish({}, Provenance::Nearest, cfg);
    return out;
  }

  // Over-fetch by the largest exclusion count, then filter per query; the
  // ranking is total, so this equals a per-query excluded search.
  const MatrixView qview{qmat.data(), embedded_queries.size(), aux_->dim()};
  const auto tops = retrieval::top_k_cosine_batch(candidate_store_, qview, cfg.n_shots + max_excluded);
  for (std::size_t j = 0; j < embedded_queries.size(); ++j) {
    const std::size_t i = embedded_queries[j];
    std::vector<std::size_t> picked;
    for (const auto& n : tops[j]) {
      if (picked.size() == cfg.n_shots) break;
      const std::size_t c = embedded_[n.index];
      if (std::find(excluded[i].begin(), excluded[i].end(), c) != excluded[i].end()) continue;
      picked.push_back(c);
    }
    out[i] = finish(std::move(picked), Provenance::Nearest, cfg);
  }
  return out;
}

}  // namespace bli
