#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bli/embedding_store.hpp"
#include "bli/lexicon.hpp"
#include "bli/prompt.hpp"

namespace bli {

struct Selection {
  std::vector<IclExample> examples;
  Provenance provenance = Provenance::None;
};

/// Picks in-context examples from a seed dictionary.
///
/// Each distinct seed source contributes one candidate pair. When a source has
/// several targets, the one ranked most frequent in the target store wins
/// (file order breaks ties and covers targets missing from the store). Nearest
/// mode ranks candidates by cosine to the query in the auxiliary source-side
/// space; seed sources without an embedding are never nearest-mode candidates.
class ExampleSelector {
 public:
  ExampleSelector(const Lexicon& seed, const EmbeddingStore& aux_store,
                  const EmbeddingStore* tgt_store = nullptr);

  /// exclude_self drops any candidate whose source equals the query
  /// (case-insensitively).
  Selection select(std::string_view query, const PromptConfig& cfg, bool exclude_self) const;

  /// Same results as calling select() per query; nearest-mode searches run as
  /// one batched retrieval.
  std::vector<Selection> select_batch(std::span<const std::string> queries, const PromptConfig& cfg,
                                      bool exclude_self) const;

  /// Number of seed sources usable as nearest-mode candidates.
  std::size_t embedded_candidates() const { return embedded_.size(); }
  std::size_t candidates() const { return candidates_.size(); }

 private:
  struct Candidate {
    std::string source;
    std::string lowered;
    std::string target;
    std::optional<std::size_t> aux_rank;
  };

  std::optional<std::span<const float>> query_vector(std::string_view query) const;
  std::vector<std::size_t> excluded_for(std::string_view query, bool exclude_self) const;
  IclExample example(std::size_t candidate) const;
  Selection finish(std::vector<std::size_t> picked, Provenance prov, const PromptConfig& cfg) const;
  Selection fallback(std::string_view query, const PromptConfig& cfg, bool exclude_self) const;
  Selection random(std::string_view query, const PromptConfig& cfg, bool exclude_self) const;

  const EmbeddingStore* aux_;
  std::vector<Candidate> candidates_;
  std::vector<std::size_t> embedded_;       // candidate ids with an aux vector
  std::vector<std::size_t> by_frequency_;   // embedded_ sorted by aux rank
  EmbeddingStore candidate_store_;          // row i <-> embedded_[i]
};

}  // namespace bli
