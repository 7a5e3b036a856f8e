#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bli/embedding_store.hpp"
#include "bli/generation.hpp"
#include "bli/prompt.hpp"

namespace bli {

struct Prediction {
  std::string query;
  std::optional<std::string> predicted;
  /// 1-based rank of the beam `predicted` came from.
  std::optional<std::size_t> beam_rank_used;
  /// First in-vocabulary word of each beam, deduplicated, in beam order.
  std::vector<std::string> candidates_ranked;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Lowercased view of a target vocabulary.
class TargetVocabulary {
 public:
  explicit TargetVocabulary(const EmbeddingStore& store);
  explicit TargetVocabulary(std::span<const std::string> tokens);

  /// The vocabulary entry whose lowercase form equals lowercase(word).
  const std::string* find(std::string_view word) const;
  std::size_t size() const { return by_lower_.size(); }

 private:
  void add(const std::string& token);
  std::unordered_map<std::string, std::string> by_lower_;
};

/// Literal tokens removed from beam text before word splitting.
std::vector<std::string> special_token_profile(std::string_view model_family);

/// Characters stripped from both ends of every word: . , : ; ! ? " ' » «
bool is_strippable_punct(std::string_view utf8_char);
std::string_view strip_punct(std::string_view word);

/// Cleans one beam: drops the echoed prompt when params.echo_input is set,
/// removes special tokens, splits on whitespace and strips punctuation from
/// each piece. Empty pieces are dropped.
std::vector<std::string> clean_beam(std::string_view text, const PromptInstance& prompt,
                                    const GenerationParams& params,
                                    std::span<const std::string> special_tokens);

/// Walks beams best-first and returns the first word found in the target
/// vocabulary. Never throws on content: no in-vocab word means no prediction.
Prediction extract(const BeamResult& beams, const PromptInstance& prompt,
                   const TargetVocabulary& vocab, const GenerationParams& params,
                   std::span<const std::string> special_tokens);

Prediction extract(const BeamResult& beams, const PromptInstance& prompt,
                   const EmbeddingStore& tgt_vocab, const GenerationParams& params,
                   std::span<const std::string> special_tokens);

std::vector<Prediction> extract_all(std::span<const BeamResult> beams,
                                    std::span<const PromptInstance> prompts,
                                    const TargetVocabulary& vocab, const GenerationParams& params,
                                    std::span<const std::string> special_tokens);

/// "query<TAB>predicted<TAB>beam_rank", one line per prediction; a missing
/// prediction leaves both trailing fields empty.
void write_predictions_tsv(std::ostream& out, std::span<const Prediction> predictions);
/// Reads the TSV form back. candidates_ranked holds the prediction, if any.
std::vector<Prediction> read_predictions_tsv(std::istream& in);

/// JSON Lines form carrying candidates_ranked as well.
void write_predictions_jsonl(std::ostream& out, std::span<const Prediction> predictions);
std::vector<Prediction> read_predictions_jsonl(std::istream& in);

/// Picks the reader by extension (.jsonl or .tsv). Throws IoError / SchemaMismatch.
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

}  // namespace bli
