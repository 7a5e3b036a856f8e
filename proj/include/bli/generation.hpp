#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bli/lexicon.hpp"
#include "bli/prompt.hpp"

namespace bli {

struct GenerationParams {
  std::size_t beam_size = 5;
  std::size_t max_new_tokens = 5;
  std::size_t num_return_sequences = 5;
  /// Decoder-only backends repeat the prompt before the continuation.
  bool echo_input = false;

  /// Throws ConfigError.
  void validate() const;
};

struct Beam {
  std::string text;
  double score = 0.0;  // log-probability-like; only the order is meaningful

  friend bool operator==(const Beam&, const Beam&) = default;
};

/// Final beam of one prompt, best sequence first.
struct BeamResult {
  std::vector<Beam> sequences;

  friend bool operator==(const BeamResult&, const BeamResult&) = default;
};

/// Throws MalformedResponse unless scores are non-increasing and the count
/// equals num_return_sequences.
void validate_beam_result(const BeamResult& r, const GenerationParams& params);

/// A text-generation server or test double. Implementations must accept
/// concurrent generate() calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<BeamResult> generate(std::span<const PromptInstance> prompts,
                                           const GenerationParams& params) = 0;
};

/// Runs a backend over `prompts` and checks the batch contract: one
/// well-formed BeamResult per prompt, in input order.
std::vector<BeamResult> generate(Backend& backend, std::span<const PromptInstance> prompts,
                                 const GenerationParams& params);

// --- test doubles -------------------------------------------------------

/// A junk string that never survives vocabulary filtering.
std::string junk_token(std::size_t i);

/// Deterministic dictionary oracle: the gold translation of each prompt's
/// query sits at beam rank 1, or at `noise_rank` with junk above it. Queries
/// without gold get junk only. Honors echo_input.
std::unique_ptr<Backend> make_oracle_backend(GoldMap gold, std::optional<std::size_t> noise_rank = {});

/// Echoes the rendered prompt in every beam, followed by `continuation`,
/// whatever the echo_input setting.
std::unique_ptr<Backend> make_echo_backend(std::string continuation = {});

/// Wraps a function returning the candidate continuations of one prompt,
/// best first. Output is padded with junk (or truncated) to
/// num_return_sequences, prefixed by the prompt when echo_input is set.
using ContinuationFn = std::function<std::vector<std::string>(const PromptInstance&)>;
std::unique_ptr<Backend> make_function_backend(std::string name, ContinuationFn fn);

}  // namespace bli
