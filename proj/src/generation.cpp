#include "bli/generation.hpp"

#include "bli/errors.hpp"

namespace bli {

void GenerationParams::validate() const {
  if (beam_size == 0) throw ConfigError("beam_size must be >= 1");
  if (max_new_tokens == 0) throw ConfigError("max_new_tokens must be >= 1");
  if (num_return_sequences == 0) throw ConfigError("num_return_sequences must be >= 1");
  if (num_return_sequences > beam_size)
    throw ConfigError("num_return_sequences (" + std::to_string(num_return_sequences) +
                      ") exceeds beam_size (" + std::to_string(beam_size) + ")");
}

void validate_beam_result(const BeamResult& r, const GenerationParams& params) {
  if (r.sequences.size() != params.num_return_sequences)
    throw MalformedResponse("expected " + std::to_string(params.num_return_sequences) +
                            " sequences, got " + std::to_string(r.sequences.size()));
  for (std::size_t i = 1; i < r.sequences.size(); ++i)
    if (r.sequences[i].score > r.sequences[i - 1].score)
      throw MalformedResponse("beam scores increase at rank " + std::to_string(i + 1));
}

std::vector<BeamResult> generate(Backend& backend, std::span<const PromptInstance> prompts,
                                 const GenerationParams& params) {
  if (prompts.empty()) throw ConfigError("generate: no prompts");
  params.validate();
  auto results = backend.generate(prompts, params);
  if (results.size() != prompts.size())
    throw MalformedResponse(backend.name() + " returned " + std::to_string(results.size()) +
                            " results for " + std::to_string(prompts.size()) + " prompts");
  for (const auto& r : results) validate_beam_result(r, params);
  return results;
}

std::string junk_token(std::size_t i) { return "#junk" + std::to_string(i) + "#"; }

namespace {

BeamResult to_beams(std::vector<std::string> texts, const PromptInstance& p, const GenerationParams& params) {
  BeamResult r;
  for (std::size_t i = 0; i < params.num_return_sequences; ++i) {
    std::string body = i < texts.size() ? std::move(texts[i]) : junk_token(i + 1);
    std::string text = params.echo_input ? p.rendered + " " + body : body;
    r.sequences.push_back({std::move(text), -0.25 * static_cast<double>(i)});
  }
  return r;
}

class FunctionBackend final : public Backend {
 public:
  FunctionBackend(std::string name, ContinuationFn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

  std::string name() const override { return name_; }

  std::vector<BeamResult> generate(std::span<const PromptInstance> prompts,
                                   const GenerationParams& params) override {
    std::vector<BeamResult> out;
    out.reserve(prompts.size());
    for (const auto& p : prompts) out.push_back(to_beams(fn_(p), p, params));
    return out;
  }

 private:
  std::string name_;
  ContinuationFn fn_;
};

}  // namespace

std::unique_ptr<Backend> make_function_backend(std::string name, ContinuationFn fn) {
  return std::make_unique<FunctionBackend>(std::move(name), std::move(fn));
}

std::unique_ptr<Backend> make_oracle_backend(GoldMap gold, std::optional<std::size_t> noise_rank) {
  const std::size_t rank = noise_rank.value_or(1);
  if (rank == 0) throw ConfigError("noise_rank is 1-based");
  return make_function_backend(
      noise_rank ? "mock-oracle:" + std::to_string(rank) : "mock-oracle",
      [gold = std::move(gold), rank](const PromptInstance& p) {
        std::vector<std::string> beams;
        auto it = gold.find(p.query);
        if (it == gold.end() || it->second.empty()) return beams;
        for (std::size_t i = 1; i < rank; ++i) beams.push_back(junk_token(i));
        beams.push_back(*it->second.begin());
        return beams;
      });
}

std::unique_ptr<Backend> make_echo_backend(std::string continuation) {
  // Echoes regardless of params.echo_input: this double stands in for a
  // decoder-only server.
  class EchoBackend final : public Backend {
   public:
    explicit EchoBackend(std::string c) : continuation_(std::move(c)) {}
    std::string name() const override { return "mock-echo"; }
    std::vector<BeamResult> generate(std::span<const PromptInstance> prompts,
                                     const GenerationParams& params) override {
      std::vector<BeamResult> out;
      for (const auto& p : prompts) {
        BeamResult r;
        for (std::size_t i = 0; i < params.num_return_sequences; ++i) {
          std::string text = p.rendered;
          if (!continuation_.empty()) text += " " + continuation_;
          r.sequences.push_back({std::move(text), -0.25 * static_cast<double>(i)});
        }
        out.push_back(std::move(r));
      }
      return out;
    }

   private:
    std::string continuation_;
  };
  return std::make_unique<EchoBackend>(std::move(continuation));
}

}  // namespace bli
