#pragma once

#include <chrono>
#include <string>

#include "bli/generation.hpp"

namespace bli {

struct HttpBackendConfig {
  /// Full endpoint, e.g. "http://localhost:8000/generate".
  std::string url;
  /// Sent as "Authorization: Bearer <token>" when non-empty.
  std::string token;
  /// Prompts per request. Decoder-only servers that cannot pad may need 1.
  std::size_t chunk_size = 8;
  /// Upper bound on concurrent requests.
  std::size_t max_in_flight = 2;
  /// Retries per chunk after the first attempt.
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff{200};
  std::chrono::seconds timeout{300};

  /// url/token from BLI_BACKEND_URL / BLI_BACKEND_TOKEN.
  static HttpBackendConfig from_env();
};

/// JSON-over-HTTP client.
///
///   request:  {"prompts": [...], "beam_size": B, "max_new_tokens": M,
///              "num_return_sequences": R}
///   response: {"results": [[{"text": ..., "score": ...}, ...], ...]}
///
/// Prompts are sent in chunks; results are reassembled in input order.
/// Connection failures, 429 and 5xx are retried with exponential backoff;
/// once the budget is spent the call fails with BackendUnavailable.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);

  std::string name() const override { return "http:" + cfg_.url; }
  std::vector<BeamResult> generate(std::span<const PromptInstance> prompts,
                                   const GenerationParams& params) override;

 private:
  std::vector<BeamResult> generate_chunk(std::span<const PromptInstance> chunk,
                                         const GenerationParams& params) const;

  HttpBackendConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace bli
