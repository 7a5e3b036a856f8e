#include "bli/http_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>

#include "bli/errors.hpp"

namespace bli {

namespace {

using nlohmann::json;

bool is_transient(int status) { return status == 429 || status >= 500; }

BeamResult parse_beams(const json& arr) {
  if (!arr.is_array()) throw MalformedResponse("result entry is not an array");
  BeamResult r;
  for (const auto& seq : arr) {
    if (!seq.is_object() || !seq.contains("text") || !seq.contains("score") ||
        !seq["text"].is_string() || !seq["score"].is_number())
      throw MalformedResponse("sequence must be {\"text\": string, \"score\": number}");
    r.sequences.push_back({seq["text"].get<std::string>(), seq["score"].get<double>()});
  }
  return r;
}

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig cfg;
  if (const char* url = std::getenv("BLI_BACKEND_URL")) cfg.url = url;
  if (const char* token = std::getenv("BLI_BACKEND_TOKEN")) cfg.token = token;
  return cfg;
}

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.url.empty()) throw ConfigError("HTTP backend needs a URL (set BLI_BACKEND_URL)");
  if (cfg_.chunk_size == 0 || cfg_.max_in_flight == 0)
    throw ConfigError("chunk_size and max_in_flight must be >= 1");
  auto scheme_end = cfg_.url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("backend URL lacks a scheme: " + cfg_.url);
  const std::string scheme = cfg_.url.substr(0, scheme_end);
  if (scheme != "http") throw ConfigError("unsupported backend URL scheme '" + scheme + "'");
  auto path_start = cfg_.url.find('/', scheme_end + 3);
  origin_ = cfg_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);
}

std::vector<BeamResult> HttpBackend::generate_chunk(std::span<const PromptInstance> chunk,
                                                    const GenerationParams& params) const {
  json req;
  req["prompts"] = json::array();
  for (const auto& p : chunk) req["prompts"].push_back(p.rendered);
  req["beam_size"] = params.beam_size;
  req["max_new_tokens"] = params.max_new_tokens;
  req["num_return_sequences"] = params.num_return_sequences;
  const std::string body = req.dump();

  httplib::Headers headers;
  if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(cfg_.timeout);
  client.set_write_timeout(cfg_.timeout);

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * (1LL << (attempt - 1)));
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (is_transient(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw BackendUnavailable(name() + " answered HTTP " + std::to_string(res->status));

    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array())
      throw MalformedResponse("response lacks a \"results\" array");
    const auto& results = doc["results"];
    if (results.size() != chunk.size())
      throw MalformedResponse("expected " + std::to_string(chunk.size()) + " results, got " +
                              std::to_string(results.size()));
    std::vector<BeamResult> out;
    out.reserve(chunk.size());
    for (const auto& r : results) out.push_back(parse_beams(r));
    return out;
  }
  throw BackendUnavailable(name() + " failed after " + std::to_string(cfg_.max_retries + 1) +
                           " attempts (" + last_error + ")");
}

std::vector<BeamResult> HttpBackend::generate(std::span<const PromptInstance> prompts,
                                              const GenerationParams& params) {
  const std::size_t n_chunks = (prompts.size() + cfg_.chunk_size - 1) / cfg_.chunk_size;
  std::vector<std::vector<BeamResult>> chunk_results(n_chunks);
  std::vector<std::exception_ptr> errors(n_chunks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      const std::size_t begin = c * cfg_.chunk_size;
      const std::size_t len = std::min(cfg_.chunk_size, prompts.size() - begin);
      try {
        chunk_results[c] = generate_chunk(prompts.subspan(begin, len), params);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(cfg_.max_in_flight, n_chunks);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<BeamResult> out;
  out.reserve(prompts.size());
  for (auto& chunk : chunk_results)
    for (auto& r : chunk) out.push_back(std::move(r));
  return out;
}

}  // namespace bli
