#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bli/embedding_store.hpp"
#include "bli/evaluation.hpp"
#include "bli/generation.hpp"
#include "bli/http_backend.hpp"
#include "bli/prompt.hpp"
#include "bli/templates.hpp"

namespace bli {

/// Looks up an environment variable; injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();
EnvLookup no_env();

/// Everything one BLI run needs.
///
/// Text form is one "key = value" per line; '#' starts a comment and values
/// may be double-quoted. Every key can be overridden by the environment
/// variable BLI_<KEY> (upper case), and the environment wins over the file.
struct RunConfig {
  std::string src;
  std::string tgt;
  std::filesystem::path src_embeddings;
  std::filesystem::path tgt_embeddings;
  std::optional<std::filesystem::path> seed_lexicon;
  std::filesystem::path test_lexicon;
  std::optional<std::filesystem::path> languages_file;
  std::size_t trim = kDefaultVocabTrim;

  /// An explicit template id wins; otherwise the shot-specific id, then the
  /// model family's best template.
  std::optional<int> template_id;
  std::optional<int> zero_shot_template;
  std::optional<int> few_shot_template;
  std::string model_family;

  PromptConfig prompt;
  GenerationParams generation;
  EvalConfig eval;
  /// Overrides the family's special-token profile when set.
  std::optional<std::vector<std::string>> special_tokens;

  /// mock-oracle[:N] | mock-junk | mock-echo | http
  std::string backend = "mock-oracle";
  HttpBackendConfig http;

  std::filesystem::path output_dir = "bli-out";

  /// Preset names: "5k", "1k" (5-shot nearest) and "zero-shot".
  void apply_preset(std::string_view name);

  const Template& resolve_template(const TemplateCatalog& catalog = TemplateCatalog::builtin()) const;
  std::vector<std::string> special_token_list() const;
  LanguageTable language_table() const;

  /// Cross-field checks that need no file access. Throws ConfigError.
  void validate(const TemplateCatalog& catalog = TemplateCatalog::builtin()) const;
  /// Throws ConfigError naming the first referenced file that is missing.
  void check_files() const;
};

/// key -> raw value, as read from text.
using ConfigValues = std::map<std::string, std::string>;

ConfigValues parse_config_values(std::istream& in);
/// Builds a config from raw values plus environment overrides. Relative paths
/// are resolved against `base_dir`. Throws ConfigError on unknown keys or bad
/// values.
RunConfig build_config(ConfigValues values, const EnvLookup& env = process_env(),
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, const EnvLookup& env = process_env());

/// Applies "key=value" overrides on top of a config file's values.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides,
                      const EnvLookup& env = process_env());

/// Every key build_config understands.
const std::vector<std::string>& config_keys();

/// Mask literal and echo behaviour implied by a model family.
std::string default_mask_token(std::string_view model_family);
bool default_echo_input(std::string_view model_family);

}  // namespace bli
