#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bli/prompt.hpp"

namespace bli {

/// The 102-entry template pool: ids 1-66 zero-shot, 67-102 few-shot.
class TemplateCatalog {
 public:
  /// The catalog compiled in from data/templates_v1.json.
  static const TemplateCatalog& builtin();

  /// Parses and validates a catalog document. Throws ConfigError.
  static TemplateCatalog parse(std::string_view json);
  static TemplateCatalog load(const std::filesystem::path& path);

  int version() const { return version_; }
  const std::vector<Template>& templates() const { return templates_; }
  std::size_t size() const { return templates_.size(); }
  /// Throws UnknownTemplate.
  const Template& get(int id) const;

  std::string to_json() const;

 private:
  int version_ = 0;
  std::vector<Template> templates_;
};

/// Model families with a recorded best template, in canonical spelling
/// (e.g. "mt5-xxl", "xglm-564m", "llama-13b").
std::vector<std::string> known_model_families();

/// Lowercases and unifies separators: "LLaMA_13B" -> "llama-13b".
std::string canonical_model_family(std::string_view name);

/// Best zero-/few-shot template found for a model during template search on
/// German-French. Throws UnknownModel.
const Template& best_template(std::string_view model_family, ShotKind kind,
                              const TemplateCatalog& catalog = TemplateCatalog::builtin());

}  // namespace bli
