#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace bli {

/// ISO 639-1 code -> English display name used in prompts.
class LanguageTable {
 public:
  /// The XLING/PanLex languages the pipeline ships with.
  static LanguageTable defaults();

  void set(const std::string& code, const std::string& name);
  bool contains(const std::string& code) const;
  /// Throws UnsupportedLanguage for unknown codes.
  const std::string& name(const std::string& code) const;
  const std::map<std::string, std::string>& entries() const { return names_; }

  /// Reads "code = Name" lines ('#' comments allowed) on top of this table.
  void load_overrides(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> names_;
};

struct LanguagePair {
  std::string src;
  std::string tgt;
  std::string src_name;
  std::string tgt_name;

  /// Validates both codes against `table` and fills the display names.
  static LanguagePair make(const std::string& src, const std::string& tgt,
                           const LanguageTable& table = LanguageTable::defaults());

  std::string tag() const { return src + "-" + tgt; }
  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;
};

}  // namespace bli
