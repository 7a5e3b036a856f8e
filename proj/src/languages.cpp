#include "bli/languages.hpp"

#include <fstream>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

LanguageTable LanguageTable::defaults() {
  LanguageTable t;
  t.names_ = {
      {"bg", "Bulgarian"}, {"ca", "Catalan"}, {"de", "German"},    {"en", "English"},
      {"fi", "Finnish"},   {"fr", "French"},  {"hr", "Croatian"},  {"hu", "Hungarian"},
      {"it", "Italian"},   {"ru", "Russian"}, {"tr", "Turkish"},
  };
  return t;
}

void LanguageTable::set(const std::string& code, const std::string& name) {
  names_[code] = name;
}

bool LanguageTable::contains(const std::string& code) const { return names_.count(code) > 0; }

const std::string& LanguageTable::name(const std::string& code) const {
  auto it = names_.find(code);
  if (it == names_.end()) throw UnsupportedLanguage("unsupported language code '" + code + "'");
  return it->second;
}

void LanguageTable::load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open language table " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'code = Name'");
    auto code = text::trim(body.substr(0, eq));
    auto name = text::trim(body.substr(eq + 1));
    if (code.empty() || name.empty())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": empty code or name");
    set(std::string(code), std::string(name));
  }
}

LanguagePair LanguagePair::make(const std::string& src, const std::string& tgt,
                                const LanguageTable& table) {
  if (src == tgt) throw UnsupportedLanguage("source and target language are both '" + src + "'");
  return LanguagePair{src, tgt, table.name(src), table.name(tgt)};
}

}  // namespace bli
