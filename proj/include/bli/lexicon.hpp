#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "bli/languages.hpp"

namespace bli {

struct TranslationPair {
  std::string source;
  std::string target;

  friend bool operator==(const TranslationPair&, const TranslationPair&) = default;
  friend auto operator<=>(const TranslationPair&, const TranslationPair&) = default;
};

enum class LexiconRole { Seed, Test };

/// Source word -> every gold target listed for it.
using GoldMap = std::map<std::string, std::set<std::string>>;

/// An ordered BLI dictionary. Entry order follows the file, which for XLING
/// data is frequency order.
class Lexicon {
 public:
  Lexicon(LanguagePair pair, LexiconRole role, std::vector<TranslationPair> entries = {});

  const LanguagePair& pair() const { return pair_; }
  LexiconRole role() const { return role_; }
  const std::vector<TranslationPair>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Distinct source words in order of first appearance.
  std::vector<std::string> sources() const;

 private:
  LanguagePair pair_;
  LexiconRole role_;
  std::vector<TranslationPair> entries_;
};

/// Parses XLING TSV: one "source<TAB>target" per line, blank lines ignored.
/// Throws MalformedRow / DuplicateRow with the 1-based line number.
Lexicon parse_lexicon(std::istream& in, const LanguagePair& pair, LexiconRole role);
Lexicon load_lexicon(const std::filesystem::path& path, const LanguagePair& pair,
                     LexiconRole role);

void write_lexicon(std::ostream& out, const Lexicon& lex);
void write_lexicon(const std::filesystem::path& path, const Lexicon& lex);

GoldMap gold_map(const Lexicon& lex);

/// True iff no (source, target) pair occurs in both lexicons.
bool check_disjoint(const Lexicon& seed, const Lexicon& test);

}  // namespace bli
