#include "bli/lexicon.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

Lexicon::Lexicon(LanguagePair pair, LexiconRole role, std::vector<TranslationPair> entries)
    : pair_(std::move(pair)), role_(role), entries_(std::move(entries)) {}

std::vector<std::string> Lexicon::sources() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_)
    if (seen.insert(e.source).second) out.push_back(e.source);
  return out;
}

Lexicon parse_lexicon(std::istream& in, const LanguagePair& pair, LexiconRole role) {
  std::vector<TranslationPair> entries;
  std::set<TranslationPair> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;

    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw MalformedRow(line_no, "expected exactly one tab");
    auto src = text::trim(std::string_view(line).substr(0, tab));
    auto tgt = text::trim(std::string_view(line).substr(tab + 1));
    if (src.empty() || tgt.empty()) throw MalformedRow(line_no, "empty field");
    if (text::has_whitespace(src) || text::has_whitespace(tgt))
      throw MalformedRow(line_no, "whitespace inside a word");

    TranslationPair p{std::string(src), std::string(tgt)};
    if (!seen.insert(p).second) throw DuplicateRow(line_no);
    entries.push_back(std::move(p));
  }
  return Lexicon(pair, role, std::move(entries));
}

Lexicon load_lexicon(const std::filesystem::path& path, const LanguagePair& pair,
                     LexiconRole role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open lexicon " + path.string());
  return parse_lexicon(in, pair, role);
}

void write_lexicon(std::ostream& out, const Lexicon& lex) {
  for (const auto& e : lex.entries()) out << e.source << '\t' << e.target << '\n';
}

void write_lexicon(const std::filesystem::path& path, const Lexicon& lex) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write lexicon " + path.string());
  write_lexicon(out, lex);
}

GoldMap gold_map(const Lexicon& lex) {
  GoldMap gold;
  for (const auto& e : lex.entries()) gold[e.source].insert(e.target);
  return gold;
}

bool check_disjoint(const Lexicon& seed, const Lexicon& test) {
  if (!(seed.pair() == test.pair()))
    throw PairMismatch("lexicons are for " + seed.pair().tag() + " and " + test.pair().tag());
  std::set<TranslationPair> seed_pairs(seed.entries().begin(), seed.entries().end());
  for (const auto& e : test.entries())
    if (seed_pairs.count(e)) return false;
  return true;
}

}  // namespace bli
