#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "bli/errors.hpp"
#include "bli/lexicon.hpp"
#include "support/toy_world.hpp"

using namespace bli;

namespace {

const LanguagePair kDeEn = LanguagePair::make("de", "en");

Lexicon parse(const std::string& text, LexiconRole role = LexiconRole::Test) {
  std::istringstream in(text);
  return parse_lexicon(in, kDeEn, role);
}

template <class E>
std::size_t line_of(const std::string& text) {
  try {
    parse(text);
  } catch (const E& e) {
    return e.line();
  }
  ADD_FAILURE() << "no exception";
  return 0;
}

}  // namespace

TEST(LanguagePair, FillsEnglishNames) {
  auto p = LanguagePair::make("de", "fr");
  EXPECT_EQ(p.src_name, "German");
  EXPECT_EQ(p.tgt_name, "French");
  EXPECT_EQ(p.tag(), "de-fr");
}

TEST(LanguagePair, RejectsSameLanguageAndUnknownCodes) {
  EXPECT_THROW(LanguagePair::make("de", "de"), UnsupportedLanguage);
  EXPECT_THROW(LanguagePair::make("de", "xx"), UnsupportedLanguage);
}

TEST(LanguagePair, CoversShippedLanguages) {
  for (const char* c : {"en", "de", "fr", "it", "ru", "hr", "fi", "tr", "bg", "ca", "hu"})
    EXPECT_TRUE(LanguageTable::defaults().contains(c)) << c;
}

TEST(LanguageTable, OverridesFromFile) {
  auto dir = toy::scratch_dir("langs");
  toy::write_text(dir / "langs.txt", "# extra\nsw = Swahili\nde = Deutsch\n");
  auto t = LanguageTable::defaults();
  t.load_overrides(dir / "langs.txt");
  EXPECT_EQ(t.name("sw"), "Swahili");
  EXPECT_EQ(t.name("de"), "Deutsch");
  toy::write_text(dir / "bad.txt", "sw Swahili\n");
  EXPECT_THROW(t.load_overrides(dir / "bad.txt"), ConfigError);
}

TEST(Lexicon, MultiGoldRowsShareSource) {
  auto lex = parse("hund\tdog\nhund\thound\n");
  ASSERT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.entries()[0].source, "hund");
  EXPECT_EQ(lex.entries()[1].source, "hund");
  EXPECT_EQ(lex.sources(), std::vector<std::string>{"hund"});
}

TEST(Lexicon, EmptyFileGivesEmptyLexicon) { EXPECT_TRUE(parse("").empty()); }

TEST(Lexicon, SpaceInsteadOfTabIsMalformed) { EXPECT_EQ(line_of<MalformedRow>("hund dog\n"), 1u); }

TEST(Lexicon, ReportsLineNumbers) {
  EXPECT_EQ(line_of<MalformedRow>("a\tx\n\nb\tc\td\n"), 3u);
  EXPECT_EQ(line_of<MalformedRow>("a\tx\nb\t\n"), 2u);
  EXPECT_EQ(line_of<MalformedRow>("a b\tx\n"), 1u);
  EXPECT_EQ(line_of<DuplicateRow>("a\tx\nb\ty\na\tx\n"), 3u);
}

TEST(Lexicon, TrimsFieldsAndCarriageReturns) {
  auto lex = parse(" hund \t dog\r\n");
  ASSERT_EQ(lex.size(), 1u);
  EXPECT_EQ(lex.entries()[0], (TranslationPair{"hund", "dog"}));
}

TEST(Lexicon, GoldMapGroupsTargets) {
  auto g = gold_map(parse("a\tx\na\ty\nb\tz\n"));
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g["a"], (std::set<std::string>{"x", "y"}));
  EXPECT_EQ(g["b"], (std::set<std::string>{"z"}));
}

TEST(Lexicon, GoldMapCountsMatchIndependentLineScan) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> src(0, 1499), tgt(0, 9);
  std::set<std::pair<int, int>> rows;
  while (rows.size() < 2000) rows.insert({src(rng), tgt(rng)});
  std::string text;
  for (auto [s, t] : rows) text += "w" + std::to_string(s) + "\tv" + std::to_string(t) + "\n";

  std::set<std::string> keys;
  std::size_t lines = 0;
  std::istringstream scan(text);
  for (std::string line; std::getline(scan, line); ++lines) keys.insert(line.substr(0, line.find('\t')));

  auto g = gold_map(parse(text));
  std::size_t total = 0;
  for (const auto& [k, v] : g) total += v.size();
  EXPECT_EQ(lines, 2000u);
  EXPECT_EQ(g.size(), keys.size());
  EXPECT_EQ(total, lines);
}

TEST(Lexicon, DisjointnessComparesPairs) {
  auto seed = parse("a\tx\n", LexiconRole::Seed);
  EXPECT_TRUE(check_disjoint(seed, parse("a\ty\n")));
  EXPECT_FALSE(check_disjoint(seed, parse("a\tx\n")));
  Lexicon other(LanguagePair::make("de", "fr"), LexiconRole::Test, {{"a", "y"}});
  EXPECT_THROW(check_disjoint(seed, other), PairMismatch);
}

TEST(Lexicon, RandomSplitIsDisjoint) {
  std::vector<TranslationPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({"s" + std::to_string(i), "t" + std::to_string(i % 37)});
  std::mt19937_64 rng(3);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  Lexicon seed(kDeEn, LexiconRole::Seed, {pairs.begin(), pairs.begin() + 80});
  Lexicon test(kDeEn, LexiconRole::Test, {pairs.begin() + 80, pairs.end()});
  EXPECT_TRUE(check_disjoint(seed, test));
}

TEST(Lexicon, WriteReproducesInput) {
  const std::string text = "hund\tdog\nhund\thound\nkatze\tcat\n";
  std::ostringstream out;
  write_lexicon(out, parse(text));
  EXPECT_EQ(out.str(), text);
}

TEST(Lexicon, LoadPreservesFileOrder) {
  auto dir = toy::scratch_dir("lexicon");
  toy::write_text(dir / "l.tsv", "c\tz\na\tx\nb\ty\n");
  auto lex = load_lexicon(dir / "l.tsv", kDeEn, LexiconRole::Seed);
  EXPECT_EQ(lex.sources(), (std::vector<std::string>{"c", "a", "b"}));
  EXPECT_THROW(load_lexicon(dir / "missing.tsv", kDeEn, LexiconRole::Seed), IoError);
}
