#include <gtest/gtest.h>
#include <zlib.h>

#include <cmath>
#include <sstream>

#include "bli/embedding_store.hpp"
#include "bli/errors.hpp"
#include "support/toy_world.hpp"

using namespace bli;
namespace fs = std::filesystem;

namespace {

fs::path vec_file(const std::string& name, const std::string& content) {
  static const auto dir = toy::scratch_dir("vec");
  auto p = dir / name;
  toy::write_text(p, content);
  return p;
}

template <class E>
std::size_t error_line(const std::string& content) {
  try {
    load_vec(vec_file("err.vec", content));
  } catch (const E& e) {
    return e.line();
  }
  ADD_FAILURE() << "no exception";
  return 0;
}

std::string ten_rows() {
  std::string s = "10 2\n";
  for (int i = 0; i < 10; ++i) s += "w" + std::to_string(i) + " " + std::to_string(i + 1) + " 1\n";
  return s;
}

}  // namespace

TEST(LoadVec, ReadsHeaderAndRows) {
  auto s = load_vec(vec_file("a.vec", "3 4\na 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0\n"));
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.dim(), 4u);
  EXPECT_TRUE(s.normalized());
}

TEST(LoadVec, TrimKeepsPrefix) {
  auto full = load_vec(vec_file("ten.vec", ten_rows()));
  VecLoadReport rep;
  auto five = load_vec(vec_file("ten.vec", ten_rows()), 5, true, &rep);
  ASSERT_EQ(five.size(), 5u);
  EXPECT_TRUE(rep.trimmed);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(five.token(i), full.token(i));
    EXPECT_EQ(std::vector<float>(five.row(i).begin(), five.row(i).end()),
              std::vector<float>(full.row(i).begin(), full.row(i).end()));
  }
}

TEST(LoadVec, NormalizesRows) {
  auto s = load_vec(vec_file("n.vec", "1 2\nx 3 4\n"));
  EXPECT_FLOAT_EQ(s.row(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(s.row(0)[1], 0.8f);
  auto raw = load_vec(vec_file("n.vec", "1 2\nx 3 4\n"), kDefaultVocabTrim, false);
  EXPECT_FALSE(raw.normalized());
  EXPECT_FLOAT_EQ(raw.row(0)[0], 3.0f);
}

TEST(LoadVec, DuplicateKeepsFirstOccurrence) {
  VecLoadReport rep;
  auto s = load_vec(vec_file("d.vec", "3 2\na 1 0\nb 0 1\na 1 1\n"), kDefaultVocabTrim, true, &rep);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(rep.duplicates_skipped, 1u);
  auto e = s.lookup("a");
  ASSERT_TRUE(e);
  EXPECT_EQ(e->index, 0u);
  EXPECT_FLOAT_EQ(e->vector[0], 1.0f);
  EXPECT_FLOAT_EQ(e->vector[1], 0.0f);
}

TEST(LoadVec, Errors) {
  EXPECT_THROW(load_vec(vec_file("h.vec", "")), BadHeader);
  EXPECT_THROW(load_vec(vec_file("h.vec", "three 4\n")), BadHeader);
  EXPECT_THROW(load_vec(vec_file("h.vec", "3\n")), BadHeader);
  EXPECT_EQ(error_line<DimMismatch>("2 3\na 1 2 3\nb 1 2\n"), 3u);
  EXPECT_EQ(error_line<DimMismatch>("2 3\na 1 2 3 4\n"), 2u);
  EXPECT_EQ(error_line<NonFiniteValue>("2 2\na 1 2\nb nan 1\n"), 3u);
  EXPECT_EQ(error_line<NonFiniteValue>("1 2\na 1e999 1\n"), 2u);
  EXPECT_EQ(error_line<ZeroVector>("2 2\na 1 2\nb 0 0\n"), 3u);
  EXPECT_THROW(load_vec(vec_file("missing-dir/none.vec", "")), IoError);
}

TEST(LoadVec, ZeroRowAllowedWithoutNormalization) {
  auto s = load_vec(vec_file("z.vec", "1 2\nb 0 0\n"), kDefaultVocabTrim, false);
  EXPECT_EQ(s.size(), 1u);
}

TEST(LoadVec, ReadsGzip) {
  auto dir = toy::scratch_dir("vecgz");
  const std::string content = "2 2\nhund 1 0\nkatze 0 2\n";
  auto p = dir / "e.vec.gz";
  gzFile f = gzopen(p.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, content.data(), static_cast<unsigned>(content.size()));
  gzclose(f);
  auto s = load_vec(p);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.frequency_rank("katze"), 1u);
  EXPECT_FLOAT_EQ(s.row(1)[1], 1.0f);
}

TEST(LoadVec, WriteThenLoadRoundTrips) {
  auto s = toy::random_store(50, 7, 11, false);
  std::ostringstream out;
  write_vec(out, s);
  auto back = load_vec(vec_file("rt.vec", out.str()), kDefaultVocabTrim, false);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.token(i), s.token(i));
    for (std::size_t j = 0; j < s.dim(); ++j) EXPECT_EQ(back.row(i)[j], s.row(i)[j]);
  }
}

TEST(EmbeddingStore, LookupAndRank) {
  auto s = toy::random_store(20, 4, 5);
  auto e = s.lookup("w0007");
  ASSERT_TRUE(e);
  EXPECT_EQ(e->index, 7u);
  EXPECT_EQ(e->vector.data(), s.row(7).data());
  EXPECT_FALSE(s.lookup("nope"));
  EXPECT_EQ(s.frequency_rank("w0000"), 0u);
  EXPECT_FALSE(s.frequency_rank("nope"));
  EXPECT_LT(*s.frequency_rank("w0003"), *s.frequency_rank("w0009"));
}

TEST(EmbeddingStore, InvariantsOnRandomStores) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = toy::random_store(100, 16, seed);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto e = s.lookup(s.token(i));
      ASSERT_TRUE(e);
      EXPECT_EQ(e->index, i);
      double sq = 0;
      for (float v : s.row(i)) sq += double(v) * v;
      EXPECT_NEAR(sq, 1.0, 1e-6);
    }
  }
}

TEST(EmbeddingStore, FromRowsRejectsBadInput) {
  EXPECT_THROW(EmbeddingStore::from_rows({"a"}, DenseMatrix(1, 2, {NAN, 1.0f}), true), NonFiniteValue);
  EXPECT_THROW(EmbeddingStore::from_rows({"a", "b"}, DenseMatrix(2, 2, {1, 0, 0, 0}), true), ZeroVector);
  EXPECT_THROW(EmbeddingStore::from_rows({"a"}, DenseMatrix(2, 2), false), DimMismatch);
}
