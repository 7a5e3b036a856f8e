#include "bli/embedding_store.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

namespace {

// Line reader over zlib; gzread is transparent for uncompressed input, so
// plain .vec files take the same path.
class GzLineReader {
 public:
  explicit GzLineReader(const std::filesystem::path& path)
      : file_(gzopen(path.c_str(), "rb"), &gzclose) {
    if (!file_) throw IoError("cannot open embeddings " + path.string());
    gzbuffer(file_.get(), 1 << 18);
  }

  bool next(std::string& line) {
    line.clear();
    char buf[8192];
    while (true) {
      if (gzgets(file_.get(), buf, sizeof(buf)) == nullptr) {
        int err = 0;
        gzerror(file_.get(), &err);
        if (err != Z_OK && err != Z_STREAM_END) throw IoError("gzip read error");
        return !line.empty();
      }
      line.append(buf);
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  std::unique_ptr<gzFile_s, int (*)(gzFile)> file_;
};

bool parse_size(std::string_view s, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Scales row to unit length in double precision. Returns false for zero rows.
bool normalize_row(std::span<float> row) {
  double sq = 0.0;
  for (float v : row) sq += static_cast<double>(v) * v;
  if (sq == 0.0) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (float& v : row) v = static_cast<float>(v * inv);
  return true;
}

}  // namespace

EmbeddingStore EmbeddingStore::assemble(std::vector<std::string> tokens, DenseMatrix matrix,
                                        bool normalized) {
  EmbeddingStore store;
  store.normalized_ = normalized;
  store.index_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) store.index_.emplace(tokens[i], i);
  store.tokens_ = std::move(tokens);
  store.matrix_ = std::move(matrix);
  return store;
}

EmbeddingStore EmbeddingStore::from_rows(std::vector<std::string> tokens, DenseMatrix matrix,
                                         bool normalize, VecLoadReport* report) {
  if (tokens.size() != matrix.rows())
    throw DimMismatch("token count " + std::to_string(tokens.size()) + " != matrix rows " +
                      std::to_string(matrix.rows()));
  const std::size_t dim = matrix.cols();
  std::vector<std::string> kept_tokens;
  std::vector<float> kept;
  kept.reserve(matrix.values().size());
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t duplicates = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!seen.emplace(tokens[i], kept_tokens.size()).second) {
      ++duplicates;
      continue;
    }
    auto row = matrix.row(i);
    for (float v : row)
      if (!std::isfinite(v)) throw NonFiniteValue(i + 1);
    if (normalize && !normalize_row(row)) throw ZeroVector(i + 1);
    kept_tokens.push_back(std::move(tokens[i]));
    kept.insert(kept.end(), row.begin(), row.end());
  }
  if (report) {
    report->header_count = tokens.size();
    report->rows_read = tokens.size();
    report->rows_kept = kept_tokens.size();
    report->duplicates_skipped = duplicates;
  }
  const std::size_t rows = kept_tokens.size();
  return assemble(std::move(kept_tokens), DenseMatrix(rows, dim, std::move(kept)), normalize);
}

std::optional<EmbeddingStore::Entry> EmbeddingStore::lookup(std::string_view token) const {
  auto rank = frequency_rank(token);
  if (!rank) return std::nullopt;
  return Entry{*rank, row(*rank)};
}

std::optional<std::size_t> EmbeddingStore::frequency_rank(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingStore load_vec(const std::filesystem::path& path, std::size_t trim, bool normalize,
                        VecLoadReport* report) {
  GzLineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw BadHeader(path.string() + ": empty file");

  auto header = text::split_ws(line);
  std::size_t count = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_size(header[0], count) || !parse_size(header[1], dim) || dim == 0)
    throw BadHeader(path.string() + ": expected '<count> <dim>', got '" + line + "'");

  VecLoadReport local;
  local.header_count = count;
  std::vector<std::string> tokens;
  std::vector<float> values;
  const std::size_t reserve_rows = std::min(count, trim);
  tokens.reserve(reserve_rows);
  values.reserve(reserve_rows * dim);
  std::unordered_map<std::string, std::size_t> seen;
  seen.reserve(reserve_rows);

  std::size_t line_no = 1;
  while (tokens.size() < trim && local.rows_read < count && reader.next(line)) {
    ++line_no;
    ++local.rows_read;
    std::string_view rest(line);
    // Tokens are space-delimited; a tab inside one is a format violation.
    std::size_t sp = rest.find(' ');
    std::string_view token = rest.substr(0, sp);
    if (token.empty()) throw BadToken(line_no, "empty token");
    if (token.find('\t') != std::string_view::npos) throw BadToken(line_no, "tab in token");

    const std::size_t row_start = values.size();
    std::size_t fields = 0;
    std::size_t pos = sp == std::string_view::npos ? rest.size() : sp;
    while (pos < rest.size()) {
      while (pos < rest.size() && (rest[pos] == ' ' || rest[pos] == '\t')) ++pos;
      if (pos >= rest.size()) break;
      std::size_t end = pos;
      while (end < rest.size() && rest[end] != ' ' && rest[end] != '\t') ++end;
      if (fields == dim) {
        values.resize(row_start);
        throw DimMismatch(line_no, "more than " + std::to_string(dim) + " values");
      }
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(rest.data() + pos, rest.data() + end, v);
      if (ec == std::errc::result_out_of_range) throw NonFiniteValue(line_no);
      if (ec != std::errc() || ptr != rest.data() + end)
        throw DimMismatch(line_no, "unparsable value '" + std::string(rest.substr(pos, end - pos)) + "'");
      if (!std::isfinite(v)) throw NonFiniteValue(line_no);
      values.push_back(v);
      ++fields;
      pos = end;
    }
    if (fields != dim)
      throw DimMismatch(line_no, "expected " + std::to_string(dim) + " values, got " +
                                     std::to_string(fields));

    std::string tok(token);
    if (seen.count(tok)) {
      values.resize(row_start);
      ++local.duplicates_skipped;
      continue;
    }
    if (normalize && !normalize_row(std::span<float>(values.data() + row_start, dim)))
      throw ZeroVector(line_no);
    seen.emplace(tok, tokens.size());
    tokens.push_back(std::move(tok));
  }
  local.trimmed = tokens.size() == trim && local.rows_read < count;
  local.rows_kept = tokens.size();

  const std::size_t rows = tokens.size();
  auto store = EmbeddingStore::assemble(std::move(tokens), DenseMatrix(rows, dim, std::move(values)),
                                        normalize);
  if (report) *report = local;
  return store;
}

void write_vec(std::ostream& out, const EmbeddingStore& store) {
  out << store.size() << ' ' << store.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.token(i);
    for (float v : store.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, ptr - buf);
    }
    out << '\n';
  }
}

void write_vec(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embeddings " + path.string());
  write_vec(out, store);
}

}  // namespace bli
