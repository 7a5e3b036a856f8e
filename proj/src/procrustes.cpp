#include "bli/procrustes.hpp"

#include <Eigen/SVD>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

namespace {

std::optional<std::span<const float>> vector_of(const EmbeddingStore& store, const std::string& word) {
  if (auto e = store.lookup(word)) return e->vector;
  if (auto e = store.lookup(text::to_lower(word))) return e->vector;
  return std::nullopt;
}

// Copies a float row into a double row of unit length; false for zero rows.
bool unit_row(std::span<const float> v, double* out) {
  double ss = 0.0;
  for (float x : v) ss += double(x) * double(x);
  if (ss == 0.0) return false;
  const double inv = 1.0 / std::sqrt(ss);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = double(v[i]) * inv;
  return true;
}

constexpr char kMagic[8] = {'B', 'L', 'I', 'M', 'A', 'P', '0', '1'};

std::uint64_t payload_checksum(const std::vector<double>& w) {
  return text::fnv1a64({reinterpret_cast<const char*>(w.data()), w.size() * sizeof(double)});
}

}  // namespace

std::vector<float> MappingMatrix::apply(std::span<const float> x) const {
  if (x.size() != dim)
    throw DimMismatch("vector dim " + std::to_string(x.size()) + " != mapping dim " + std::to_string(dim));
  std::vector<float> y(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < dim; ++c) acc += at(r, c) * double(x[c]);
    y[r] = static_cast<float>(acc);
  }
  return y;
}

double MappingMatrix::orthogonality_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < dim; ++r) acc += at(r, i) * at(r, j);
      worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

MappingMatrix fit_procrustes(const EmbeddingStore& src, const EmbeddingStore& tgt, const Lexicon& seed,
                             FitReport* report) {
  if (src.dim() != tgt.dim())
    throw DimMismatch("source dim " + std::to_string(src.dim()) + " != target dim " + std::to_string(tgt.dim()));
  const std::size_t d = src.dim();

  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat x(seed.size(), d), y(seed.size(), d);
  FitReport rep;
  for (const auto& e : seed.entries()) {
    auto xs = vector_of(src, e.source);
    auto yt = vector_of(tgt, e.target);
    if (!xs || !yt || !unit_row(*xs, x.row(Eigen::Index(rep.pairs_used)).data()) ||
        !unit_row(*yt, y.row(Eigen::Index(rep.pairs_used)).data())) {
      ++rep.pairs_skipped;
      continue;
    }
    ++rep.pairs_used;
  }
  if (rep.pairs_used < d || d == 0)
    throw InsufficientPairs(std::to_string(rep.pairs_used) + " usable seed pairs, need at least " +
                            std::to_string(d));

  const auto n = Eigen::Index(rep.pairs_used);
  Eigen::MatrixXd m = y.topRows(n).transpose() * x.topRows(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  rep.max_singular = s.maxCoeff();
  rep.min_singular = s.minCoeff();
  rep.rank_deficient = rep.min_singular <= 1e-10 * std::max(1.0, rep.max_singular);
  Eigen::MatrixXd w = svd.matrixU() * svd.matrixV().transpose();

  MappingMatrix out;
  out.dim = d;
  out.w.resize(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out.w[r * d + c] = w(Eigen::Index(r), Eigen::Index(c));
  if (report) *report = rep;
  return out;
}

void save_mapping(const std::filesystem::path& path, const MappingMatrix& m) {
  static_assert(std::endian::native == std::endian::little, "mapping files are little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const auto dim = static_cast<std::uint32_t>(m.dim);
  const auto method = static_cast<std::uint32_t>(m.method);
  const std::uint64_t sum = payload_checksum(m.w);
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&method), sizeof method);
  out.write(reinterpret_cast<const char*>(&sum), sizeof sum);
  out.write(reinterpret_cast<const char*>(m.w.data()), std::streamsize(m.w.size() * sizeof(double)));
  if (!out) throw IoError("short write to " + path.string());
}

MappingMatrix load_mapping(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[8];
  std::uint32_t dim = 0, method = 0;
  std::uint64_t sum = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&method), sizeof method);
  in.read(reinterpret_cast<char*>(&sum), sizeof sum);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw SchemaMismatch(path.string() + " is not a mapping file");
  if (method != static_cast<std::uint32_t>(MappingMethod::Procrustes))
    throw SchemaMismatch("unknown mapping method " + std::to_string(method));
  MappingMatrix m;
  m.dim = dim;
  m.w.resize(std::size_t(dim) * dim);
  in.read(reinterpret_cast<char*>(m.w.data()), std::streamsize(m.w.size() * sizeof(double)));
  if (!in) throw SchemaMismatch(path.string() + ": truncated payload");
  if (in.peek() != std::char_traits<char>::eof()) throw SchemaMismatch(path.string() + ": trailing bytes");
  if (payload_checksum(m.w) != sum) throw SchemaMismatch(path.string() + ": checksum mismatch");
  return m;
}

EmbeddingStore map_store(const EmbeddingStore& src, const MappingMatrix& m) {
  if (src.dim() != m.dim)
    throw DimMismatch("store dim " + std::to_string(src.dim()) + " != mapping dim " + std::to_string(m.dim));
  DenseMatrix mapped(src.size(), m.dim);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto y = m.apply(src.row(i));
    std::copy(y.begin(), y.end(), mapped.row(i).begin());
  }
  return EmbeddingStore::from_rows(src.tokens(), std::move(mapped), /*normalize=*/true);
}

std::string_view to_string(RetrievalMethod m) { return m == RetrievalMethod::Csls ? "csls" : "cosine"; }

RetrievalMethod parse_retrieval_method(std::string_view s) {
  if (s == "cosine" || s == "nn") return RetrievalMethod::Cosine;
  if (s == "csls") return RetrievalMethod::Csls;
  throw ConfigError("unknown retrieval method '" + std::string(s) + "' (cosine|csls)");
}

Translator::Translator(const EmbeddingStore& src, const EmbeddingStore& tgt, const MappingMatrix& m,
                       RetrievalMethod method, std::size_t k_csls)
    : tgt_(&tgt), method_(method), mapped_(map_store(src, m)) {
  if (tgt.dim() != m.dim)
    throw DimMismatch("target dim " + std::to_string(tgt.dim()) + " != mapping dim " + std::to_string(m.dim));
  if (method_ == RetrievalMethod::Csls) csls_.emplace(tgt, mapped_, k_csls);
}

std::vector<Translation> Translator::translate(std::string_view query, std::size_t k) const {
  auto e = mapped_.lookup(query);
  if (!e) e = mapped_.lookup(text::to_lower(query));
  if (!e) throw QueryNotInEmbeddings("'" + std::string(query) + "' has no source embedding");
  auto hits = method_ == RetrievalMethod::Csls ? csls_->top_k(e->vector, k)
                                               : retrieval::top_k_cosine(*tgt_, e->vector, k);
  std::vector<Translation> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back({tgt_->token(h.index), h.score});
  return out;
}

std::vector<std::vector<Translation>> Translator::translate_all(std::span<const std::string> queries,
                                                                std::size_t k) const {
  std::vector<std::vector<Translation>> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(translate(q, k));
  return out;
}

}  // namespace bli
