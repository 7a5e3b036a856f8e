#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bli/embedding_store.hpp"
#include "bli/lexicon.hpp"
#include "bli/retrieval.hpp"

namespace bli {

enum class MappingMethod : std::uint32_t { Procrustes = 1 };

/// Linear map y = W x between two embedding spaces. W is dim x dim, row-major.
struct MappingMatrix {
  std::size_t dim = 0;
  std::vector<double> w;
  MappingMethod method = MappingMethod::Procrustes;

  double at(std::size_t r, std::size_t c) const { return w[r * dim + c]; }
  std::vector<float> apply(std::span<const float> x) const;
  /// max |(W^T W - I)_ij|.
  double orthogonality_residual() const;
};

struct FitReport {
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;  // a side had no embedding
  double min_singular = 0.0;
  double max_singular = 0.0;
  /// Cross-covariance close to singular: the map is not unique.
  bool rank_deficient = false;
};

/// Orthogonal Procrustes: W = U V^T from the SVD of Y^T X, where X and Y hold
/// the unit-normalized source and target vectors of every seed pair with both
/// words embedded. Throws InsufficientPairs with fewer than dim such pairs.
MappingMatrix fit_procrustes(const EmbeddingStore& src, const EmbeddingStore& tgt, const Lexicon& seed,
                             FitReport* report = nullptr);

/// Binary file: "BLIMAP01", u32 dim, u32 method, u64 FNV-1a of the payload,
/// then dim*dim little-endian doubles. load_mapping throws SchemaMismatch.
void save_mapping(const std::filesystem::path& path, const MappingMatrix& m);
MappingMatrix load_mapping(const std::filesystem::path& path);

/// Applies W to every row; the result is unit-normalized.
EmbeddingStore map_store(const EmbeddingStore& src, const MappingMatrix& m);

enum class RetrievalMethod { Cosine, Csls };
std::string_view to_string(RetrievalMethod m);
RetrievalMethod parse_retrieval_method(std::string_view s);

struct Translation {
  std::string word;
  double score = 0.0;
};

/// Mapped-space translator. Builds the mapped source space (and the CSLS
/// density table when needed) once.
class Translator {
 public:
  Translator(const EmbeddingStore& src, const EmbeddingStore& tgt, const MappingMatrix& m,
             RetrievalMethod method, std::size_t k_csls = retrieval::kDefaultCslsK);

  /// Ranked target words for `query`. Throws QueryNotInEmbeddings.
  std::vector<Translation> translate(std::string_view query, std::size_t k) const;
  std::vector<std::vector<Translation>> translate_all(std::span<const std::string> queries,
                                                      std::size_t k) const;

 private:
  const EmbeddingStore* tgt_;
  RetrievalMethod method_;
  EmbeddingStore mapped_;
  std::optional<retrieval::CslsIndex> csls_;
};

}  // namespace bli
