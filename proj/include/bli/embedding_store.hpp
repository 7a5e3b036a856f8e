#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bli/matrix.hpp"

namespace bli {

inline constexpr std::size_t kDefaultVocabTrim = 200000;

/// What load_vec saw while reading a .vec file.
struct VecLoadReport {
  std::size_t header_count = 0;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t duplicates_skipped = 0;
  bool trimmed = false;
};

class EmbeddingStore;
EmbeddingStore load_vec(const std::filesystem::path& path, std::size_t trim, bool normalize,
                        VecLoadReport* report);

/// Vocabulary plus dense vectors, in frequency order: row index is the
/// frequency rank. Immutable once built.
class EmbeddingStore {
 public:
  struct Entry {
    std::size_t index;
    std::span<const float> vector;
  };

  EmbeddingStore() = default;

  /// Builds a store from in-memory rows. Later duplicates of a token are
  /// dropped; zero rows are rejected when `normalize` is set.
  static EmbeddingStore from_rows(std::vector<std::string> tokens, DenseMatrix matrix,
                                  bool normalize, VecLoadReport* report = nullptr);

  std::size_t size() const { return tokens_.size(); }
  std::size_t dim() const { return matrix_.cols(); }
  bool normalized() const { return normalized_; }

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::span<const float> row(std::size_t i) const { return matrix_.row(i); }
  MatrixView matrix() const { return matrix_.view(); }

  /// Exact match on the stored token.
  std::optional<Entry> lookup(std::string_view token) const;
  std::optional<std::size_t> frequency_rank(std::string_view token) const;
  bool contains(std::string_view token) const { return frequency_rank(token).has_value(); }

 private:
  friend EmbeddingStore load_vec(const std::filesystem::path&, std::size_t, bool, VecLoadReport*);

  // Takes rows that are already unique and, if flagged, unit length.
  static EmbeddingStore assemble(std::vector<std::string> tokens, DenseMatrix matrix, bool normalized);

  std::vector<std::string> tokens_;
  DenseMatrix matrix_;
  bool normalized_ = false;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads a fastText .vec file ("count dim" header, then "token v1 ... vdim").
/// Keeps at most `trim` distinct tokens in file order. Files ending in .gz are
/// decompressed on the fly.
EmbeddingStore load_vec(const std::filesystem::path& path, std::size_t trim = kDefaultVocabTrim,
                        bool normalize = true, VecLoadReport* report = nullptr);

/// Writes the store back in .vec text format.
void write_vec(std::ostream& out, const EmbeddingStore& store);
void write_vec(const std::filesystem::path& path, const EmbeddingStore& store);

}  // namespace bli
