#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bli/extraction.hpp"
#include "bli/lexicon.hpp"

namespace bli {

struct EvalConfig {
  std::vector<std::size_t> ks = {1, 5};

  /// Throws ConfigError unless ks is non-empty, strictly ascending and >= 1.
  void validate() const;
};

struct ItemResult {
  std::string query;
  std::optional<std::string> predicted;
  /// 1-based position of the first gold hit in the ranked candidates.
  std::optional<std::size_t> gold_rank;

  friend bool operator==(const ItemResult&, const ItemResult&) = default;
};

struct EvalReport {
  /// Free-form tag, usually the direction ("de-fr").
  std::string label;
  std::size_t n_items = 0;
  std::map<std::size_t, double> p_at_k;
  double mrr = 0.0;
  /// Correct at K=1, one flag per item in input order.
  std::vector<bool> correctness;
  std::vector<ItemResult> per_item;

  std::size_t correct_at_1() const;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Scores predictions against gold. An item is correct at K when one of its
/// first K ranked candidates matches any gold translation (case-insensitive).
/// The ranked list is the prediction followed by the remaining candidates, so
/// K=1 judges the prediction itself. Missing predictions count as wrong.
/// Throws UnknownQuery when a query has no gold entry.
EvalReport score(std::span<const Prediction> predictions, const GoldMap& gold,
                 const EvalConfig& cfg = {}, std::string label = {});

std::string report_to_json(const EvalReport& r);
/// Throws SchemaMismatch on anything but a well-formed, self-consistent report.
EvalReport report_from_json(std::string_view json);
void save_report(const std::filesystem::path& path, const EvalReport& r);
EvalReport load_report(const std::filesystem::path& path);

/// Aligned table with P@K and MRR as percentages (x100, two decimals).
void write_report_table(std::ostream& out, std::span<const EvalReport> reports);

struct ChiSquareResult {
  double chi2 = 0.0;
  double p = 1.0;
  /// A marginal of the table was zero; chi2 is reported as 0 and p as 1.
  bool degenerate = false;
};

/// Pearson chi-square (1 dof, no continuity correction) on
/// [[correct_a, total_a - correct_a], [correct_b, total_b - correct_b]].
/// Throws std::invalid_argument on empty totals or corrects above totals.
ChiSquareResult chi_square_compare(std::size_t correct_a, std::size_t total_a,
                                   std::size_t correct_b, std::size_t total_b);

/// Compares two systems on counts summed over all their reports.
ChiSquareResult chi_square_pooled(std::span<const EvalReport> a, std::span<const EvalReport> b);

/// One test per report pair; a and b must have equal length.
std::vector<ChiSquareResult> chi_square_per_direction(std::span<const EvalReport> a,
                                                      std::span<const EvalReport> b);

/// "highly significant" (p < 1e-3), "significant" (p < 0.05) or
/// "not significant".
std::string_view significance_label(double p);

}  // namespace bli
