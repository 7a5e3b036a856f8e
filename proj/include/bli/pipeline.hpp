#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bli/config.hpp"
#include "bli/embedding_store.hpp"
#include "bli/evaluation.hpp"
#include "bli/extraction.hpp"
#include "bli/generation.hpp"
#include "bli/lexicon.hpp"
#include "bli/procrustes.hpp"

namespace bli {

/// Inputs of a run, loaded once.
struct RunData {
  LanguagePair pair;
  EmbeddingStore src;  // also the auxiliary space for example retrieval
  EmbeddingStore tgt;
  std::optional<Lexicon> seed;
  Lexicon test;
};

/// Checks files, then loads stores and lexicons. Throws on the first problem.
RunData load_run_data(const RunConfig& cfg);

/// Backend named by cfg.backend; the oracle mocks answer from `gold`.
std::unique_ptr<Backend> make_backend(const RunConfig& cfg, const GoldMap& gold);

/// One prompt per distinct test source, in lexicon order.
std::vector<PromptInstance> build_prompts(const RunConfig& cfg, const RunData& data, const Template& t);

struct RunResult {
  std::vector<PromptInstance> prompts;
  std::vector<BeamResult> beams;
  std::vector<Prediction> predictions;
  EvalReport report;
};

/// Full run: prompts, generation, extraction, scoring. Everything is
/// validated before the backend is called. With `write_artifacts`, the run
/// directory receives prompts.jsonl, beams.jsonl, predictions.tsv,
/// predictions.jsonl, report.json, report.txt and manifest.json; a failing
/// run still leaves a manifest with complete=false.
RunResult run_pipeline(const RunConfig& cfg, const RunData& data, Backend& backend, bool write_artifacts = true);
RunResult run_pipeline(const RunConfig& cfg);

struct SweepRow {
  std::size_t n = 0;
  double p_at_1 = 0.0;
  double p_at_5 = 0.0;
};

/// One run per shot count; n = 0 switches to zero-shot. Each run writes its
/// artifacts under output_dir/shots_<n>, and the table goes to
/// output_dir/sweep.csv. Throws ConfigError on an empty list.
std::vector<SweepRow> sweep_shots(const RunConfig& cfg, const RunData& data, std::span<const std::size_t> n_values,
                                  Backend* backend = nullptr);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Writes one JSONL record {prompt, completion, query, examples} per seed
/// pair, with the query never among its own examples. Returns the count.
std::size_t export_finetune_data(const Lexicon& seed, const EmbeddingStore& aux_store, const EmbeddingStore& tgt_store,
                                 const Template& t, const PromptConfig& cfg, std::ostream& out);
std::size_t export_finetune_data(const Lexicon& seed, const EmbeddingStore& aux_store, const EmbeddingStore& tgt_store,
                                 const Template& t, const PromptConfig& cfg, const std::filesystem::path& out);

/// Pooled chi-square between two sets of saved reports.
ChiSquareResult significance(std::span<const std::filesystem::path> reports_a,
                             std::span<const std::filesystem::path> reports_b);
ChiSquareResult significance(const std::filesystem::path& report_a, const std::filesystem::path& report_b);

/// Baseline predictions for `queries`: the top-k translations become the
/// ranked candidates. Queries without a source embedding get no prediction.
std::vector<Prediction> baseline_predictions(const Translator& translator, std::span<const std::string> queries,
                                             std::size_t k);

}  // namespace bli
