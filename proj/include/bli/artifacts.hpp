#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bli/generation.hpp"
#include "bli/prompt.hpp"

namespace bli {

// Run directory layout.
inline constexpr const char* kPromptsFile = "prompts.jsonl";
inline constexpr const char* kBeamsFile = "beams.jsonl";
inline constexpr const char* kPredictionsTsv = "predictions.tsv";
inline constexpr const char* kPredictionsJsonl = "predictions.jsonl";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportTable = "report.txt";
inline constexpr const char* kManifestFile = "manifest.json";

/// One JSON object per line:
/// {id, template_id, src, tgt, query, examples: [{source, target, source_rank}],
///  rendered, mask_token, provenance, requested_shots}
void write_prompts_jsonl(std::ostream& out, std::span<const PromptInstance> prompts);
/// Language names are looked up in `table`. Throws SchemaMismatch.
std::vector<PromptInstance> read_prompts_jsonl(std::istream& in,
                                               const LanguageTable& table = LanguageTable::defaults());

/// {id, query, sequences: [{text, score}]} per line, aligned with prompts.
void write_beams_jsonl(std::ostream& out, std::span<const PromptInstance> prompts,
                       std::span<const BeamResult> beams);
std::vector<BeamResult> read_beams_jsonl(std::istream& in);

struct Manifest {
  bool complete = false;
  std::optional<std::string> error;
  /// Last stage reached: config, prompts, generation, extraction, evaluation, done.
  std::string stage;
  std::vector<std::string> files;
  std::string backend;
  int template_id = 0;
  std::string pair;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Opens a file for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace bli
