#include "bli/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <json.hpp>

#include "bli/artifacts.hpp"
#include "bli/errors.hpp"
#include "bli/selection.hpp"
#include "bli/text.hpp"

namespace bli {

namespace fs = std::filesystem;

RunData load_run_data(const RunConfig& cfg) {
  cfg.check_files();
  const auto table = cfg.language_table();
  auto pair = LanguagePair::make(cfg.src, cfg.tgt, table);
  std::optional<Lexicon> seed;
  if (cfg.seed_lexicon) seed = load_lexicon(*cfg.seed_lexicon, pair, LexiconRole::Seed);
  Lexicon test = load_lexicon(cfg.test_lexicon, pair, LexiconRole::Test);
  return RunData{pair, load_vec(cfg.src_embeddings, cfg.trim), load_vec(cfg.tgt_embeddings, cfg.trim),
                 std::move(seed), std::move(test)};
}

std::unique_ptr<Backend> make_backend(const RunConfig& cfg, const GoldMap& gold) {
  const auto& b = cfg.backend;
  if (b == "mock-oracle") return make_oracle_backend(gold);
  if (text::starts_with(b, "mock-oracle:")) {
    const std::string n = b.substr(std::string("mock-oracle:").size());
    std::size_t rank = 0;
    try {
      rank = std::stoul(n);
    } catch (const std::exception&) {
      throw ConfigError("bad oracle noise rank '" + n + "'");
    }
    return make_oracle_backend(gold, rank);
  }
  if (b == "mock-junk")
    return make_function_backend("mock-junk", [](const PromptInstance&) { return std::vector<std::string>{}; });
  if (b == "mock-echo") return make_echo_backend();
  if (b == "http") return std::make_unique<HttpBackend>(cfg.http);
  throw ConfigError("unknown backend '" + b + "'");
}

std::vector<PromptInstance> build_prompts(const RunConfig& cfg, const RunData& data, const Template& t) {
  cfg.prompt.validate(t);
  const auto queries = data.test.sources();
  std::vector<Selection> selections(queries.size());
  if (cfg.prompt.n_shots > 0) {
    if (!data.seed) throw ConfigError("few-shot runs need a seed lexicon");
    ExampleSelector selector(*data.seed, data.src, &data.tgt);
    selections = selector.select_batch(queries, cfg.prompt, /*exclude_self=*/false);
  }
  std::vector<PromptInstance> prompts;
  prompts.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto p = render(t, data.pair, queries[i], std::move(selections[i].examples), cfg.prompt);
    p.id = i;
    p.provenance = selections[i].provenance;
    p.requested_shots = cfg.prompt.n_shots;
    prompts.push_back(std::move(p));
  }
  return prompts;
}

RunResult run_pipeline(const RunConfig& cfg, const RunData& data, Backend& backend, bool write_artifacts) {
  Manifest manifest;
  manifest.backend = backend.name();
  manifest.pair = data.pair.tag();
  manifest.stage = "config";
  const fs::path dir = cfg.output_dir;
  auto flush_manifest = [&] {
    if (write_artifacts) write_manifest(dir / kManifestFile, manifest);
  };
  auto record = [&](const char* file) { manifest.files.emplace_back(file); };

  RunResult r;
  try {
    cfg.validate();
    const Template& t = cfg.resolve_template();
    manifest.template_id = t.id;

    manifest.stage = "prompts";
    r.prompts = build_prompts(cfg, data, t);
    if (r.prompts.empty()) throw ConfigError("test lexicon has no queries");
    if (write_artifacts) {
      fs::create_directories(dir);
      auto out = open_output(dir / kPromptsFile);
      write_prompts_jsonl(out, r.prompts);
      record(kPromptsFile);
    }

    manifest.stage = "generation";
    r.beams = generate(backend, r.prompts, cfg.generation);
    if (write_artifacts) {
      auto out = open_output(dir / kBeamsFile);
      write_beams_jsonl(out, r.prompts, r.beams);
      record(kBeamsFile);
    }

    manifest.stage = "extraction";
    const TargetVocabulary vocab(data.tgt);
    const auto specials = cfg.special_token_list();
    r.predictions = extract_all(r.beams, r.prompts, vocab, cfg.generation, specials);
    if (write_artifacts) {
      auto tsv = open_output(dir / kPredictionsTsv);
      write_predictions_tsv(tsv, r.predictions);
      record(kPredictionsTsv);
      auto jl = open_output(dir / kPredictionsJsonl);
      write_predictions_jsonl(jl, r.predictions);
      record(kPredictionsJsonl);
    }

    manifest.stage = "evaluation";
    r.report = score(r.predictions, gold_map(data.test), cfg.eval, data.pair.tag());
    if (write_artifacts) {
      save_report(dir / kReportJson, r.report);
      record(kReportJson);
      auto out = open_output(dir / kReportTable);
      write_report_table(out, std::span(&r.report, 1));
      record(kReportTable);
    }
  } catch (const std::exception& e) {
    manifest.error = e.what();
    try {
      flush_manifest();
    } catch (const std::exception&) {
      // The original error matters more than a failed manifest write.
    }
    throw;
  }
  manifest.stage = "done";
  manifest.complete = true;
  flush_manifest();
  return r;
}

RunResult run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  auto data = load_run_data(cfg);
  auto backend = make_backend(cfg, gold_map(data.test));
  return run_pipeline(cfg, data, *backend);
}

std::vector<SweepRow> sweep_shots(const RunConfig& cfg, const RunData& data, std::span<const std::size_t> n_values,
                                  Backend* backend) {
  if (n_values.empty()) throw ConfigError("sweep-shots needs at least one shot count");
  std::unique_ptr<Backend> owned;
  if (!backend) {
    owned = make_backend(cfg, gold_map(data.test));
    backend = owned.get();
  }

  // Validate every point before the first backend call.
  std::vector<RunConfig> runs;
  for (auto n : n_values) {
    RunConfig c = cfg;
    c.prompt.n_shots = n;
    if (n == 0)
      c.prompt.selection = SelectionMode::None;
    else if (c.prompt.selection == SelectionMode::None)
      c.prompt.selection = SelectionMode::Nearest;
    for (std::size_t k : {std::size_t{1}, std::size_t{5}})
      if (std::find(c.eval.ks.begin(), c.eval.ks.end(), k) == c.eval.ks.end()) c.eval.ks.push_back(k);
    std::sort(c.eval.ks.begin(), c.eval.ks.end());
    c.output_dir = cfg.output_dir / ("shots_" + std::to_string(n));
    c.validate();
    runs.push_back(std::move(c));
  }

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto r = run_pipeline(runs[i], data, *backend);
    rows.push_back({n_values[i], r.report.p_at_k.at(1), r.report.p_at_k.at(5)});
  }
  auto out = open_output(cfg.output_dir / "sweep.csv");
  write_sweep_csv(out, rows);
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "n,p_at_1,p_at_5\n";
  const auto old_precision = out.precision(6);
  const auto old_flags = out.flags();
  out << std::fixed;
  for (const auto& r : rows) out << r.n << ',' << r.p_at_1 << ',' << r.p_at_5 << '\n';
  out.precision(old_precision);
  out.flags(old_flags);
}

std::size_t export_finetune_data(const Lexicon& seed, const EmbeddingStore& aux_store, const EmbeddingStore& tgt_store,
                                 const Template& t, const PromptConfig& cfg, std::ostream& out) {
  if (t.shot_kind != ShotKind::FewShot) throw ConfigError("fine-tune export needs a few-shot template");
  cfg.validate(t);
  ExampleSelector selector(seed, aux_store, &tgt_store);
  std::vector<std::string> queries;
  queries.reserve(seed.size());
  for (const auto& e : seed.entries()) queries.push_back(e.source);
  const auto selections = selector.select_batch(queries, cfg, /*exclude_self=*/true);

  std::size_t count = 0;
  for (std::size_t i = 0; i < seed.size(); ++i) {
    const auto& pair = seed.entries()[i];
    auto p = render(t, seed.pair(), pair.source, selections[i].examples, cfg);
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : p.examples) ex.push_back({{"source", e.source}, {"target", e.target}});
    nlohmann::json j = {{"prompt", p.rendered},
                        {"completion", pair.target},
                        {"query", pair.source},
                        {"examples", ex},
                        {"provenance", to_string(selections[i].provenance)}};
    out << j.dump() << '\n';
    ++count;
  }
  return count;
}

std::size_t export_finetune_data(const Lexicon& seed, const EmbeddingStore& aux_store, const EmbeddingStore& tgt_store,
                                 const Template& t, const PromptConfig& cfg, const fs::path& out) {
  auto f = open_output(out);
  return export_finetune_data(seed, aux_store, tgt_store, t, cfg, f);
}

ChiSquareResult significance(std::span<const fs::path> reports_a, std::span<const fs::path> reports_b) {
  if (reports_a.empty() || reports_b.empty()) throw ConfigError("significance needs reports on both sides");
  std::vector<EvalReport> a, b;
  for (const auto& p : reports_a) a.push_back(load_report(p));
  for (const auto& p : reports_b) b.push_back(load_report(p));
  try {
    return chi_square_pooled(a, b);
  } catch (const std::invalid_argument& e) {
    throw SchemaMismatch(e.what());
  }
}

ChiSquareResult significance(const fs::path& report_a, const fs::path& report_b) {
  return significance(std::span(&report_a, 1), std::span(&report_b, 1));
}

std::vector<Prediction> baseline_predictions(const Translator& translator, std::span<const std::string> queries,
                                             std::size_t k) {
  std::vector<Prediction> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    Prediction p;
    p.query = q;
    try {
      for (const auto& t : translator.translate(q, k)) p.candidates_ranked.push_back(t.word);
    } catch (const QueryNotInEmbeddings&) {
    }
    if (!p.candidates_ranked.empty()) {
      p.predicted = p.candidates_ranked.front();
      p.beam_rank_used = 1;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace bli
