// Command-line front end. Exit codes: 0 ok, 2 config, 3 data, 4 backend.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

#include "bli/artifacts.hpp"
#include "bli/config.hpp"
#include "bli/errors.hpp"
#include "bli/pipeline.hpp"
#include "bli/procrustes.hpp"
#include "bli/retrieval.hpp"
#include "bli/templates.hpp"

namespace fs = std::filesystem;
using namespace bli;

namespace {

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;

  void attach(CLI::App* sub) {
    sub->add_option("-c,--config", path, "run config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "key=value override (repeatable)");
  }
  RunConfig load() const { return load_config(path, overrides); }
};

LanguagePair pair_of(const RunConfig& cfg) { return LanguagePair::make(cfg.src, cfg.tgt, cfg.language_table()); }

std::vector<PromptInstance> read_prompts(const RunConfig& cfg) {
  auto in = open_input(cfg.output_dir / kPromptsFile);
  return read_prompts_jsonl(in, cfg.language_table());
}

void print_report(const EvalReport& r) { write_report_table(std::cout, std::span(&r, 1)); }

int run(int argc, char** argv) {
  CLI::App app{"Bilingual lexicon induction with retrieval-augmented prompting"};
  app.require_subcommand(1);

  // load-embeddings
  auto* load = app.add_subcommand("load-embeddings", "validate a .vec file and report its shape");
  std::string load_path;
  std::size_t load_trim = kDefaultVocabTrim;
  bool no_normalize = false;
  load->add_option("path", load_path)->required();
  load->add_option("--trim", load_trim, "keep this many tokens");
  load->add_flag("--no-normalize", no_normalize);
  load->callback([&] {
    VecLoadReport rep;
    auto store = load_vec(load_path, load_trim, !no_normalize, &rep);
    std::cout << "tokens\t" << store.size() << "\ndim\t" << store.dim() << "\nheader_count\t" << rep.header_count
              << "\nrows_read\t" << rep.rows_read << "\nduplicates_skipped\t" << rep.duplicates_skipped
              << "\ntrimmed\t" << (rep.trimmed ? "yes" : "no") << '\n';
  });

  // retrieve
  auto* ret = app.add_subcommand("retrieve", "nearest neighbours of words in one space");
  std::string ret_emb;
  std::vector<std::string> ret_queries;
  std::size_t ret_k = 10, ret_trim = kDefaultVocabTrim;
  bool ret_exclude_self = false, ret_serial = false;
  ret->add_option("-e,--embeddings", ret_emb)->required()->check(CLI::ExistingFile);
  ret->add_option("-q,--query", ret_queries)->required();
  ret->add_option("-k", ret_k)->check(CLI::PositiveNumber);
  ret->add_option("--trim", ret_trim);
  ret->add_flag("--exclude-self", ret_exclude_self);
  ret->add_flag("--serial", ret_serial, "use the reference scan");
  ret->callback([&] {
    auto store = load_vec(ret_emb, ret_trim);
    for (const auto& q : ret_queries) {
      auto e = store.lookup(q);
      if (!e) throw QueryNotInEmbeddings("'" + q + "' is not in " + ret_emb);
      retrieval::ExcludeSet ex;
      if (ret_exclude_self) ex.insert(e->index);
      auto hits = retrieval::top_k_cosine(store, e->vector, ret_k, ex,
                                          ret_serial ? retrieval::Execution::Serial : retrieval::Execution::Parallel);
      for (std::size_t i = 0; i < hits.size(); ++i)
        std::cout << q << '\t' << i + 1 << '\t' << store.token(hits[i].index) << '\t' << std::setprecision(6)
                  << hits[i].score << '\n';
    }
  });

  // build-prompts
  auto* bp = app.add_subcommand("build-prompts", "render prompts for every test query");
  ConfigArgs bp_cfg;
  bp_cfg.attach(bp);
  bp->callback([&] {
    auto cfg = bp_cfg.load();
    cfg.validate();
    auto data = load_run_data(cfg);
    auto prompts = build_prompts(cfg, data, cfg.resolve_template());
    auto out = open_output(cfg.output_dir / kPromptsFile);
    write_prompts_jsonl(out, prompts);
    std::cout << prompts.size() << " prompts -> " << (cfg.output_dir / kPromptsFile).string() << '\n';
  });

  // generate
  auto* gen = app.add_subcommand("generate", "send prompts.jsonl to the backend");
  ConfigArgs gen_cfg;
  gen_cfg.attach(gen);
  gen->callback([&] {
    auto cfg = gen_cfg.load();
    cfg.validate();
    auto prompts = read_prompts(cfg);
    GoldMap gold;
    if (cfg.backend != "http") gold = gold_map(load_lexicon(cfg.test_lexicon, pair_of(cfg), LexiconRole::Test));
    auto backend = make_backend(cfg, gold);
    auto beams = generate(*backend, prompts, cfg.generation);
    auto out = open_output(cfg.output_dir / kBeamsFile);
    write_beams_jsonl(out, prompts, beams);
    std::cout << beams.size() << " beam results -> " << (cfg.output_dir / kBeamsFile).string() << '\n';
  });

  // extract
  auto* ext = app.add_subcommand("extract", "turn beams.jsonl into predictions");
  ConfigArgs ext_cfg;
  ext_cfg.attach(ext);
  ext->callback([&] {
    auto cfg = ext_cfg.load();
    cfg.validate();
    auto prompts = read_prompts(cfg);
    auto in = open_input(cfg.output_dir / kBeamsFile);
    auto beams = read_beams_jsonl(in);
    const TargetVocabulary vocab(load_vec(cfg.tgt_embeddings, cfg.trim));
    const auto specials = cfg.special_token_list();
    auto preds = extract_all(beams, prompts, vocab, cfg.generation, specials);
    auto tsv = open_output(cfg.output_dir / kPredictionsTsv);
    write_predictions_tsv(tsv, preds);
    auto jl = open_output(cfg.output_dir / kPredictionsJsonl);
    write_predictions_jsonl(jl, preds);
    std::cout << preds.size() << " predictions -> " << (cfg.output_dir / kPredictionsTsv).string() << '\n';
  });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score predictions against a gold lexicon");
  std::string ev_pred, ev_gold, ev_src, ev_tgt, ev_out, ev_label;
  std::vector<std::size_t> ev_ks = {1, 5};
  ev->add_option("-p,--predictions", ev_pred, "predictions .tsv or .jsonl")->required()->check(CLI::ExistingFile);
  ev->add_option("-g,--gold", ev_gold, "gold lexicon TSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--src", ev_src)->required();
  ev->add_option("--tgt", ev_tgt)->required();
  ev->add_option("--ks", ev_ks)->delimiter(',');
  ev->add_option("-o,--out", ev_out, "write report.json here");
  ev->add_option("--label", ev_label);
  ev->callback([&] {
    auto pair = LanguagePair::make(ev_src, ev_tgt);
    auto gold = gold_map(load_lexicon(ev_gold, pair, LexiconRole::Test));
    auto preds = load_predictions(ev_pred);
    auto report = score(preds, gold, EvalConfig{ev_ks}, ev_label.empty() ? pair.tag() : ev_label);
    if (!ev_out.empty()) save_report(ev_out, report);
    print_report(report);
  });

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "prompts, generation, extraction and scoring in one go");
  ConfigArgs pl_cfg;
  pl_cfg.attach(pl);
  pl->callback([&] {
    auto r = run_pipeline(pl_cfg.load());
    print_report(r.report);
  });

  // sweep-shots
  auto* sw = app.add_subcommand("sweep-shots", "one run per in-context example count");
  ConfigArgs sw_cfg;
  std::vector<std::string> sw_n;
  sw_cfg.attach(sw);
  sw->add_option("-n,--shots", sw_n, "comma-separated shot counts")->delimiter(',')->required();
  sw->callback([&] {
    auto cfg = sw_cfg.load();
    auto data = load_run_data(cfg);
    std::vector<std::size_t> shots;
    for (const auto& v : sw_n) {
      if (v.empty()) continue;
      std::size_t pos = 0;
      try {
        shots.push_back(std::stoul(v, &pos));
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != v.size()) throw ConfigError("bad shot count '" + v + "'");
    }
    auto rows = sweep_shots(cfg, data, shots);
    write_sweep_csv(std::cout, rows);
  });

  // export-ft-data
  auto* ft = app.add_subcommand("export-ft-data", "few-shot prompts for every seed pair, as JSONL");
  ConfigArgs ft_cfg;
  std::string ft_out;
  ft_cfg.attach(ft);
  ft->add_option("-o,--out", ft_out)->required();
  ft->callback([&] {
    auto cfg = ft_cfg.load();
    if (!cfg.seed_lexicon) throw ConfigError("export-ft-data needs a 'seed' lexicon");
    auto pair = pair_of(cfg);
    auto seed = load_lexicon(*cfg.seed_lexicon, pair, LexiconRole::Seed);
    auto src = load_vec(cfg.src_embeddings, cfg.trim);
    auto tgt = load_vec(cfg.tgt_embeddings, cfg.trim);
    auto n = export_finetune_data(seed, src, tgt, cfg.resolve_template(), cfg.prompt, fs::path(ft_out));
    std::cout << n << " records -> " << ft_out << '\n';
  });

  // significance
  auto* sig = app.add_subcommand("significance", "chi-square test between two systems' reports");
  std::vector<std::string> sig_a, sig_b;
  sig->add_option("-a", sig_a, "report(s) of system A")->required()->check(CLI::ExistingFile);
  sig->add_option("-b", sig_b, "report(s) of system B")->required()->check(CLI::ExistingFile);
  sig->callback([&] {
    std::vector<fs::path> a(sig_a.begin(), sig_a.end()), b(sig_b.begin(), sig_b.end());
    auto r = significance(a, b);
    if (r.degenerate) std::cerr << "warning: degenerate 2x2 table, p set to 1\n";
    std::cout << "chi2\t" << std::setprecision(10) << r.chi2 << "\np\t" << r.p << "\nverdict\t"
              << significance_label(r.p) << '\n';
  });

  // baseline-fit
  auto* bf = app.add_subcommand("baseline-fit", "fit an orthogonal Procrustes map from a seed lexicon");
  std::string bf_src_emb, bf_tgt_emb, bf_seed, bf_src, bf_tgt, bf_out;
  std::size_t bf_trim = kDefaultVocabTrim;
  bf->add_option("--src-emb", bf_src_emb)->required()->check(CLI::ExistingFile);
  bf->add_option("--tgt-emb", bf_tgt_emb)->required()->check(CLI::ExistingFile);
  bf->add_option("--seed", bf_seed)->required()->check(CLI::ExistingFile);
  bf->add_option("--src", bf_src)->required();
  bf->add_option("--tgt", bf_tgt)->required();
  bf->add_option("-o,--out", bf_out)->required();
  bf->add_option("--trim", bf_trim);
  bf->callback([&] {
    auto pair = LanguagePair::make(bf_src, bf_tgt);
    auto seed = load_lexicon(bf_seed, pair, LexiconRole::Seed);
    auto src = load_vec(bf_src_emb, bf_trim);
    auto tgt = load_vec(bf_tgt_emb, bf_trim);
    FitReport rep;
    auto m = fit_procrustes(src, tgt, seed, &rep);
    save_mapping(bf_out, m);
    std::cout << "pairs_used\t" << rep.pairs_used << "\npairs_skipped\t" << rep.pairs_skipped
              << "\northogonality_residual\t" << m.orthogonality_residual() << '\n';
    if (rep.rank_deficient)
      std::cerr << "warning: cross-covariance is rank deficient (min singular value " << rep.min_singular
                << "); the map is not unique\n";
  });

  // baseline-translate
  auto* bt = app.add_subcommand("baseline-translate", "translate with a fitted map by cosine or CSLS");
  std::string bt_src_emb, bt_tgt_emb, bt_map, bt_method = "csls", bt_test, bt_src, bt_tgt, bt_out;
  std::vector<std::string> bt_queries;
  std::size_t bt_k = 5, bt_csls_k = retrieval::kDefaultCslsK, bt_trim = kDefaultVocabTrim;
  bt->add_option("--src-emb", bt_src_emb)->required()->check(CLI::ExistingFile);
  bt->add_option("--tgt-emb", bt_tgt_emb)->required()->check(CLI::ExistingFile);
  bt->add_option("--map", bt_map)->required()->check(CLI::ExistingFile);
  bt->add_option("--method", bt_method, "cosine or csls");
  bt->add_option("-k", bt_k)->check(CLI::PositiveNumber);
  bt->add_option("--csls-k", bt_csls_k)->check(CLI::PositiveNumber);
  bt->add_option("--trim", bt_trim);
  auto* q_opt = bt->add_option("-q,--query", bt_queries);
  auto* t_opt = bt->add_option("--test", bt_test, "score a whole test lexicon")->check(CLI::ExistingFile);
  q_opt->excludes(t_opt);
  bt->add_option("--src", bt_src);
  bt->add_option("--tgt", bt_tgt);
  bt->add_option("-o,--out-dir", bt_out, "write predictions and report here");
  bt->callback([&] {
    auto method = parse_retrieval_method(bt_method);
    auto src = load_vec(bt_src_emb, bt_trim);
    auto tgt = load_vec(bt_tgt_emb, bt_trim);
    auto m = load_mapping(bt_map);
    Translator translator(src, tgt, m, method, bt_csls_k);
    if (bt_test.empty()) {
      if (bt_queries.empty()) throw ConfigError("give --query or --test");
      for (const auto& q : bt_queries) {
        auto hits = translator.translate(q, bt_k);
        for (std::size_t i = 0; i < hits.size(); ++i)
          std::cout << q << '\t' << i + 1 << '\t' << hits[i].word << '\t' << hits[i].score << '\n';
      }
      return;
    }
    if (bt_src.empty() || bt_tgt.empty()) throw ConfigError("--test needs --src and --tgt");
    auto pair = LanguagePair::make(bt_src, bt_tgt);
    auto test = load_lexicon(bt_test, pair, LexiconRole::Test);
    auto preds = baseline_predictions(translator, test.sources(), bt_k);
    std::vector<std::size_t> ks = {1};
    if (bt_k >= 5) ks.push_back(5);
    if (bt_k > 5) ks.push_back(bt_k);
    auto report = score(preds, gold_map(test), EvalConfig{ks}, pair.tag() + " procrustes-" + bt_method);
    if (!bt_out.empty()) {
      auto tsv = open_output(fs::path(bt_out) / kPredictionsTsv);
      write_predictions_tsv(tsv, preds);
      auto jl = open_output(fs::path(bt_out) / kPredictionsJsonl);
      write_predictions_jsonl(jl, preds);
      save_report(fs::path(bt_out) / kReportJson, report);
    }
    print_report(report);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Data);
  }
}
