#include <gtest/gtest.h>

#include <sstream>

#include "bli/config.hpp"
#include "bli/errors.hpp"
#include "support/toy_world.hpp"

using namespace bli;

namespace {

ConfigValues parse(const std::string& s) {
  std::istringstream in(s);
  return parse_config_values(in);
}

EnvLookup fake_env(std::map<std::string, std::string> vars) {
  return [vars](const std::string& k) -> std::optional<std::string> {
    auto it = vars.find(k);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

}  // namespace

TEST(ConfigText, CommentsQuotesAndWhitespace) {
  auto v = parse(
      "# run\n"
      "src = de\n"
      "  tgt=fr   # trailing\n"
      "\n"
      "backend_token = \"a#b c\"\n");
  EXPECT_EQ(v.at("src"), "de");
  EXPECT_EQ(v.at("tgt"), "fr");
  EXPECT_EQ(v.at("backend_token"), "a#b c");
  EXPECT_THROW(parse("no equals\n"), ConfigError);
  EXPECT_THROW(parse("k = \"open\n"), ConfigError);
  EXPECT_THROW(parse(" = v\n"), ConfigError);
}

TEST(BuildConfig, UnknownKeyAndBadValues) {
  EXPECT_THROW(build_config({{"srcc", "de"}}, no_env()), ConfigError);
  EXPECT_THROW(build_config({{"beam_size", "five"}}, no_env()), ConfigError);
  EXPECT_THROW(build_config({{"strict", "maybe"}}, no_env()), ConfigError);
  EXPECT_THROW(build_config({{"selection", "best"}}, no_env()), ConfigError);
  EXPECT_THROW(build_config({{"preset", "9k"}}, no_env()), ConfigError);
}

TEST(BuildConfig, EnvironmentWinsOverFile) {
  auto cfg = build_config({{"src", "de"}, {"beam_size", "3"}},
                          fake_env({{"BLI_SRC", "it"}, {"BLI_BACKEND_URL", "http://h/x"}}));
  EXPECT_EQ(cfg.src, "it");
  EXPECT_EQ(cfg.generation.beam_size, 3u);
  EXPECT_EQ(cfg.http.url, "http://h/x");
}

TEST(BuildConfig, RelativePathsFollowTheConfigFile) {
  auto cfg = build_config({{"test", "lex/test.tsv"}, {"seed", "/abs/seed.tsv"}}, no_env(), "/runs/a");
  EXPECT_EQ(cfg.test_lexicon, std::filesystem::path("/runs/a/lex/test.tsv"));
  EXPECT_EQ(cfg.seed_lexicon, std::filesystem::path("/abs/seed.tsv"));
  auto env_cfg = build_config({}, fake_env({{"BLI_TEST", "t.tsv"}}), "/runs/a");
  EXPECT_EQ(env_cfg.test_lexicon, std::filesystem::path("t.tsv"));
}

TEST(BuildConfig, PresetsAndExplicitOverrides) {
  auto five = build_config({{"preset", "5k"}}, no_env());
  EXPECT_EQ(five.prompt.n_shots, 5u);
  EXPECT_EQ(five.prompt.selection, SelectionMode::Nearest);
  auto zero = build_config({{"preset", "zero-shot"}}, no_env());
  EXPECT_EQ(zero.prompt.n_shots, 0u);
  EXPECT_EQ(zero.prompt.selection, SelectionMode::None);
  auto custom = build_config({{"preset", "5k"}, {"n_shots", "10"}, {"selection", "random"}}, no_env());
  EXPECT_EQ(custom.prompt.n_shots, 10u);
  EXPECT_EQ(custom.prompt.selection, SelectionMode::Random);
}

TEST(BuildConfig, FamilyDefaults) {
  auto mt5 = build_config({{"model_family", "mT5-XL"}}, no_env());
  EXPECT_EQ(mt5.prompt.mask_token, "<extra_id_0>");
  EXPECT_FALSE(mt5.generation.echo_input);
  auto llama = build_config({{"model_family", "llama-7b"}}, no_env());
  EXPECT_TRUE(llama.generation.echo_input);
  EXPECT_EQ(llama.special_token_list(), special_token_profile("llama-7b"));
  auto forced = build_config({{"model_family", "llama-7b"}, {"echo_input", "false"}, {"special_tokens", "<a>, <b>"}},
                             no_env());
  EXPECT_FALSE(forced.generation.echo_input);
  EXPECT_EQ(forced.special_token_list(), (std::vector<std::string>{"<a>", "<b>"}));
}

TEST(BuildConfig, ListsAndBeamSize) {
  auto cfg = build_config({{"ks", "1, 5,10"}, {"beam_size", "3"}}, no_env());
  EXPECT_EQ(cfg.eval.ks, (std::vector<std::size_t>{1, 5, 10}));
  EXPECT_EQ(cfg.generation.num_return_sequences, 3u);
}

TEST(RunConfigValidate, CrossFieldChecks) {
  auto base = build_config({{"src", "de"}, {"tgt", "fr"}, {"model_family", "llama-13b"}, {"preset", "zero-shot"}},
                           no_env());
  EXPECT_NO_THROW(base.validate());
  EXPECT_EQ(base.resolve_template().id, 50);

  auto few = base;
  few.apply_preset("5k");
  EXPECT_THROW(few.validate(), ConfigError);  // no seed lexicon
  few.seed_lexicon = "seed.tsv";
  EXPECT_NO_THROW(few.validate());
  EXPECT_EQ(few.resolve_template().id, 93);

  auto bad = base;
  bad.backend = "gpt";
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.backend = "http";
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.http.url = "http://h/x";
  EXPECT_NO_THROW(bad.validate());

  auto lang = base;
  lang.src = "xx";
  EXPECT_THROW(lang.validate(), ConfigError);

  auto no_tpl = base;
  no_tpl.model_family.clear();
  EXPECT_THROW(no_tpl.validate(), ConfigError);
  no_tpl.template_id = 41;
  EXPECT_NO_THROW(no_tpl.validate());
}

TEST(LoadConfig, FileWithOverridesAndMissingFiles) {
  auto dir = toy::scratch_dir("config");
  toy::write_text(dir / "run.conf", "src = de\ntgt = fr\ntest = test.tsv\nsrc_embeddings = a.vec\n");
  auto cfg = load_config(dir / "run.conf", {"tgt=it", "beam_size = 2"}, no_env());
  EXPECT_EQ(cfg.tgt, "it");
  EXPECT_EQ(cfg.generation.beam_size, 2u);
  EXPECT_EQ(cfg.test_lexicon, dir / "test.tsv");
  EXPECT_THROW(cfg.check_files(), ConfigError);
  EXPECT_THROW(load_config(dir / "run.conf", {"oops"}, no_env()), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.conf", no_env()), ConfigError);
}

TEST(ConfigKeys, EveryKeyIsAccepted) {
  for (const auto& k : config_keys()) {
    ConfigValues v = {{k, ""}};
    try {
      build_config(v, no_env());
    } catch (const ConfigError& e) {
      EXPECT_EQ(std::string(e.what()).find("unknown config key"), std::string::npos) << k;
    }
  }
}
