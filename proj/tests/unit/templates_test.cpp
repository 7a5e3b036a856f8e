#include <gtest/gtest.h>

#include "bli/errors.hpp"
#include "bli/templates.hpp"
#include "bli/text.hpp"
#include "support/toy_world.hpp"

using namespace bli;

namespace {

const LanguagePair kDeFr = LanguagePair::make("de", "fr");

PromptConfig config_for(const Template& t, std::string mask = "<mask>") {
  PromptConfig cfg;
  cfg.n_shots = t.shot_kind == ShotKind::FewShot ? 2 : 0;
  cfg.selection = t.shot_kind == ShotKind::FewShot ? SelectionMode::Nearest : SelectionMode::None;
  cfg.mask_token = std::move(mask);
  return cfg;
}

std::vector<IclExample> two_examples() { return {{"a", "x", 0}, {"b", "y", 1}}; }

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Catalog, HasSixtySixZeroShotAndThirtySixFewShot) {
  const auto& cat = TemplateCatalog::builtin();
  ASSERT_EQ(cat.size(), 102u);
  int zero = 0, few = 0;
  for (const auto& t : cat.templates()) (t.shot_kind == ShotKind::ZeroShot ? zero : few)++;
  EXPECT_EQ(zero, 66);
  EXPECT_EQ(few, 36);
  EXPECT_EQ(cat.version(), 1);
}

TEST(Catalog, IdRangesFollowStyleAndShotLayout) {
  for (const auto& t : TemplateCatalog::builtin().templates()) {
    SCOPED_TRACE(t.id);
    EXPECT_EQ(t.shot_kind, t.id <= 66 ? ShotKind::ZeroShot : ShotKind::FewShot);
    const bool mask = (t.id >= 1 && t.id <= 37) || (t.id >= 67 && t.id <= 78);
    EXPECT_EQ(t.style, mask ? TemplateStyle::MaskFilling : TemplateStyle::GptStyle);
  }
}

TEST(Catalog, BodiesSatisfySlotRules) {
  for (const auto& t : TemplateCatalog::builtin().templates()) {
    SCOPED_TRACE(t.id);
    EXPECT_NO_THROW(validate_template(t));
    EXPECT_EQ(count(t.body, "{QUERY}"), 1u);
    EXPECT_EQ(count(t.body, "{MASK}"), t.style == TemplateStyle::MaskFilling ? 1u : 0u);
    const bool has_unit = t.body.find("[[") != std::string::npos;
    EXPECT_EQ(has_unit, t.shot_kind == ShotKind::FewShot);
    EXPECT_EQ(t.body.find("{EX_SRC}") != std::string::npos, t.shot_kind == ShotKind::FewShot);
    EXPECT_EQ(t.body.find("’"), std::string::npos) << "typographic apostrophe";
  }
}

TEST(Catalog, EveryTemplateRendersTheFixture) {
  for (const auto& t : TemplateCatalog::builtin().templates()) {
    SCOPED_TRACE(t.id);
    auto ex = t.shot_kind == ShotKind::FewShot ? two_examples() : std::vector<IclExample>{};
    auto p = render(t, kDeFr, "haus", ex, config_for(t));
    EXPECT_NE(p.rendered.find("haus"), std::string::npos);
    EXPECT_EQ(p.rendered.find('{'), std::string::npos);
    EXPECT_EQ(p.rendered.find("[["), std::string::npos);
    if (t.shot_kind == ShotKind::FewShot) {
      EXPECT_NE(p.rendered.find("a"), std::string::npos);
      EXPECT_NE(p.rendered.find("y"), std::string::npos);
    }
    EXPECT_EQ(p.mask_token.has_value(), t.style == TemplateStyle::MaskFilling);
  }
}

TEST(Render, MaskFillingLiteralExample) {
  const auto& t = TemplateCatalog::builtin().get(6);
  auto p = render(t, kDeFr, "gebouw", {}, config_for(t, std::string(kMt5MaskToken)));
  EXPECT_EQ(p.rendered, "The German word gebouw in French is <extra_id_0>.");
}

TEST(Render, FewShotArrowTemplate) {
  const auto& t = TemplateCatalog::builtin().get(79);
  auto p = render(t, kDeFr, "c", two_examples(), config_for(t));
  EXPECT_EQ(p.rendered, "Translate from German to French: a->x b->y c->");
  EXPECT_EQ(p.examples, two_examples());
}

TEST(Render, RepeatUnitPerExample) {
  const auto& t = TemplateCatalog::builtin().get(75);
  auto p = render(t, kDeFr, "haus", two_examples(), config_for(t));
  EXPECT_EQ(p.rendered, "The word a in French is x. The word b in French is y. The word haus in French is <mask>.");
}

TEST(Render, ArityMismatchIsSlotMismatch) {
  const auto& few = TemplateCatalog::builtin().get(79);
  const auto& zero = TemplateCatalog::builtin().get(41);
  EXPECT_THROW(render(few, kDeFr, "c", {}, config_for(few)), SlotMismatch);
  EXPECT_THROW(render(zero, kDeFr, "c", two_examples(), config_for(zero)), SlotMismatch);
}

TEST(Render, SubstitutedTextIsNotRescanned) {
  Template t{500, TemplateStyle::GptStyle, ShotKind::ZeroShot, "{SRC_LANG}: {QUERY} ->"};
  PromptConfig cfg = config_for(t);
  auto p = render(t, kDeFr, "{TGT_LANG}", {}, cfg);
  EXPECT_EQ(p.rendered, "German: {TGT_LANG} ->");
}

TEST(ValidateTemplate, RejectsBrokenBodies) {
  auto bad = [](TemplateStyle s, ShotKind k, std::string body) {
    return Template{999, s, k, std::move(body)};
  };
  using S = TemplateStyle;
  using K = ShotKind;
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::ZeroShot, "no query")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::ZeroShot, "{QUERY} {QUERY}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::ZeroShot, "{QUERY} {MASK}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::MaskFilling, K::ZeroShot, "{QUERY}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::FewShot, "{QUERY}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::ZeroShot, "[[{EX_SRC}]]{QUERY}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::ZeroShot, "{QUERY} {NOPE}")), std::invalid_argument);
  EXPECT_THROW(validate_template(bad(S::GptStyle, K::FewShot, "[[{EX_SRC}]] {QUERY}")), std::invalid_argument);
  EXPECT_NO_THROW(validate_template(bad(S::GptStyle, K::FewShot, "[[{EX_SRC}={EX_TGT} ]]{QUERY}=")));
}

TEST(BestTemplate, RecordedChoices) {
  EXPECT_EQ(best_template("LLaMA-13B", ShotKind::ZeroShot).id, 50);
  EXPECT_EQ(best_template("llama_13b", ShotKind::FewShot).id, 93);
  EXPECT_EQ(best_template("xglm-564m", ShotKind::ZeroShot).id, 41);
  EXPECT_EQ(best_template("xglm-564m", ShotKind::FewShot).id, 83);
  EXPECT_EQ(best_template("mt5-xxl", ShotKind::ZeroShot).id, 11);
  EXPECT_EQ(best_template("mt0-small", ShotKind::FewShot).id, 101);
  EXPECT_EQ(best_template("mGPT", ShotKind::ZeroShot).id, 52);
  EXPECT_EQ(best_template("mgpt-1.4b", ShotKind::FewShot).id, 85);
  EXPECT_EQ(best_template("llama-13b", ShotKind::ZeroShot).body, "Translate from {SRC_LANG} to {TGT_LANG}: {QUERY}=>");
  EXPECT_EQ(best_template("xglm-564m", ShotKind::ZeroShot).body, "The {SRC_LANG} word {QUERY} in {TGT_LANG} is:");
}

TEST(BestTemplate, EveryKnownFamilyResolvesToMatchingKinds) {
  for (const auto& f : known_model_families()) {
    EXPECT_EQ(best_template(f, ShotKind::ZeroShot).shot_kind, ShotKind::ZeroShot) << f;
    EXPECT_EQ(best_template(f, ShotKind::FewShot).shot_kind, ShotKind::FewShot) << f;
  }
  EXPECT_EQ(known_model_families().size(), 18u);
}

TEST(BestTemplate, UnknownFamily) { EXPECT_THROW(best_template("gpt-9", ShotKind::ZeroShot), UnknownModel); }

TEST(Catalog, JsonRoundTripAndErrors) {
  const auto& cat = TemplateCatalog::builtin();
  auto back = TemplateCatalog::parse(cat.to_json());
  ASSERT_EQ(back.size(), cat.size());
  for (std::size_t i = 0; i < cat.size(); ++i) EXPECT_EQ(back.templates()[i].body, cat.templates()[i].body);
  EXPECT_THROW(TemplateCatalog::parse("not json"), ConfigError);
  EXPECT_THROW(TemplateCatalog::parse(R"({"format":"bli-template-catalog","version":1,"templates":[
      {"id":1,"style":"gpt_style","shot_kind":"zero_shot","body":"{QUERY}"},
      {"id":1,"style":"gpt_style","shot_kind":"zero_shot","body":"{QUERY}:"}]})"),
               ConfigError);
  EXPECT_THROW(TemplateCatalog::parse(R"({"format":"bli-template-catalog","version":1,"templates":[
      {"id":1,"style":"gpt_style","shot_kind":"zero_shot","body":"no slot"}]})"),
               ConfigError);
  EXPECT_THROW(cat.get(103), UnknownTemplate);
}

TEST(Catalog, LoadsFromFile) {
  auto dir = toy::scratch_dir("catalog");
  toy::write_text(dir / "c.json", TemplateCatalog::builtin().to_json());
  EXPECT_EQ(TemplateCatalog::load(dir / "c.json").size(), 102u);
}

TEST(PromptConfig, RejectsInconsistentSettings) {
  const auto& few = TemplateCatalog::builtin().get(93);
  const auto& zero = TemplateCatalog::builtin().get(6);
  PromptConfig c;
  c.selection = SelectionMode::None;
  c.n_shots = 0;
  EXPECT_THROW(c.validate(few), ConfigError);
  c.n_shots = 3;
  EXPECT_THROW(c.validate(zero), ConfigError);
  c.selection = SelectionMode::Nearest;
  EXPECT_THROW(c.validate(zero), ConfigError);
  c.n_shots = 0;
  EXPECT_THROW(c.validate(few), ConfigError);
  c.mask_token.clear();
  EXPECT_THROW(c.validate(zero), ConfigError);
  c.mask_token = "<mask>";
  EXPECT_NO_THROW(c.validate(zero));
}
