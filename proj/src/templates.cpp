#include "bli/templates.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

namespace detail {
extern const char* const kBuiltinCatalogJson;
}

namespace {

constexpr std::string_view kRepeatOpen = "[[";
constexpr std::string_view kRepeatClose = "]]";

enum class Slot { SrcLang, TgtLang, Query, Mask, ExSrc, ExTgt };

struct SlotName {
  std::string_view text;
  Slot slot;
};

constexpr SlotName kSlots[] = {
    {"{SRC_LANG}", Slot::SrcLang}, {"{TGT_LANG}", Slot::TgtLang}, {"{QUERY}", Slot::Query},
    {"{MASK}", Slot::Mask},        {"{EX_SRC}", Slot::ExSrc},     {"{EX_TGT}", Slot::ExTgt},
};

struct BodyParts {
  std::string_view head;
  std::string_view unit;  // empty for zero-shot bodies
  std::string_view tail;
  bool has_unit = false;
};

BodyParts split_body(std::string_view body) {
  BodyParts parts;
  auto open = body.find(kRepeatOpen);
  if (open == std::string_view::npos) {
    parts.head = body;
    return parts;
  }
  auto close = body.find(kRepeatClose, open + kRepeatOpen.size());
  if (close == std::string_view::npos) throw std::invalid_argument("unterminated [[ block");
  parts.head = body.substr(0, open);
  parts.unit = body.substr(open + kRepeatOpen.size(), close - open - kRepeatOpen.size());
  parts.tail = body.substr(close + kRepeatClose.size());
  parts.has_unit = true;
  if (parts.tail.find(kRepeatOpen) != std::string_view::npos ||
      parts.unit.find(kRepeatOpen) != std::string_view::npos)
    throw std::invalid_argument("more than one [[ block");
  return parts;
}

// Counts each slot in `s`; rejects unknown {NAME} placeholders.
std::map<Slot, int> count_slots(std::string_view s) {
  std::map<Slot, int> counts;
  std::size_t pos = 0;
  while ((pos = s.find('{', pos)) != std::string_view::npos) {
    bool matched = false;
    for (const auto& sn : kSlots) {
      if (s.substr(pos, sn.text.size()) == sn.text) {
        ++counts[sn.slot];
        pos += sn.text.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw std::invalid_argument("unknown placeholder at '" + std::string(s.substr(pos, 12)) + "'");
  }
  return counts;
}

struct SlotValues {
  std::string_view src_lang, tgt_lang, query, mask, ex_src, ex_tgt;
};

// Single left-to-right pass, so substituted text is never re-scanned.
void substitute(std::string_view s, const SlotValues& v, std::string& out) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto brace = s.find('{', pos);
    if (brace == std::string_view::npos) {
      out.append(s.substr(pos));
      return;
    }
    out.append(s.substr(pos, brace - pos));
    pos = brace;
    bool matched = false;
    for (const auto& sn : kSlots) {
      if (s.substr(pos, sn.text.size()) != sn.text) continue;
      switch (sn.slot) {
        case Slot::SrcLang: out.append(v.src_lang); break;
        case Slot::TgtLang: out.append(v.tgt_lang); break;
        case Slot::Query: out.append(v.query); break;
        case Slot::Mask: out.append(v.mask); break;
        case Slot::ExSrc: out.append(v.ex_src); break;
        case Slot::ExTgt: out.append(v.ex_tgt); break;
      }
      pos += sn.text.size();
      matched = true;
      break;
    }
    if (!matched) {
      out.push_back('{');
      ++pos;
    }
  }
}

TemplateStyle parse_style(const std::string& s) {
  if (s == "mask_filling") return TemplateStyle::MaskFilling;
  if (s == "gpt_style") return TemplateStyle::GptStyle;
  throw ConfigError("unknown template style '" + s + "'");
}

ShotKind parse_shot_kind(const std::string& s) {
  if (s == "zero_shot") return ShotKind::ZeroShot;
  if (s == "few_shot") return ShotKind::FewShot;
  throw ConfigError("unknown shot kind '" + s + "'");
}

struct BestTemplates {
  int zero_shot;
  int few_shot;
};

// Best template ids per model, from the German-French template search.
const std::map<std::string, BestTemplates, std::less<>>& best_template_table() {
  static const std::map<std::string, BestTemplates, std::less<>> table = {
      {"mt5-small", {1, 75}},   {"mt5-base", {28, 75}},   {"mt5-large", {7, 76}},
      {"mt5-xl", {7, 78}},      {"mt5-xxl", {11, 78}},    {"mt0-small", {36, 101}},
      {"mt0-base", {36, 85}},   {"mt0-large", {66, 77}},  {"mt0-xl", {64, 86}},
      {"mt0-xxl", {64, 90}},    {"xglm-564m", {41, 83}},  {"xglm-1.7b", {41, 85}},
      {"xglm-2.9b", {41, 85}},  {"xglm-4.5b", {41, 85}},  {"xglm-7.5b", {41, 85}},
      {"mgpt", {52, 85}},       {"llama-7b", {41, 93}},   {"llama-13b", {50, 93}},
  };
  return table;
}

}  // namespace

std::string_view to_string(TemplateStyle s) {
  return s == TemplateStyle::MaskFilling ? "mask_filling" : "gpt_style";
}

std::string_view to_string(ShotKind k) { return k == ShotKind::ZeroShot ? "zero_shot" : "few_shot"; }

void validate_template(const Template& t) {
  const auto parts = split_body(t.body);
  std::string outer = std::string(parts.head) + std::string(parts.tail);
  auto outer_counts = count_slots(outer);
  auto unit_counts = count_slots(parts.unit);
  auto where = "template " + std::to_string(t.id) + ": ";

  if (outer_counts[Slot::Query] != 1) throw std::invalid_argument(where + "{QUERY} must appear exactly once");
  if (outer_counts[Slot::ExSrc] || outer_counts[Slot::ExTgt])
    throw std::invalid_argument(where + "example slots outside the [[ ]] unit");
  if (unit_counts[Slot::Query] || unit_counts[Slot::Mask])
    throw std::invalid_argument(where + "{QUERY}/{MASK} inside the example unit");

  if (t.shot_kind == ShotKind::ZeroShot && parts.has_unit)
    throw std::invalid_argument(where + "zero-shot template has an example unit");
  if (t.shot_kind == ShotKind::FewShot &&
      (!parts.has_unit || unit_counts[Slot::ExSrc] != 1 || unit_counts[Slot::ExTgt] != 1))
    throw std::invalid_argument(where + "few-shot unit needs {EX_SRC} and {EX_TGT} once each");

  const int masks = outer_counts[Slot::Mask];
  if (t.style == TemplateStyle::MaskFilling && masks != 1)
    throw std::invalid_argument(where + "mask-filling template needs exactly one {MASK}");
  if (t.style == TemplateStyle::GptStyle && masks != 0)
    throw std::invalid_argument(where + "GPT-style template must not contain {MASK}");
}

PromptInstance render(const Template& t, const LanguagePair& pair, std::string_view query,
                      std::vector<IclExample> examples, const PromptConfig& cfg) {
  if (t.shot_kind == ShotKind::FewShot && examples.empty())
    throw SlotMismatch("few-shot template " + std::to_string(t.id) + " needs at least one example");
  if (t.shot_kind == ShotKind::ZeroShot && !examples.empty())
    throw SlotMismatch("zero-shot template " + std::to_string(t.id) + " got " +
                       std::to_string(examples.size()) + " examples");

  const auto parts = split_body(t.body);
  const bool masked = t.style == TemplateStyle::MaskFilling;
  SlotValues values{pair.src_name, pair.tgt_name, query, masked ? std::string_view(cfg.mask_token) : "", {}, {}};

  PromptInstance p;
  p.template_id = t.id;
  p.pair = pair;
  p.query = std::string(query);
  if (masked) p.mask_token = cfg.mask_token;
  p.requested_shots = examples.size();

  substitute(parts.head, values, p.rendered);
  for (const auto& ex : examples) {
    values.ex_src = ex.source;
    values.ex_tgt = ex.target;
    substitute(parts.unit, values, p.rendered);
  }
  substitute(parts.tail, values, p.rendered);
  p.examples = std::move(examples);
  return p;
}

const TemplateCatalog& TemplateCatalog::builtin() {
  static const TemplateCatalog catalog = parse(detail::kBuiltinCatalogJson);
  return catalog;
}

TemplateCatalog TemplateCatalog::parse(std::string_view json_text) {
  TemplateCatalog catalog;
  try {
    auto doc = nlohmann::json::parse(json_text);
    if (doc.value("format", "") != "bli-template-catalog")
      throw ConfigError("not a template catalog (missing format tag)");
    catalog.version_ = doc.at("version").get<int>();
    for (const auto& rec : doc.at("templates")) {
      Template t;
      t.id = rec.at("id").get<int>();
      t.style = parse_style(rec.at("style").get<std::string>());
      t.shot_kind = parse_shot_kind(rec.at("shot_kind").get<std::string>());
      t.body = rec.at("body").get<std::string>();
      validate_template(t);
      catalog.templates_.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("template catalog: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("template catalog: ") + e.what());
  }
  std::sort(catalog.templates_.begin(), catalog.templates_.end(),
            [](const Template& a, const Template& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < catalog.templates_.size(); ++i)
    if (catalog.templates_[i].id == catalog.templates_[i - 1].id)
      throw ConfigError("template catalog: duplicate id " + std::to_string(catalog.templates_[i].id));
  return catalog;
}

TemplateCatalog TemplateCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open template catalog " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Template& TemplateCatalog::get(int id) const {
  auto it = std::lower_bound(templates_.begin(), templates_.end(), id,
                             [](const Template& t, int v) { return t.id < v; });
  if (it == templates_.end() || it->id != id)
    throw UnknownTemplate("no template with id " + std::to_string(id));
  return *it;
}

std::string TemplateCatalog::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = "bli-template-catalog";
  doc["version"] = version_;
  doc["templates"] = nlohmann::ordered_json::array();
  for (const auto& t : templates_) {
    doc["templates"].push_back({{"id", t.id},
                                {"style", to_string(t.style)},
                                {"shot_kind", to_string(t.shot_kind)},
                                {"body", t.body}});
  }
  return doc.dump(2);
}

std::vector<std::string> known_model_families() {
  std::vector<std::string> out;
  for (const auto& [name, _] : best_template_table()) out.push_back(name);
  return out;
}

std::string canonical_model_family(std::string_view name) {
  std::string s = text::to_lower(text::trim(name));
  for (char& c : s)
    if (c == '_' || c == ' ') c = '-';
  if (s == "mgpt-1.4b") s = "mgpt";
  return s;
}

const Template& best_template(std::string_view model_family, ShotKind kind,
                              const TemplateCatalog& catalog) {
  const auto& table = best_template_table();
  auto it = table.find(canonical_model_family(model_family));
  if (it == table.end())
    throw UnknownModel("no recorded best template for model '" + std::string(model_family) +
                       "'; pass an explicit template id");
  return catalog.get(kind == ShotKind::ZeroShot ? it->second.zero_shot : it->second.few_shot);
}

}  // namespace bli
