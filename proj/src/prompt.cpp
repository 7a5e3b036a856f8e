#include "bli/prompt.hpp"

#include "bli/errors.hpp"

namespace bli {

std::string_view to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::Nearest: return "nearest";
    case SelectionMode::Random: return "random";
    case SelectionMode::None: return "none";
  }
  return "none";
}

SelectionMode parse_selection_mode(std::string_view s) {
  if (s == "nearest" || s == "nn") return SelectionMode::Nearest;
  if (s == "random") return SelectionMode::Random;
  if (s == "none") return SelectionMode::None;
  throw ConfigError("unknown selection mode '" + std::string(s) + "' (nearest|random|none)");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::None: return "none";
    case Provenance::Nearest: return "nearest";
    case Provenance::Random: return "random";
    case Provenance::FrequencyFallback: return "frequency_fallback";
  }
  return "none";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "none") return Provenance::None;
  if (s == "nearest") return Provenance::Nearest;
  if (s == "random") return Provenance::Random;
  if (s == "frequency_fallback") return Provenance::FrequencyFallback;
  throw SchemaMismatch("unknown provenance '" + std::string(s) + "'");
}

void PromptConfig::validate(const Template& t) const {
  if (selection == SelectionMode::None && n_shots > 0)
    throw ConfigError("selection mode 'none' requires n_shots = 0");
  if (selection == SelectionMode::None && t.shot_kind == ShotKind::FewShot)
    throw ConfigError("selection mode 'none' cannot fill few-shot template " + std::to_string(t.id));
  if (t.shot_kind == ShotKind::FewShot && n_shots == 0)
    throw ConfigError("few-shot template " + std::to_string(t.id) + " needs n_shots >= 1");
  if (t.shot_kind == ShotKind::ZeroShot && n_shots > 0)
    throw ConfigError("zero-shot template " + std::to_string(t.id) + " used with n_shots = " +
                      std::to_string(n_shots));
  if (t.style == TemplateStyle::MaskFilling && mask_token.empty())
    throw ConfigError("mask-filling template " + std::to_string(t.id) + " needs a mask token");
}

}  // namespace bli
