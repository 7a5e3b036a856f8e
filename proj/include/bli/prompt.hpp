#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bli/languages.hpp"

namespace bli {

enum class TemplateStyle { MaskFilling, GptStyle };
enum class ShotKind { ZeroShot, FewShot };

std::string_view to_string(TemplateStyle s);
std::string_view to_string(ShotKind k);

/// A catalog prompt template.
///
/// Slots: {SRC_LANG}, {TGT_LANG}, {QUERY}, {MASK}. Few-shot bodies wrap the
/// per-example unit in [[ ]]; inside it {EX_SRC} and {EX_TGT} name the example
/// pair, and the unit is repeated once per in-context example.
struct Template {
  int id = 0;
  TemplateStyle style = TemplateStyle::GptStyle;
  ShotKind shot_kind = ShotKind::ZeroShot;
  std::string body;
};

/// Throws std::invalid_argument when the body breaks the slot rules for its
/// style and shot kind.
void validate_template(const Template& t);

struct IclExample {
  std::string source;
  std::string target;
  std::optional<std::size_t> source_rank;

  friend bool operator==(const IclExample&, const IclExample&) = default;
};

enum class SelectionMode { Nearest, Random, None };

std::string_view to_string(SelectionMode m);
SelectionMode parse_selection_mode(std::string_view s);

/// How the examples of a prompt were obtained.
enum class Provenance {
  None,               // zero-shot
  Nearest,            // cosine neighbours of the query
  Random,             // seeded uniform sample
  FrequencyFallback,  // query had no embedding; most frequent seed sources
};

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

inline constexpr std::string_view kMt5MaskToken = "<extra_id_0>";

struct PromptConfig {
  std::size_t n_shots = 5;
  SelectionMode selection = SelectionMode::Nearest;
  std::uint64_t random_seed = 0;
  std::string mask_token = "<mask>";
  /// Fail instead of returning fewer than n_shots examples.
  bool strict = false;
  LanguageTable languages = LanguageTable::defaults();

  /// Checks the config on its own and against the template it will fill.
  /// Throws ConfigError.
  void validate(const Template& t) const;
};

struct PromptInstance {
  std::size_t id = 0;
  int template_id = 0;
  LanguagePair pair;
  std::string query;
  std::vector<IclExample> examples;
  std::string rendered;
  std::optional<std::string> mask_token;
  Provenance provenance = Provenance::None;
  /// Examples asked for; differs from examples.size() only when the seed
  /// dictionary ran short.
  std::size_t requested_shots = 0;
};

/// Fills every slot of `t`. Throws SlotMismatch when a few-shot template gets
/// no examples or a zero-shot template gets some.
PromptInstance render(const Template& t, const LanguagePair& pair, std::string_view query,
                      std::vector<IclExample> examples, const PromptConfig& cfg);

}  // namespace bli
