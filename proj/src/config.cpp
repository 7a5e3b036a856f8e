#include "bli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "bli/errors.hpp"
#include "bli/extraction.hpp"
#include "bli/text.hpp"

namespace bli {

namespace fs = std::filesystem;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

EnvLookup no_env() {
  return [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "src", "tgt", "src_embeddings", "tgt_embeddings", "seed", "test", "languages_file", "trim",
      "preset", "template", "zero_shot_template", "few_shot_template", "model_family",
      "n_shots", "selection", "random_seed", "mask_token", "strict",
      "beam_size", "max_new_tokens", "num_return_sequences", "echo_input",
      "ks", "special_tokens",
      "backend", "backend_url", "backend_token", "chunk_size", "max_in_flight", "retries", "backoff_ms",
      "output_dir"};
  return keys;
}

std::string default_mask_token(std::string_view model_family) {
  const auto f = canonical_model_family(model_family);
  if (text::starts_with(f, "mt5") || text::starts_with(f, "mt0")) return std::string(kMt5MaskToken);
  return "<mask>";
}

bool default_echo_input(std::string_view model_family) {
  const auto f = canonical_model_family(model_family);
  return text::starts_with(f, "xglm") || text::starts_with(f, "mgpt") || text::starts_with(f, "llama");
}

// --- parsing --------------------------------------------------------------

ConfigValues parse_config_values(std::istream& in) {
  ConfigValues out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view s = text::trim(line);
    bool quoted = false;
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key(text::trim(s.substr(0, eq)));
    std::string_view value = text::trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"') {
      auto close = value.find('"', 1);
      if (close == std::string_view::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated quote");
      value = value.substr(1, close - 1);
      quoted = true;
    }
    if (!quoted) {
      auto h = value.find('#');
      if (h != std::string_view::npos) value = text::trim(value.substr(0, h));
    }
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = std::string(value);
  }
  return out;
}

namespace {

std::string env_name(const std::string& key) {
  std::string out = "BLI_";
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = text::to_lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    auto comma = v.find(',', start);
    if (comma == std::string::npos) comma = v.size();
    auto piece = text::trim(std::string_view(v).substr(start, comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = comma + 1;
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& v) {
  fs::path p(v);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

RunConfig build_config(ConfigValues values, const EnvLookup& env, const fs::path& base_dir) {
  const auto& keys = config_keys();
  for (const auto& [k, v] : values)
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key '" + k + "'");
  fs::path env_base;  // environment paths are taken relative to the working directory
  std::map<std::string, fs::path> bases;
  for (const auto& k : keys) {
    bases[k] = base_dir;
    if (auto v = env(env_name(k))) {
      values[k] = *v;
      bases[k] = env_base;
    }
  }

  auto get = [&](const std::string& k) -> const std::string* {
    auto it = values.find(k);
    return it == values.end() ? nullptr : &it->second;
  };
  auto path_of = [&](const std::string& k) { return resolve(bases[k], *get(k)); };

  RunConfig cfg;
  if (auto v = get("preset")) cfg.apply_preset(*v);

  if (auto v = get("src")) cfg.src = *v;
  if (auto v = get("tgt")) cfg.tgt = *v;
  if (get("src_embeddings")) cfg.src_embeddings = path_of("src_embeddings");
  if (get("tgt_embeddings")) cfg.tgt_embeddings = path_of("tgt_embeddings");
  if (get("seed") && !get("seed")->empty()) cfg.seed_lexicon = path_of("seed");
  if (get("test")) cfg.test_lexicon = path_of("test");
  if (get("languages_file")) cfg.languages_file = path_of("languages_file");
  if (auto v = get("trim")) cfg.trim = to_size("trim", *v);

  if (auto v = get("template")) cfg.template_id = to_int("template", *v);
  if (auto v = get("zero_shot_template")) cfg.zero_shot_template = to_int("zero_shot_template", *v);
  if (auto v = get("few_shot_template")) cfg.few_shot_template = to_int("few_shot_template", *v);
  if (auto v = get("model_family")) cfg.model_family = canonical_model_family(*v);

  if (auto v = get("n_shots")) cfg.prompt.n_shots = to_size("n_shots", *v);
  if (auto v = get("selection")) cfg.prompt.selection = parse_selection_mode(*v);
  if (auto v = get("random_seed")) cfg.prompt.random_seed = to_size("random_seed", *v);
  cfg.prompt.mask_token = get("mask_token") ? *get("mask_token") : default_mask_token(cfg.model_family);
  if (auto v = get("strict")) cfg.prompt.strict = to_bool("strict", *v);

  if (auto v = get("beam_size")) {
    cfg.generation.beam_size = to_size("beam_size", *v);
    cfg.generation.num_return_sequences = cfg.generation.beam_size;
  }
  if (auto v = get("max_new_tokens")) cfg.generation.max_new_tokens = to_size("max_new_tokens", *v);
  if (auto v = get("num_return_sequences"))
    cfg.generation.num_return_sequences = to_size("num_return_sequences", *v);
  cfg.generation.echo_input =
      get("echo_input") ? to_bool("echo_input", *get("echo_input")) : default_echo_input(cfg.model_family);

  if (auto v = get("ks")) {
    cfg.eval.ks.clear();
    for (const auto& k : to_list(*v)) cfg.eval.ks.push_back(to_size("ks", k));
  }
  if (auto v = get("special_tokens")) cfg.special_tokens = to_list(*v);

  if (auto v = get("backend")) cfg.backend = *v;
  if (auto v = get("backend_url")) cfg.http.url = *v;
  if (auto v = get("backend_token")) cfg.http.token = *v;
  if (auto v = get("chunk_size")) cfg.http.chunk_size = to_size("chunk_size", *v);
  if (auto v = get("max_in_flight")) cfg.http.max_in_flight = to_size("max_in_flight", *v);
  if (auto v = get("retries")) cfg.http.max_retries = to_size("retries", *v);
  if (auto v = get("backoff_ms")) cfg.http.backoff = std::chrono::milliseconds(to_size("backoff_ms", *v));

  if (get("output_dir")) cfg.output_dir = path_of("output_dir");
  return cfg;
}

RunConfig load_config(const fs::path& path, const EnvLookup& env) { return load_config(path, {}, env); }

RunConfig load_config(const fs::path& path, const std::vector<std::string>& overrides, const EnvLookup& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  auto values = parse_config_values(in);
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not key=value");
    values[std::string(text::trim(std::string_view(o).substr(0, eq)))] =
        std::string(text::trim(std::string_view(o).substr(eq + 1)));
  }
  return build_config(std::move(values), env, path.parent_path());
}

// --- RunConfig --------------------------------------------------------------

void RunConfig::apply_preset(std::string_view name) {
  if (name == "5k" || name == "1k") {
    prompt.n_shots = 5;
    prompt.selection = SelectionMode::Nearest;
  } else if (name == "zero-shot" || name == "0k") {
    prompt.n_shots = 0;
    prompt.selection = SelectionMode::None;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (5k|1k|zero-shot)");
  }
}

const Template& RunConfig::resolve_template(const TemplateCatalog& catalog) const {
  if (template_id) return catalog.get(*template_id);
  const bool few = prompt.n_shots > 0;
  if (few && few_shot_template) return catalog.get(*few_shot_template);
  if (!few && zero_shot_template) return catalog.get(*zero_shot_template);
  if (model_family.empty())
    throw ConfigError("set 'template', '" + std::string(few ? "few" : "zero") +
                      "_shot_template' or 'model_family'");
  return best_template(model_family, few ? ShotKind::FewShot : ShotKind::ZeroShot, catalog);
}

std::vector<std::string> RunConfig::special_token_list() const {
  return special_tokens ? *special_tokens : special_token_profile(model_family);
}

LanguageTable RunConfig::language_table() const {
  LanguageTable table = prompt.languages;
  if (languages_file) table.load_overrides(*languages_file);
  return table;
}

void RunConfig::validate(const TemplateCatalog& catalog) const {
  if (src.empty() || tgt.empty()) throw ConfigError("'src' and 'tgt' are required");
  try {
    LanguagePair::make(src, tgt, language_table());
  } catch (const UnsupportedLanguage& e) {
    throw ConfigError(e.what());
  }
  if (trim == 0) throw ConfigError("'trim' must be >= 1");
  prompt.validate(resolve_template(catalog));
  generation.validate();
  eval.validate();
  if (prompt.n_shots > 0 && !seed_lexicon) throw ConfigError("few-shot runs need a 'seed' lexicon");
  const bool known_backend = backend == "mock-oracle" || text::starts_with(backend, "mock-oracle:") ||
                             backend == "mock-junk" || backend == "mock-echo" || backend == "http";
  if (!known_backend) throw ConfigError("unknown backend '" + backend + "'");
  if (backend == "http" && http.url.empty()) throw ConfigError("http backend needs 'backend_url' or BLI_BACKEND_URL");
}

void RunConfig::check_files() const {
  auto need = [](const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("'") + what + "' is required");
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " file not found: " + p.string());
  };
  need(src_embeddings, "src_embeddings");
  need(tgt_embeddings, "tgt_embeddings");
  need(test_lexicon, "test");
  if (seed_lexicon) need(*seed_lexicon, "seed");
  if (languages_file) need(*languages_file, "languages_file");
}

}  // namespace bli
