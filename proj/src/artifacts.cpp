#include "bli/artifacts.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "bli/errors.hpp"
#include "bli/text.hpp"

namespace bli {

using nlohmann::json;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

namespace {

template <class Fn>
void for_each_record(std::istream& in, const char* what, Fn&& fn) {
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::trim(line).empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw SchemaMismatch(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw SchemaMismatch(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw SchemaMismatch(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

void write_prompts_jsonl(std::ostream& out, std::span<const PromptInstance> prompts) {
  for (const auto& p : prompts) {
    json ex = json::array();
    for (const auto& e : p.examples)
      ex.push_back({{"source", e.source},
                    {"target", e.target},
                    {"source_rank", e.source_rank ? json(*e.source_rank) : json(nullptr)}});
    json j = {{"id", p.id},
              {"template_id", p.template_id},
              {"src", p.pair.src},
              {"tgt", p.pair.tgt},
              {"query", p.query},
              {"examples", ex},
              {"rendered", p.rendered},
              {"mask_token", p.mask_token ? json(*p.mask_token) : json(nullptr)},
              {"provenance", to_string(p.provenance)},
              {"requested_shots", p.requested_shots}};
    out << j.dump() << '\n';
  }
}

std::vector<PromptInstance> read_prompts_jsonl(std::istream& in, const LanguageTable& table) {
  std::vector<PromptInstance> out;
  for_each_record(in, "prompts", [&](const json& j) {
    PromptInstance p;
    p.id = j.at("id").get<std::size_t>();
    p.template_id = j.at("template_id").get<int>();
    p.pair = LanguagePair::make(j.at("src").get<std::string>(), j.at("tgt").get<std::string>(), table);
    p.query = j.at("query").get<std::string>();
    for (const auto& e : j.at("examples")) {
      IclExample ex{e.at("source").get<std::string>(), e.at("target").get<std::string>(), std::nullopt};
      if (!e.at("source_rank").is_null()) ex.source_rank = e["source_rank"].get<std::size_t>();
      p.examples.push_back(std::move(ex));
    }
    p.rendered = j.at("rendered").get<std::string>();
    if (!j.at("mask_token").is_null()) p.mask_token = j["mask_token"].get<std::string>();
    p.provenance = parse_provenance(j.at("provenance").get<std::string>());
    p.requested_shots = j.value("requested_shots", p.examples.size());
    out.push_back(std::move(p));
  });
  return out;
}

void write_beams_jsonl(std::ostream& out, std::span<const PromptInstance> prompts,
                       std::span<const BeamResult> beams) {
  if (prompts.size() != beams.size())
    throw MalformedResponse(std::to_string(beams.size()) + " beam results for " + std::to_string(prompts.size()) +
                            " prompts");
  for (std::size_t i = 0; i < beams.size(); ++i) {
    json seqs = json::array();
    for (const auto& b : beams[i].sequences) seqs.push_back({{"text", b.text}, {"score", b.score}});
    out << json{{"id", prompts[i].id}, {"query", prompts[i].query}, {"sequences", seqs}}.dump() << '\n';
  }
}

std::vector<BeamResult> read_beams_jsonl(std::istream& in) {
  std::vector<BeamResult> out;
  for_each_record(in, "beams", [&](const json& j) {
    BeamResult r;
    for (const auto& s : j.at("sequences"))
      r.sequences.push_back({s.at("text").get<std::string>(), s.at("score").get<double>()});
    out.push_back(std::move(r));
  });
  return out;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  json j = {{"format", "bli-run-manifest"},
            {"version", 1},
            {"complete", m.complete},
            {"error", m.error ? json(*m.error) : json(nullptr)},
            {"stage", m.stage},
            {"files", m.files},
            {"backend", m.backend},
            {"template_id", m.template_id},
            {"pair", m.pair}};
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    auto j = json::parse(ss.str());
    if (j.value("format", "") != "bli-run-manifest") throw SchemaMismatch("not a run manifest");
    Manifest m;
    m.complete = j.at("complete").get<bool>();
    if (!j.at("error").is_null()) m.error = j["error"].get<std::string>();
    m.stage = j.at("stage").get<std::string>();
    m.files = j.at("files").get<std::vector<std::string>>();
    m.backend = j.value("backend", "");
    m.template_id = j.value("template_id", 0);
    m.pair = j.value("pair", "");
    return m;
  } catch (const json::exception& e) {
    throw SchemaMismatch("manifest: " + std::string(e.what()));
  }
}

}  // namespace bli
