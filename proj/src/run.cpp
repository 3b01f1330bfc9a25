// Copyright 2026 The Linkforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "linkforge/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "linkforge/errors.hpp"
#include "linkforge/hash.hpp"
#include "linkforge/pipeline.hpp"

namespace linkforge::run {

namespace {

using nlohmann::json;
namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys{
    {"run", {"seed", "workers", "out_dir", "stages"}},
    {"ingest", {"snapshot_a", "snapshot_b", "lang", "window"}},
    {"diff", {"histories", "jaccard_threshold", "max_trim_tokens"}},
    {"candidates", {"negatives", "window"}},
    {"augment", {"weights", "epoch"}},
    {"rank", {"methods", "scorer_cmd", "timeout_ms", "k1", "b", "stopwords"}},
    {"eval", {"k", "iterations"}},
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T number(const std::string& where, const std::string& text) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) throw ConfigError(where + ": bad value '" + text + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (text.find('-') != std::string::npos) throw ConfigError(where + ": bad value '" + text + "'");
  }
  return value;
}

std::string hash_path(const fs::path& path) {
  if (fs::is_regular_file(path)) return sha256_file(path);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& f : files) listing += fs::relative(f, path).generic_string() + '\t' + sha256_file(f) + '\n';
  return sha256_hex(listing);
}

struct Stage {
  std::string name;
  json params;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::function<void()> action;
};

std::string label(const fs::path& p, const RunConfig& c) {
  auto rel = p.lexically_relative(c.out_dir);
  if (!rel.empty() && *rel.begin() != "..") return "$out/" + rel.generic_string();
  return p.lexically_relative(c.base_dir).generic_string();
}

json file_list(const std::vector<fs::path>& paths, const RunConfig& c) {
  json out = json::array();
  for (const auto& p : paths) out.push_back({{"path", label(p, c)}, {"sha256", hash_path(p)}});
  return out;
}

std::vector<Stage> plan(const RunConfig& c) {
  auto o = [&](const std::string& name) { return c.out_dir / name; };
  const std::uint64_t seed = c.seed;
  const std::size_t workers = c.workers;
  std::vector<Stage> stages;

  stages.push_back({"ingest",
                    {{"lang", c.lang}, {"window", c.context_window}},
                    {c.snapshot_a, c.snapshot_b},
                    {o("a.articles.ndjson"), o("a.links.ndjson"), o("b.articles.ndjson"), o("b.links.ndjson")},
                    [=] {
                      pipeline::IngestOptions opt{"a", c.lang, c.context_window, workers};
                      pipeline::ingest_dir(c.snapshot_a, o("a.articles.ndjson"), o("a.links.ndjson"), opt);
                      opt.snapshot = "b";
                      pipeline::ingest_dir(c.snapshot_b, o("b.articles.ndjson"), o("b.links.ndjson"), opt);
                    }});

  stages.push_back({"diff",
                    {{"lang", c.lang},
                     {"window", c.context_window},
                     {"jaccard_threshold", c.classify.jaccard_threshold},
                     {"max_trim_tokens", c.classify.max_trim_tokens}},
                    {o("a.links.ndjson"), o("b.links.ndjson"), c.histories},
                    {o("added.events.ndjson"), o("before.articles.ndjson")},
                    [=] {
                      pipeline::DiffOptions opt{c.histories, c.lang, c.context_window, c.classify, workers};
                      pipeline::diff_snapshots(o("a.links.ndjson"), o("b.links.ndjson"), o("added.events.ndjson"),
                                               o("before.articles.ndjson"), opt);
                    }});

  stages.push_back({"candidates",
                    {{"negatives", c.negatives}, {"window", c.window}, {"seed", seed}},
                    {o("a.links.ndjson"), o("a.articles.ndjson"), o("added.events.ndjson"), o("before.articles.ndjson")},
                    {o("train.examples.ndjson"), o("eval.examples.ndjson"), o("eval.missing_section.ndjson")},
                    [=] {
                      pipeline::CandidateOptions opt;
                      opt.example = {candidates::Mode::kTrain, c.negatives, c.window, seed};
                      opt.mentions = o("a.links.ndjson");
                      opt.workers = workers;
                      pipeline::candidates_from_links(o("a.links.ndjson"), o("a.articles.ndjson"),
                                                      o("train.examples.ndjson"), opt);
                      opt.example.mode = candidates::Mode::kEval;
                      pipeline::candidates_from_events(o("added.events.ndjson"), o("before.articles.ndjson"),
                                                       o("eval.examples.ndjson"), o("eval.missing_section.ndjson"),
                                                       opt);
                    }});

  stages.push_back({"augment",
                    {{"weights", c.weights.p}, {"epoch", c.epoch}, {"seed", seed}},
                    {o("train.examples.ndjson")},
                    {o("train.augmented.ndjson")},
                    [=] {
                      pipeline::augment_file(o("train.examples.ndjson"), o("train.augmented.ndjson"),
                                             {c.weights, seed, c.epoch, workers});
                    }});

  std::vector<fs::path> rankings;
  for (const auto& m : c.methods) rankings.push_back(o("rankings." + m + ".ndjson"));
  std::vector<fs::path> rank_inputs{o("eval.examples.ndjson")};
  if (c.stopwords) rank_inputs.push_back(*c.stopwords);
  stages.push_back({"rank",
                    {{"methods", c.methods},
                     {"seed", seed},
                     {"k1", c.bm25.k1},
                     {"b", c.bm25.b},
                     {"scorer_cmd", c.scorer_cmd},
                     {"timeout_ms", c.timeout.count()}},
                    rank_inputs,
                    rankings,
                    [=] {
                      std::size_t failed = 0;
                      for (std::size_t i = 0; i < c.methods.size(); ++i) {
                        pipeline::RankOptions opt;
                        opt.method = c.methods[i];
                        opt.seed = seed;
                        opt.bm25 = c.bm25;
                        opt.stopwords = c.stopwords;
                        opt.scorer_cmd = c.scorer_cmd;
                        opt.timeout = c.timeout;
                        opt.workers = workers;
                        failed += pipeline::rank_file(o("eval.examples.ndjson"), rankings[i], opt).failed.size();
                      }
                      if (failed > 0) throw ProtocolError(std::to_string(failed) + " examples failed to score");
                    }});

  std::vector<fs::path> eval_inputs{o("eval.examples.ndjson")};
  eval_inputs.insert(eval_inputs.end(), rankings.begin(), rankings.end());
  stages.push_back({"eval",
                    {{"k", c.k ? json(*c.k) : json()}, {"iterations", c.iterations}, {"seed", seed}},
                    eval_inputs,
                    {o("report.ndjson"), o("report.txt")},
                    [=] {
                      auto out = pipeline::evaluate_files(rankings, o("eval.examples.ndjson"),
                                                          {c.k, c.iterations, seed, workers});
                      std::ofstream(o("report.ndjson"), std::ios::binary) << out.ndjson;
                      std::ofstream(o("report.txt"), std::ios::binary) << out.table;
                    }});

  std::vector<Stage> declared;
  for (auto& s : stages) {
    if (std::find(c.stages.begin(), c.stages.end(), s.name) != c.stages.end()) declared.push_back(std::move(s));
  }
  return declared;
}

json load_previous(const fs::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) return json::object();
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return json::object();
  }
}

bool outputs_intact(const json& recorded, const Stage& stage, const RunConfig& c) {
  if (!recorded.is_array() || recorded.size() != stage.outputs.size()) return false;
  for (std::size_t i = 0; i < stage.outputs.size(); ++i) {
    const auto& p = stage.outputs[i];
    if (!fs::exists(p) || recorded[i].value("path", "") != label(p, c) ||
        recorded[i].value("sha256", "") != hash_path(p)) {
      return false;
    }
  }
  return true;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write", path.string());
  out << text;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  RunConfig c;
  c.base_dir = fs::absolute(path).parent_path();
  for (const auto& [section, body] : tree) {
    auto known = kKeys.find(section);
    if (known == kKeys.end()) throw ConfigError(path.string() + ": unknown section [" + section + "]");
    for (const auto& [k, v] : body) {
      if (!known->second.count(k)) throw ConfigError(path.string() + ": unknown key " + section + "." + k);
    }
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return *v;
  };
  auto resolve = [&](const std::string& p) { return (c.base_dir / p).lexically_normal(); };

  if (auto v = get("run.seed")) c.seed = number<std::uint64_t>("run.seed", *v);
  if (auto v = get("run.workers")) c.workers = number<std::size_t>("run.workers", *v);
  if (auto v = get("run.out_dir")) c.out_dir = *v;
  c.out_dir = resolve(c.out_dir.string());
  if (auto v = get("run.stages")) {
    c.stages = split_list(*v);
    for (const auto& s : c.stages) {
      if (std::find(kStages.begin(), kStages.end(), s) == kStages.end()) {
        throw ConfigError(path.string() + ": unknown stage '" + s + "'");
      }
    }
  }
  if (auto v = get("ingest.snapshot_a")) c.snapshot_a = resolve(*v);
  if (auto v = get("ingest.snapshot_b")) c.snapshot_b = resolve(*v);
  if (auto v = get("ingest.lang")) c.lang = *v;
  if (auto v = get("ingest.window")) c.context_window = number<std::size_t>("ingest.window", *v);
  if (auto v = get("diff.histories")) c.histories = resolve(*v);
  if (auto v = get("diff.jaccard_threshold")) c.classify.jaccard_threshold = number<double>("diff.jaccard_threshold", *v);
  if (auto v = get("diff.max_trim_tokens")) c.classify.max_trim_tokens = number<std::size_t>("diff.max_trim_tokens", *v);
  if (auto v = get("candidates.negatives")) c.negatives = number<std::size_t>("candidates.negatives", *v);
  if (auto v = get("candidates.window")) c.window = number<std::size_t>("candidates.window", *v);
  if (auto v = get("augment.weights")) {
    try {
      c.weights = augment::RemovalWeights::parse(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("augment.weights: ") + e.what());
    }
  }
  if (auto v = get("augment.epoch")) c.epoch = number<std::uint64_t>("augment.epoch", *v);
  if (auto v = get("rank.methods")) c.methods = split_list(*v);
  if (auto v = get("rank.scorer_cmd")) c.scorer_cmd = *v;
  if (auto v = get("rank.timeout_ms")) c.timeout = std::chrono::milliseconds(number<std::size_t>("rank.timeout_ms", *v));
  if (auto v = get("rank.k1")) c.bm25.k1 = number<double>("rank.k1", *v);
  if (auto v = get("rank.b")) c.bm25.b = number<double>("rank.b", *v);
  if (auto v = get("rank.stopwords")) c.stopwords = resolve(*v);
  if (auto v = get("eval.k")) c.k = number<std::size_t>("eval.k", *v);
  if (auto v = get("eval.iterations")) c.iterations = number<std::size_t>("eval.iterations", *v);

  for (const auto& m : c.methods) {
    if (m != "random" && m != "string_match" && m != "bm25" && m != "external") {
      throw ConfigError(path.string() + ": unknown method '" + m + "'");
    }
    if (m == "external" && c.scorer_cmd.empty()) throw ConfigError(path.string() + ": external needs rank.scorer_cmd");
  }
  try {
    c.bm25.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rank: ") + e.what());
  }
  if (c.workers == 0) c.workers = 1;
  return c;
}

RunResult run_pipeline(const RunConfig& config) {
  auto stages = plan(config);

  // Every input must exist now or be produced by an earlier declared stage.
  std::set<fs::path> produced;
  for (const auto& s : stages) {
    for (const auto& in : s.inputs) {
      if (in.empty()) throw ConfigError("stage " + s.name + ": input path not configured");
      if (!produced.count(in) && !fs::exists(in)) throw DataError("missing input", in.string());
    }
    produced.insert(s.outputs.begin(), s.outputs.end());
  }

  fs::create_directories(config.out_dir);
  const fs::path manifest_path = config.out_dir / "manifest.json";
  json previous = load_previous(manifest_path);
  std::map<std::string, json> previous_stages;
  if (previous.contains("stages") && previous["stages"].is_array()) {
    for (const auto& s : previous["stages"]) previous_stages[s.value("stage", "")] = s;
  }

  json manifest{{"schema", "linkforge/v1"}, {"kind", "manifest"}, {"seed", config.seed}, {"stages", json::array()}};
  json timing{{"stages", json::array()}};
  RunResult result;
  result.manifest = manifest_path;
  auto flush = [&] {
    write_text(manifest_path, manifest.dump(2) + "\n");
    write_text(config.out_dir / "manifest.timing.json", timing.dump(2) + "\n");
  };

  for (const auto& stage : stages) {
    auto t0 = std::chrono::steady_clock::now();
    json entry{{"stage", stage.name}, {"params", stage.params}, {"inputs", file_list(stage.inputs, config)}};
    auto prev = previous_stages.find(stage.name);
    bool cached = prev != previous_stages.end() && prev->second.value("params", json()) == entry["params"] &&
                  prev->second.value("inputs", json()) == entry["inputs"] &&
                  outputs_intact(prev->second.value("outputs", json()), stage, config);
    if (cached) {
      pipeline::log(stage.name, "cached");
    } else {
      pipeline::log(stage.name, "start");
      try {
        stage.action();
      } catch (const std::exception& e) {
        pipeline::log(stage.name, "failed", {{"error", e.what()}});
        flush();
        throw;
      }
    }
    entry["outputs"] = file_list(stage.outputs, config);
    entry["cached"] = cached;
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["stages"].push_back(entry);
    timing["stages"].push_back({{"stage", stage.name}, {"cached", cached}, {"seconds", seconds}});
    result.stages.push_back({stage.name, cached, seconds});
  }
  flush();
  return result;
}

}  // namespace linkforge::run
