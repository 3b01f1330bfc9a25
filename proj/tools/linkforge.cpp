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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "linkforge/errors.hpp"
#include "linkforge/pipeline.hpp"
#include "linkforge/run.hpp"
#include "linkforge/stats.hpp"

namespace fs = std::filesystem;
using namespace linkforge;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kProtocol = 3 };

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write", path);
  out << text;
}

// Takes `value` from the config unless the flag was given.
template <typename T>
void inherit(const CLI::Option* flag, T& value, const T& from_config) {
  if (flag->count() == 0) value = from_config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linkforge: entity insertion data pipeline and baselines"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::uint64_t seed = 13;
  std::size_t workers = 1;
  std::string config_path;
  bool quiet = false;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every stochastic stage")->capture_default_str();
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", config_path, "Pipeline config (INI); supplies defaults for stage knobs")
      ->check(CLI::ExistingFile);
  app.add_flag("--quiet", quiet, "No log lines on stderr");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse article markup into articles and existing links");
  std::string ing_snapshot, ing_in, ing_out, ing_links, ing_lang = "en";
  std::size_t ing_window = 5;
  ingest->add_option("--snapshot", ing_snapshot, "Snapshot label")->required();
  ingest->add_option("--in", ing_in, "Directory of *.xml article files")->required();
  ingest->add_option("--out", ing_out, "Articles output")->required();
  ingest->add_option("--links", ing_links, "Links output")->required();
  auto* ing_lang_opt = ingest->add_option("--lang", ing_lang, "Language for articles without lang attribute");
  auto* ing_window_opt = ingest->add_option("--window", ing_window, "Context sentences on each side of a link");

  // diff
  auto* diff = app.add_subcommand("diff", "Detect added links and classify their insertion scenario");
  std::string d_a, d_b, d_hist, d_out, d_before, d_lang = "en";
  std::size_t d_window = 5, d_trim = 3;
  double d_jaccard = 0.5;
  diff->add_option("--snap-a", d_a, "Links of the older snapshot")->required();
  diff->add_option("--snap-b", d_b, "Links of the newer snapshot")->required();
  diff->add_option("--histories", d_hist, "Directory of *.history files")->required();
  diff->add_option("--out", d_out, "Events output")->required();
  diff->add_option("--before-articles", d_before, "Before-version articles output");
  auto* d_lang_opt = diff->add_option("--lang", d_lang, "Default language");
  auto* d_window_opt = diff->add_option("--window", d_window, "Context sentences on each side of a link");
  auto* d_jaccard_opt = diff->add_option("--jaccard", d_jaccard, "missing_mention similarity threshold");
  auto* d_trim_opt = diff->add_option("--max-trim", d_trim, "Tokens trimmed around the mention");

  // candidates
  auto* cand = app.add_subcommand("candidates", "Build ranking examples");
  std::string c_events, c_links, c_articles, c_mentions, c_out, c_side, c_mode = "eval";
  std::size_t c_neg = 9, c_window = 5;
  auto* c_events_opt = cand->add_option("--events", c_events, "Added-link events");
  auto* c_links_opt = cand->add_option("--existing-links", c_links, "Existing links (training examples)");
  c_events_opt->excludes(c_links_opt);
  cand->add_option("--articles", c_articles, "Articles holding the candidates")->required();
  cand->add_option("--mentions", c_mentions, "Links file giving previously used mentions");
  cand->add_option("--mode", c_mode, "train or eval")->check(CLI::IsMember({"train", "eval"}));
  auto* c_neg_opt = cand->add_option("--negatives", c_neg, "Negatives per example in train mode");
  auto* c_window_opt = cand->add_option("--window", c_window, "Span window W");
  cand->add_option("--out", c_out, "Examples output")->required();
  cand->add_option("--missing-section-out", c_side, "Where missing_section events go");

  // augment
  auto* aug = app.add_subcommand("augment", "Dynamic context removal on training examples");
  std::string a_in, a_out, a_weights = "0.4,0.2,0.3,0.1";
  std::uint64_t a_epoch = 0;
  aug->add_option("--in", a_in, "Examples")->required();
  aug->add_option("--out", a_out, "Augmented output")->required();
  auto* a_weights_opt = aug->add_option("--weights", a_weights, "rm_nth,rm_mention,rm_sent,rm_span");
  auto* a_epoch_opt = aug->add_option("--epoch", a_epoch, "Epoch mixed into each example's generator");

  // rank
  auto* rank = app.add_subcommand("rank", "Rank candidates with a baseline or an external scorer");
  std::string r_method, r_cmd, r_in, r_out, r_stop;
  double r_k1 = 1.5, r_b = 0.75;
  std::size_t r_timeout = 60000;
  rank->add_option("--method", r_method, "random, string_match, bm25 or external")
      ->required()
      ->check(CLI::IsMember({"random", "string_match", "bm25", "external"}));
  auto* r_cmd_opt = rank->add_option("--scorer-cmd", r_cmd, "External scorer command");
  auto* r_timeout_opt = rank->add_option("--timeout-ms", r_timeout, "Per-request scorer timeout");
  rank->add_option("--in", r_in, "Examples")->required();
  rank->add_option("--out", r_out, "Rankings output")->required();
  auto* r_k1_opt = rank->add_option("--k1", r_k1, "BM25 k1");
  auto* r_b_opt = rank->add_option("--b", r_b, "BM25 b");
  auto* r_stop_opt = rank->add_option("--stopwords", r_stop, "BM25 stopword list");

  // eval
  auto* ev = app.add_subcommand("eval", "Hits@1 and MRR per language and bucket");
  std::vector<std::string> e_rankings;
  std::string e_examples, e_out, e_format = "table";
  std::size_t e_k = 0, e_iter = 1000;
  ev->add_option("--rankings", e_rankings, "Rankings files; the first is the significance baseline")->required();
  ev->add_option("--examples", e_examples, "Examples")->required();
  ev->add_option("--out", e_out, "Report output (stdout when absent)");
  ev->add_option("--format", e_format, "table or ndjson")->check(CLI::IsMember({"table", "ndjson"}));
  auto* e_k_opt = ev->add_option("--k", e_k, "Also report Hits@k")->check(CLI::PositiveNumber);
  auto* e_iter_opt = ev->add_option("--iterations", e_iter, "Bootstrap iterations");

  // stats
  auto* st = app.add_subcommand("stats", "Scenario frequencies and candidate-count CCDF");
  std::string s_in, s_out;
  st->add_option("--in", s_in, "Articles, events or examples file")->required();
  st->add_option("--out", s_out, "Report output (stdout when absent)");

  // run
  auto* runc = app.add_subcommand("run", "Run the pipeline declared in --config");
  std::string run_out;
  runc->add_option("--out-dir", run_out, "Override the configured output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  pipeline::set_logging(!quiet);

  try {
    std::optional<run::RunConfig> cfg;
    if (!config_path.empty()) cfg = run::load_config(config_path);
    if (cfg) {
      inherit(seed_opt, seed, cfg->seed);
      inherit(workers_opt, workers, cfg->workers);
    }

    if (*ingest) {
      if (cfg) {
        inherit(ing_lang_opt, ing_lang, cfg->lang);
        inherit(ing_window_opt, ing_window, cfg->context_window);
      }
      pipeline::ingest_dir(ing_in, ing_out, ing_links, {ing_snapshot, ing_lang, ing_window, workers});
    } else if (*diff) {
      if (cfg) {
        inherit(d_lang_opt, d_lang, cfg->lang);
        inherit(d_window_opt, d_window, cfg->context_window);
        inherit(d_jaccard_opt, d_jaccard, cfg->classify.jaccard_threshold);
        inherit(d_trim_opt, d_trim, cfg->classify.max_trim_tokens);
      }
      pipeline::DiffOptions opt{d_hist, d_lang, d_window, {d_jaccard, d_trim}, workers};
      std::optional<fs::path> before;
      if (!d_before.empty()) before = d_before;
      pipeline::diff_snapshots(d_a, d_b, d_out, before, opt);
    } else if (*cand) {
      if (c_events.empty() && c_links.empty()) throw ConfigError("candidates needs --events or --existing-links");
      if (cfg) {
        inherit(c_neg_opt, c_neg, cfg->negatives);
        inherit(c_window_opt, c_window, cfg->window);
      }
      pipeline::CandidateOptions opt;
      opt.example = {c_mode == "train" ? candidates::Mode::kTrain : candidates::Mode::kEval, c_neg, c_window, seed};
      if (!c_mentions.empty()) opt.mentions = c_mentions;
      opt.workers = workers;
      if (!c_events.empty()) {
        std::optional<fs::path> side;
        if (!c_side.empty()) side = c_side;
        pipeline::candidates_from_events(c_events, c_articles, c_out, side, opt);
      } else {
        pipeline::candidates_from_links(c_links, c_articles, c_out, opt);
      }
    } else if (*aug) {
      augment::RemovalWeights weights;
      std::uint64_t epoch = a_epoch;
      if (cfg) {
        weights = cfg->weights;
        inherit(a_epoch_opt, epoch, cfg->epoch);
      }
      if (a_weights_opt->count() > 0 || !cfg) {
        try {
          weights = augment::RemovalWeights::parse(a_weights);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("--weights: ") + e.what());
        }
      }
      pipeline::augment_file(a_in, a_out, {weights, seed, epoch, workers});
    } else if (*rank) {
      pipeline::RankOptions opt;
      opt.method = r_method;
      opt.seed = seed;
      opt.workers = workers;
      if (cfg) {
        inherit(r_k1_opt, r_k1, cfg->bm25.k1);
        inherit(r_b_opt, r_b, cfg->bm25.b);
        inherit(r_cmd_opt, r_cmd, cfg->scorer_cmd);
        inherit(r_timeout_opt, r_timeout, static_cast<std::size_t>(cfg->timeout.count()));
        if (r_stop_opt->count() == 0 && cfg->stopwords) r_stop = cfg->stopwords->string();
      }
      opt.bm25 = {r_k1, r_b};
      try {
        opt.bm25.check();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (!r_stop.empty()) opt.stopwords = r_stop;
      opt.scorer_cmd = r_cmd;
      opt.timeout = std::chrono::milliseconds(r_timeout);
      auto summary = pipeline::rank_file(r_in, r_out, opt);
      if (!summary.failed.empty()) {
        std::cerr << "linkforge: " << summary.failed.size() << " examples failed: " << summary.failed.front().second
                  << '\n';
        return kProtocol;
      }
    } else if (*ev) {
      pipeline::EvalOptions opt;
      if (cfg) {
        if (e_k_opt->count() == 0 && cfg->k) e_k = *cfg->k;
        inherit(e_iter_opt, e_iter, cfg->iterations);
      }
      if (e_k > 0) opt.k = e_k;
      opt.iterations = e_iter;
      opt.seed = seed;
      opt.workers = workers;
      std::vector<fs::path> paths(e_rankings.begin(), e_rankings.end());
      auto out = pipeline::evaluate_files(paths, e_examples, opt);
      write_output(e_out, e_format == "table" ? out.table : out.ndjson);
    } else if (*st) {
      write_output(s_out, stats::format_stats(stats::corpus_stats(s_in)));
    } else if (*runc) {
      if (!cfg) throw ConfigError("run needs --config");
      if (seed_opt->count() > 0) cfg->seed = seed;
      if (workers_opt->count() > 0) cfg->workers = workers;
      if (!run_out.empty()) cfg->out_dir = fs::absolute(run_out).lexically_normal();
      run::run_pipeline(*cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "linkforge: " << e.what() << '\n';
    return kUsage;
  } catch (const ProtocolError& e) {
    std::cerr << "linkforge: scorer protocol error: " << e.what() << '\n';
    return kProtocol;
  } catch (const TimeoutError& e) {
    std::cerr << "linkforge: scorer timeout: " << e.what() << '\n';
    return kProtocol;
  } catch (const Error& e) {
    std::cerr << "linkforge: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "linkforge: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "linkforge: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
