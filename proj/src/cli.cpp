//  Copyright 2026 The placevec Authors. All Rights Reserved.
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.


#include "placevec/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <stdexcept>

#include "placevec/analytics.hpp"
#include "placevec/corpus.hpp"
#include "placevec/embed.hpp"
#include "placevec/ingest.hpp"
#include "placevec/manifest.hpp"
#include "placevec/poi.hpp"
#include "placevec/reports.hpp"
#include "placevec/stops.hpp"
#include "placevec/synth.hpp"
#include "placevec/text.hpp"

namespace placevec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void note(const std::string& msg) { std::cerr << "placevec: " << msg << '\n'; }

DistanceMetric metric_of(bool plane) { return plane ? DistanceMetric::plane : DistanceMetric::haversine; }

const char* metric_name(bool plane) { return plane ? "plane" : "haversine"; }

// Values of an option as they would be passed back on a command line: the
// parsed results if given, the captured default otherwise.
std::vector<std::string> option_values(const CLI::Option& opt) {
  if (opt.count() > 0) {
    std::vector<std::string> values = opt.results();
    for (auto& v : values) {
      if (v.empty()) v = "true";
    }
    return values;
  }
  std::string d = opt.get_default_str();
  if (d.empty() && opt.get_expected_max() == 0) d = "false";
  if (d.empty()) return {};
  return {d};
}

CellLabelMap load_labels(const std::string& pois_path, const GridSpec& grid, ParseMode mode) {
  if (pois_path.empty()) return {};
  auto in = open_input(pois_path);
  PoiParseResult pois = load_pois(in, mode);
  if (pois.skipped > 0) note("skipped " + std::to_string(pois.skipped) + " malformed POI rows in " + pois_path);
  return label_cells(pois.records, grid);
}

CellId parse_target(const std::string& s, const GridSpec& grid, const EmbeddingModel& model) {
  if (s.empty() || s == "auto") {
    if (model.vocab.empty()) throw std::invalid_argument("the model has no cells");
    return model.vocab.token(0);
  }
  if (s.find(',') != std::string::npos) {
    std::vector<std::string_view> parts;
    split(s, ',', parts);
    const auto lon = parts.size() == 2 ? parse_double(parts[0]) : std::nullopt;
    const auto lat = parts.size() == 2 ? parse_double(parts[1]) : std::nullopt;
    if (!lon || !lat) throw std::invalid_argument("target '" + s + "' is neither a cell code nor lon,lat");
    return cell_of(GeoPoint{*lon, *lat}, grid);
  }
  const auto code = parse_int<std::uint64_t>(s);
  if (!code) throw std::invalid_argument("target '" + s + "' is neither a cell code nor lon,lat");
  return CellId{*code};
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

struct Command {
  CLI::App* app = nullptr;
  std::string path;
  /// Options whose values are input files; digested into the manifest.
  std::vector<std::string> inputs;
  std::function<void()> action;
  /// Manifest-writing commands own an output directory.
  std::string* out = nullptr;
};

struct SynthOptions {
  SynthConfig cfg;
  std::string out;
};

struct StopsOptions {
  std::string input, out;
  StopParams params;
  double cell_size = 30.0;
  int day_offset_hours = 0;
  bool strict = false;
  unsigned threads = 1;
};

struct IngestOptions {
  std::string input, out;
  int day_offset_hours = 0;
  bool strict = false;
};

struct CorpusOptions {
  std::string input, out;
  std::uint64_t min_count = 5;
};

struct TrainOptions {
  std::string corpus, vocab, out;
  TrainConfig cfg;
};

struct QueryOptions {
  std::string embeddings, pois, target = "auto", out;
  std::size_t k = 10;
  double cell_size = 30.0;
  bool plane = false;
};

struct CategoryOptions {
  std::string embeddings, pois, out;
  std::vector<std::string> categories;
  std::size_t sample = 300;
  std::uint64_t seed = 1;
  double cell_size = 30.0;
};

struct DecayOptions {
  std::string embeddings, out;
  std::size_t sample = 3000;
  std::uint64_t seed = 1;
  double cell_size = 30.0;
  bool plane = false, dump_pairs = false, svg = false;
  unsigned threads = 1;
};

struct VariogramOptions {
  std::string embeddings, pois, category, out;
  std::size_t sample = 200;
  std::uint64_t seed = 1;
  double cell_size = 30.0, bin_width = 1000.0, max_dist = 100000.0;
  bool plane = false, svg = false;
  unsigned threads = 1;
};

struct PipelineOptions {
  std::string input, pois, out;
};

struct ReplayOptions {
  std::string manifest, out;
};

class Cli {
 public:
  Cli();
  int run(std::vector<std::string> args);

 private:
  void add_synth();
  void add_ingest();
  void add_stops();
  void add_corpus();
  void add_train();
  void add_query();
  void add_analyze();
  void add_pipeline();
  void add_replay();

  void synth();
  void ingest();
  void stops();
  void corpus();
  void train();
  void query();
  void category_sim();
  void decay();
  void variogram();
  void pipeline();
  void replay();

  Command& command(CLI::App* app, std::string path, std::function<void()> action, std::string* out,
                   std::vector<std::string> inputs = {});
  RunManifest manifest_for(const Command& c) const;
  std::string value_of(const CLI::App* app, const std::string& name) const;

  CLI::App app_{"Place embeddings from vehicle movement traces.", "placevec"};
  std::vector<std::unique_ptr<Command>> commands_;
  CLI::App* pipeline_app_ = nullptr;

  SynthOptions synth_;
  IngestOptions ingest_;
  StopsOptions stops_;
  CorpusOptions corpus_;
  TrainOptions train_;
  QueryOptions query_;
  CategoryOptions category_;
  DecayOptions decay_;
  VariogramOptions variogram_;
  PipelineOptions pipeline_;
  SynthConfig pipeline_synth_;
  StopsOptions pipeline_stops_;
  CorpusOptions pipeline_corpus_;
  TrainConfig pipeline_train_;
  QueryOptions pipeline_query_;
  CategoryOptions pipeline_category_;
  DecayOptions pipeline_decay_;
  VariogramOptions pipeline_variogram_;
  ReplayOptions replay_;
};

Command& Cli::command(CLI::App* app, std::string path, std::function<void()> action, std::string* out,
                      std::vector<std::string> inputs) {
  auto c = std::make_unique<Command>();
  c->app = app;
  c->path = std::move(path);
  c->action = std::move(action);
  c->out = out;
  c->inputs = std::move(inputs);
  if (out) app->add_option("--out,-o", *out, "Output directory (created if missing)")->required();
  commands_.push_back(std::move(c));
  return *commands_.back();
}

// Option adders shared by the stage subcommands and the pipeline.

void synth_flags(CLI::App* app, SynthConfig& c) {
  app->add_option("--n-categories", c.n_categories, "Number of place categories")->check(CLI::PositiveNumber);
  app->add_option("--places-per-category", c.places_per_category)->check(CLI::PositiveNumber);
  app->add_option("--world-extent", c.world_extent_m, "Side of the square world in meters")->check(CLI::PositiveNumber);
  app->add_option("--agents", c.n_agents)->check(CLI::PositiveNumber);
  app->add_option("--days", c.days)->check(CLI::PositiveNumber);
  app->add_option("--activity-radius", c.agent_activity_radius_m, "Agent activity radius in meters")
      ->check(CLI::PositiveNumber);
  app->add_option("--visits-per-day", c.visits_per_day_mean, "Poisson mean of visits per agent-day");
  app->add_option("--dwell-min", c.dwell_min_minutes, "Shortest dwell in minutes");
  app->add_option("--dwell-max", c.dwell_max_minutes, "Longest dwell in minutes");
  app->add_option("--gps-noise", c.gps_noise_sigma_m, "Position noise sigma in meters");
  app->add_option("--grammar-strength", c.grammar_strength, "Weight of same-category transitions in the visit grammar");
  app->add_option("--seed", c.seed, "World and trajectory seed");
  app->add_option("--cell-size", c.cell_size, "Grid cell size in meters")->check(CLI::PositiveNumber);
}

void stop_flags(CLI::App* app, StopsOptions& o, bool with_cell_size) {
  app->add_option("--min-duration", o.params.min_duration_s, "Minimum stop duration in seconds");
  app->add_option("--radius", o.params.radius_m, "Stop radius in meters");
  app->add_option("--max-noise-run", o.params.max_noise_run, "Outliers tolerated in a row inside a stop");
  app->add_option("--day-offset-hours", o.day_offset_hours, "Shift of the day boundary from UTC midnight");
  app->add_flag("--strict", o.strict, "Fail on the first malformed row instead of skipping it");
  if (with_cell_size) app->add_option("--cell-size", o.cell_size, "Grid cell size in meters")->check(CLI::PositiveNumber);
}

void train_flags(CLI::App* app, TrainConfig& c, const std::string& seed_name) {
  app->add_option("--dim", c.dim, "Embedding dimension");
  app->add_option("--window", c.window, "Maximum context window");
  app->add_option("--negatives", c.negatives, "Negative samples per positive pair");
  app->add_option("--epochs", c.epochs);
  app->add_option("--lr-start", c.lr_start);
  app->add_option("--lr-end", c.lr_end);
  app->add_option("--unigram-power", c.unigram_power, "Exponent of the negative-sampling distribution");
  app->add_option("--subsample", c.subsample_t, "Frequent-cell subsampling threshold; 0 disables");
  app->add_option("--" + seed_name, c.seed, "Training seed");
}

Cli::Cli() {
  app_.option_defaults()->always_capture_default()->take_last();
  app_.set_version_flag("--version", kToolVersion);
  app_.require_subcommand(1);
  app_.footer(
      "Every subcommand also accepts --config FILE with flat key=value lines; keys are long option names "
      "and flags given on the command line override them.\n"
      "Exit codes: 0 success, 1 module error, 2 usage error.");
  add_synth();
  add_ingest();
  add_stops();
  add_corpus();
  add_train();
  add_query();
  add_analyze();
  add_pipeline();
  add_replay();
}

void Cli::add_synth() {
  auto* app = app_.add_subcommand("synth", "Generate a synthetic world and agent waypoint traces");
  synth_flags(app, synth_.cfg);
  command(app, "synth", [this] { synth(); }, &synth_.out);
}

void Cli::add_ingest() {
  auto* app = app_.add_subcommand("ingest", "Validate waypoints and regroup them by vehicle and day");
  app->add_option("--input,-i", ingest_.input, "Waypoint CSV")->required();
  app->add_option("--day-offset-hours", ingest_.day_offset_hours, "Shift of the day boundary from UTC midnight");
  app->add_flag("--strict", ingest_.strict, "Fail on the first malformed row instead of skipping it");
  command(app, "ingest", [this] { ingest(); }, &ingest_.out, {"input"});
}

void Cli::add_stops() {
  auto* app = app_.add_subcommand("stops", "Detect stops and write per-day cell sequences");
  app->add_option("--input,-i", stops_.input, "Waypoint CSV")->required();
  stop_flags(app, stops_, true);
  app->add_option("--threads", stops_.threads)->check(CLI::PositiveNumber);
  command(app, "stops", [this] { stops(); }, &stops_.out, {"input"});
}

void Cli::add_corpus() {
  auto* app = app_.add_subcommand("corpus", "Build the vocabulary and the encoded corpus");
  app->add_option("--input,-i", corpus_.input, "Cell sequence CSV written by 'stops'")->required();
  app->add_option("--min-count", corpus_.min_count, "Minimum visitation count of a cell");
  command(app, "corpus", [this] { corpus(); }, &corpus_.out, {"input"});
}

void Cli::add_train() {
  auto* app = app_.add_subcommand("train", "Train skip-gram embeddings with negative sampling");
  app->add_option("--corpus", train_.corpus, "corpus.txt written by 'corpus'")->required();
  app->add_option("--vocab", train_.vocab, "vocab.txt written by 'corpus'")->required();
  train_flags(app, train_.cfg, "seed");
  app->add_option("--threads", train_.cfg.threads, "Worker threads; 1 is deterministic")->check(CLI::PositiveNumber);
  command(app, "train", [this] { train(); }, &train_.out, {"corpus", "vocab"});
}

void Cli::add_query() {
  auto* app = app_.add_subcommand("query", "Top-k most similar cells of a target cell");
  app->add_option("--embeddings,-e", query_.embeddings, "Embedding file written by 'train'")->required();
  app->add_option("--pois", query_.pois, "POI CSV used to label cells");
  app->add_option("--target", query_.target, "Morton code, 'lon,lat', or 'auto' for the most frequent cell");
  app->add_option("--k", query_.k, "Number of neighbors");
  app->add_option("--cell-size", query_.cell_size)->check(CLI::PositiveNumber);
  app->add_flag("--plane-distance", query_.plane, "Mercator plane distance instead of haversine");
  command(app, "query", [this] { query(); }, &query_.out, {"embeddings", "pois"});
}

void Cli::add_analyze() {
  auto* analyze = app_.add_subcommand("analyze", "Similarity analyses over a trained model");
  analyze->require_subcommand(1);

  auto* cat = analyze->add_subcommand("category-sim", "Within- versus across-category similarity t-tests");
  cat->add_option("--embeddings,-e", category_.embeddings)->required();
  cat->add_option("--pois", category_.pois, "POI CSV used to label cells")->required();
  cat->add_option("--category", category_.categories, "Category to test (repeatable); default all");
  cat->add_option("--sample", category_.sample, "Cells sampled per category")->check(CLI::PositiveNumber);
  cat->add_option("--seed", category_.seed);
  cat->add_option("--cell-size", category_.cell_size)->check(CLI::PositiveNumber);
  command(cat, "analyze category-sim", [this] { category_sim(); }, &category_.out, {"embeddings", "pois"});

  auto* dec = analyze->add_subcommand("decay", "Linear fits of similarity against distance");
  dec->add_option("--embeddings,-e", decay_.embeddings)->required();
  dec->add_option("--sample", decay_.sample, "Number of sampled cells")->check(CLI::PositiveNumber);
  dec->add_option("--seed", decay_.seed);
  dec->add_option("--cell-size", decay_.cell_size)->check(CLI::PositiveNumber);
  dec->add_flag("--plane-distance", decay_.plane, "Mercator plane distance instead of haversine");
  dec->add_flag("--dump-pairs", decay_.dump_pairs, "Also write every (D, CS) pair to decay_pairs.csv");
  dec->add_flag("--svg", decay_.svg, "Also write a thinned scatter plot");
  dec->add_option("--threads", decay_.threads)->check(CLI::PositiveNumber);
  command(dec, "analyze decay", [this] { decay(); }, &decay_.out, {"embeddings"});

  auto* var = analyze->add_subcommand("variogram", "Empirical semi-variogram of the embedding field");
  var->add_option("--embeddings,-e", variogram_.embeddings)->required();
  var->add_option("--pois", variogram_.pois, "POI CSV; needed with --category");
  var->add_option("--category", variogram_.category, "Restrict the sample to cells with this label");
  var->add_option("--sample", variogram_.sample, "Number of sampled cells")->check(CLI::PositiveNumber);
  var->add_option("--seed", variogram_.seed);
  var->add_option("--cell-size", variogram_.cell_size)->check(CLI::PositiveNumber);
  var->add_option("--bin-width", variogram_.bin_width, "Bin width in meters")->check(CLI::PositiveNumber);
  var->add_option("--max-dist", variogram_.max_dist, "Largest distance in meters")->check(CLI::PositiveNumber);
  var->add_flag("--plane-distance", variogram_.plane, "Mercator plane distance instead of haversine");
  var->add_flag("--svg", variogram_.svg, "Also write a plot of the bins and the fitted line");
  var->add_option("--threads", variogram_.threads)->check(CLI::PositiveNumber);
  command(var, "analyze variogram", [this] { variogram(); }, &variogram_.out, {"embeddings", "pois"});
}

void Cli::add_pipeline() {
  auto* app = app_.add_subcommand("pipeline", "Run every stage into subdirectories of one output directory");
  pipeline_app_ = app;
  app->add_option("--input,-i", pipeline_.input, "Waypoint CSV; a synthetic world is generated when absent");
  app->add_option("--pois", pipeline_.pois, "POI CSV; the synthetic world's places when absent");
  synth_flags(app, pipeline_synth_);
  stop_flags(app, pipeline_stops_, false);
  app->add_option("--min-count", pipeline_corpus_.min_count, "Minimum visitation count of a cell");
  train_flags(app, pipeline_train_, "train-seed");
  app->add_option("--k", pipeline_query_.k, "Neighbors in the neighbor report");
  app->add_option("--target", pipeline_query_.target, "Neighbor report target");
  app->add_option("--category-sample", pipeline_category_.sample)->check(CLI::PositiveNumber);
  app->add_option("--decay-sample", pipeline_decay_.sample)->check(CLI::PositiveNumber);
  app->add_option("--variogram-sample", pipeline_variogram_.sample)->check(CLI::PositiveNumber);
  app->add_option("--variogram-category", pipeline_variogram_.category, "Restrict the variogram sample to one label");
  app->add_option("--bin-width", pipeline_variogram_.bin_width)->check(CLI::PositiveNumber);
  app->add_option("--max-dist", pipeline_variogram_.max_dist)->check(CLI::PositiveNumber);
  app->add_option("--analysis-seed", pipeline_decay_.seed, "Seed of every analysis sample");
  app->add_flag("--plane-distance", pipeline_decay_.plane, "Mercator plane distance instead of haversine");
  app->add_flag("--svg", pipeline_decay_.svg, "Write SVG plots");
  app->add_option("--threads", pipeline_stops_.threads, "Threads for stops, training and pair enumeration")
      ->check(CLI::PositiveNumber);
  command(app, "pipeline", [this] { pipeline(); }, &pipeline_.out, {"input", "pois"});
}

void Cli::add_replay() {
  auto* app = app_.add_subcommand("replay", "Re-run the stage recorded in a manifest");
  app->add_option("--manifest,-m", replay_.manifest, "manifest.json of an earlier run")->required();
  app->add_option("--out,-o", replay_.out, "Output directory; the manifest's directory when absent");
  command(app, "replay", [this] { replay(); }, nullptr);
}

std::string Cli::value_of(const CLI::App* app, const std::string& name) const {
  const auto values = option_values(*app->get_option("--" + name));
  return values.empty() ? std::string() : values.back();
}

RunManifest Cli::manifest_for(const Command& c) const {
  RunManifest m;
  m.subcommand = c.path;
  const fs::path out = *c.out;
  for (const CLI::Option* opt : c.app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "out") continue;
    std::vector<std::string> values = option_values(*opt);
    if (values.empty()) continue;
    if (opt->get_multi_option_policy() == CLI::MultiOptionPolicy::TakeLast) values.erase(values.begin(), values.end() - 1);
    if (std::find(c.inputs.begin(), c.inputs.end(), name) != c.inputs.end()) {
      const fs::path file = values.back();
      m.inputs[name] = {relative_to(file, out), sha256_file(file)};
      values = {m.inputs[name].path};
    }
    m.params[name] = std::move(values);
  }
  for (const char* key : {"seed", "train-seed"}) {
    const auto it = m.params.find(key);
    if (it != m.params.end()) {
      m.seed = parse_int<std::uint64_t>(it->second.back()).value_or(0);
      break;
    }
  }
  return m;
}

// --- stages ----------------------------------------------------------------

void Cli::synth() {
  const World world = generate_world(synth_.cfg);
  const SynthTrace trace = generate_trajectories(world, synth_.cfg);
  for (const auto& w : trace.warnings) note(w);
  const fs::path out = synth_.out;
  {
    auto f = open_output(out / "waypoints.csv");
    write_waypoints(f, trace.waypoints);
  }
  {
    auto f = open_output(out / "ground_truth.csv");
    write_ground_truth(f, world);
  }
  {
    auto f = open_output(out / "pois.csv");
    write_pois(f, world_pois(world));
  }
  note("synth: " + std::to_string(world.places.size()) + " places, " + std::to_string(trace.visits.size()) +
       " visits, " + std::to_string(trace.waypoints.size()) + " waypoints");
}

void Cli::ingest() {
  auto in = open_input(ingest_.input);
  WaypointParseResult parsed = parse_waypoints(in, ingest_.strict ? ParseMode::strict : ParseMode::lenient);
  const std::size_t n_records = parsed.records.size();
  const auto trajectories = segment_trajectories(std::move(parsed.records), ingest_.day_offset_hours);
  std::vector<WaypointRecord> flat;
  flat.reserve(n_records);
  std::set<std::string> vehicles;
  for (const auto& t : trajectories) {
    vehicles.insert(t.vehicle_id);
    flat.insert(flat.end(), t.points.begin(), t.points.end());
  }
  const fs::path out = ingest_.out;
  {
    auto f = open_output(out / "waypoints.csv");
    write_waypoints(f, flat);
  }
  json summary = {{"records", n_records},
                  {"skipped", parsed.skipped},
                  {"vehicles", vehicles.size()},
                  {"trajectories", trajectories.size()}};
  if (!trajectories.empty()) {
    DayNumber lo = trajectories.front().day, hi = lo;
    for (const auto& t : trajectories) {
      lo = std::min(lo, t.day);
      hi = std::max(hi, t.day);
    }
    summary["first_day"] = format_day(lo);
    summary["last_day"] = format_day(hi);
  }
  write_json(out / "summary.json", summary);
  note("ingest: " + std::to_string(n_records) + " records, " + std::to_string(parsed.skipped) + " skipped, " +
       std::to_string(trajectories.size()) + " trajectories");
}

void Cli::stops() {
  validate(stops_.params);
  auto in = open_input(stops_.input);
  WaypointParseResult parsed = parse_waypoints(in, stops_.strict ? ParseMode::strict : ParseMode::lenient);
  const std::size_t n_records = parsed.records.size();
  const auto trajectories = segment_trajectories(std::move(parsed.records), stops_.day_offset_hours);
  const GridSpec grid{stops_.cell_size};
  const auto found = extract_stop_sequences(trajectories, stops_.params, grid, stops_.threads);

  std::vector<CellSequence> sequences;
  std::size_t n_stops = 0, n_cells = 0;
  for (const auto& t : found) {
    n_stops += t.stops.size();
    if (t.sequence.cells.empty()) continue;
    n_cells += t.sequence.cells.size();
    sequences.push_back(t.sequence);
  }
  const fs::path out = stops_.out;
  {
    auto f = open_output(out / "stops.csv");
    write_stops_csv(f, trajectories, found);
  }
  {
    auto f = open_output(out / "cells.csv");
    write_cell_sequences(f, sequences);
  }
  write_json(out / "summary.json", {{"records", n_records},
                                    {"skipped", parsed.skipped},
                                    {"trajectories", trajectories.size()},
                                    {"stops", n_stops},
                                    {"sequences", sequences.size()},
                                    {"cells", n_cells}});
  note("stops: " + std::to_string(trajectories.size()) + " trajectories, " + std::to_string(n_stops) + " stops");
}

void Cli::corpus() {
  auto in = open_input(corpus_.input);
  const auto sequences = read_cell_sequences(in);
  const Vocab vocab = build_vocab(std::span<const CellSequence>(sequences), corpus_.min_count);
  const Corpus encoded = encode_corpus(std::span<const CellSequence>(sequences), vocab);
  const CorpusStats stats = corpus_stats(encoded);
  const fs::path out = corpus_.out;
  {
    auto f = open_output(out / "corpus.txt");
    write_corpus(f, encoded);
  }
  {
    auto f = open_output(out / "vocab.txt");
    write_vocab(f, vocab);
  }
  json j = to_json(stats);
  j["vocab_size"] = vocab.size();
  j["min_count"] = corpus_.min_count;
  j["input_sequences"] = sequences.size();
  write_json(out / "corpus_stats.json", j);
  note("corpus: " + std::to_string(vocab.size()) + " cells, " + std::to_string(stats.n_sequences) + " sequences");
}

void Cli::train() {
  Vocab vocab = [&] {
    auto in = open_input(train_.vocab);
    return read_vocab(in);
  }();
  const auto sequences = [&] {
    auto in = open_input(train_.corpus);
    return read_corpus(in);
  }();
  const Corpus encoded = encode_corpus(std::span<const std::vector<CellId>>(sequences), vocab);
  TrainLog log;
  const EmbeddingModel model = train_sgns(encoded, train_.cfg, &log);
  const fs::path out = train_.out;
  save_embeddings(model, out / "embeddings.txt");
  json epochs = json::array();
  for (const auto& e : log.epochs) epochs.push_back({{"epoch", e.epoch}, {"pairs", e.pairs}, {"mean_loss", e.mean_loss}});
  write_json(out / "train_log.json", {{"vocab_size", model.size()},
                                      {"dim", model.dim()},
                                      {"total_pairs", log.total_pairs},
                                      {"epochs", std::move(epochs)}});
  for (const auto& e : log.epochs) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "train: epoch %d, %llu pairs, mean loss %.6f", e.epoch,
                  static_cast<unsigned long long>(e.pairs), e.mean_loss);
    note(buf);
  }
}

void Cli::query() {
  const EmbeddingModel model = load_embeddings(fs::path(query_.embeddings));
  const GridSpec grid{query_.cell_size};
  const CellLabelMap labels = load_labels(query_.pois, grid, ParseMode::lenient);
  const CellId target = parse_target(query_.target, grid, model);
  const NeighborReport report = neighbor_report(model, labels, grid, target, query_.k, metric_of(query_.plane));
  const fs::path out = query_.out;
  json j = to_json(report);
  j["distance"] = metric_name(query_.plane);
  write_json(out / "neighbors.json", j);
  write_json(out / "neighbors.geojson", to_geojson(report));
  std::printf("target %llu (%s)\n", static_cast<unsigned long long>(target.code), report.target_label.c_str());
  for (std::size_t i = 0; i < report.neighbors.size(); ++i) {
    const auto& n = report.neighbors[i];
    std::printf("%3zu  %llu  %.4f  %10.1f m  %s\n", i + 1, static_cast<unsigned long long>(n.cell.code),
                n.similarity, n.distance_m, n.label.c_str());
  }
}

void Cli::category_sim() {
  const EmbeddingModel model = load_embeddings(fs::path(category_.embeddings));
  const GridSpec grid{category_.cell_size};
  const CellLabelMap labels = load_labels(category_.pois, grid, ParseMode::lenient);
  const auto categories = category_.categories.empty() ? categories_in_model(model, labels) : category_.categories;
  if (categories.empty()) throw std::invalid_argument("no labelled cells in the model");
  json results = json::array();
  std::printf("%-16s %6s %8s %8s %10s %10s %s\n", "category", "n", "intra", "inter", "t", "p", "");
  for (const auto& cat : categories) {
    const CategoryTestResult r = category_similarity_test(model, labels, cat, category_.sample, category_.seed);
    results.push_back(to_json(r));
    std::printf("%-16s %6zu %8.4f %8.4f %10.3f %10.3g %s\n", r.category.c_str(), r.sample_size, r.intra_mean,
                r.inter_mean, r.t_stat, r.p_two_sided, significance_marker(r.p_two_sided).c_str());
  }
  write_json(fs::path(category_.out) / "category_sim.json", {{"task", "category_similarity"},
                                                             {"requested_sample", category_.sample},
                                                             {"seed", category_.seed},
                                                             {"results", std::move(results)}});
}

void Cli::decay() {
  const EmbeddingModel model = load_embeddings(fs::path(decay_.embeddings));
  const GridSpec grid{decay_.cell_size};
  const auto sample = sample_cells(model, decay_.sample, decay_.seed);
  const auto metric = metric_of(decay_.plane);
  const auto ranges = default_decay_ranges();
  const auto fits = decay_fits(model, sample, grid, ranges, metric, decay_.threads);
  const fs::path out = decay_.out;

  json models = json::array();
  for (const auto& m : fits) models.push_back(to_json(m));
  write_json(out / "decay.json", {{"task", "distance_decay"},
                                  {"sample_size", sample.size()},
                                  {"seed", decay_.seed},
                                  {"distance", metric_name(decay_.plane)},
                                  {"models", std::move(models)}});
  if (decay_.dump_pairs) {
    auto f = open_output(out / "decay_pairs.csv");
    DecayCsvWriter writer(f);
    pairwise_decay(model, sample, grid, DistanceRange{}, metric, std::ref(writer));
  }
  if (decay_.svg) {
    // Every stride-th pair keeps the plot small for any sample size.
    constexpr std::size_t kMaxPoints = 20000;
    const std::size_t n_pairs = sample.size() * (sample.size() - 1) / 2;
    const std::size_t stride = std::max<std::size_t>(1, (n_pairs + kMaxPoints - 1) / kMaxPoints);
    SvgScatter plot{"Similarity against distance", "distance (m)", "cosine similarity", {}, std::nullopt};
    std::size_t i = 0;
    pairwise_decay(model, sample, grid, DistanceRange{}, metric, [&](double d, double cs) {
      if (i++ % stride == 0) plot.points.emplace_back(d, cs);
    });
    if (!fits.empty()) plot.line = fits.front().fit;
    auto f = open_output(out / "decay.svg");
    write_svg(f, plot);
  }
  for (const auto& m : fits) {
    char buf[160];
    if (m.fit) {
      std::snprintf(buf, sizeof(buf), "decay %-10s pairs %llu slope %.6g intercept %.6g r2 %.4f", m.name.c_str(),
                    static_cast<unsigned long long>(m.n_pairs), m.fit->slope, m.fit->intercept, m.fit->r_squared);
    } else {
      std::snprintf(buf, sizeof(buf), "decay %-10s pairs %llu (no fit)", m.name.c_str(),
                    static_cast<unsigned long long>(m.n_pairs));
    }
    std::printf("%s\n", buf);
  }
}

void Cli::variogram() {
  const EmbeddingModel model = load_embeddings(fs::path(variogram_.embeddings));
  const GridSpec grid{variogram_.cell_size};
  std::vector<CellId> sample;
  if (!variogram_.category.empty()) {
    if (variogram_.pois.empty()) throw std::invalid_argument("--category needs --pois");
    const CellLabelMap labels = load_labels(variogram_.pois, grid, ParseMode::lenient);
    sample = sample_cells(model, variogram_.sample, variogram_.seed, &labels, variogram_.category);
  } else {
    sample = sample_cells(model, variogram_.sample, variogram_.seed);
  }
  if (sample.size() < 2) throw std::invalid_argument("variogram needs at least 2 cells");
  const Variogram v = empirical_variogram(model, sample, grid, variogram_.bin_width, variogram_.max_dist,
                                          metric_of(variogram_.plane), variogram_.threads);
  const fs::path out = variogram_.out;
  json j = to_json(v);
  j["sample_size"] = sample.size();
  j["seed"] = variogram_.seed;
  j["category"] = variogram_.category.empty() ? json(nullptr) : json(variogram_.category);
  j["distance"] = metric_name(variogram_.plane);
  write_json(out / "variogram.json", j);
  {
    auto f = open_output(out / "variogram.csv");
    write_variogram_csv(f, v);
  }
  if (variogram_.svg) {
    SvgScatter plot{"Semi-variogram", "distance (m)", "gamma", {}, v.fit};
    for (const auto& b : v.bins) {
      if (b.n_pairs > 0) plot.points.emplace_back(b.h_mid(), b.gamma);
    }
    auto f = open_output(out / "variogram.svg");
    write_svg(f, plot);
  }
  std::size_t used = 0;
  for (const auto& b : v.bins) used += b.n_pairs > 0;
  note("variogram: " + std::to_string(sample.size()) + " cells, " + std::to_string(used) + " non-empty bins");
}

void Cli::pipeline() {
  const fs::path out = fs::absolute(pipeline_.out);
  const auto fwd = [&](const std::string& name, const std::string& as = {}) {
    return "--" + (as.empty() ? name : as) + "=" + value_of(pipeline_app_, name);
  };
  const auto stage = [&](std::vector<std::string> args) {
    note("pipeline: " + join(args, " "));
    args.insert(args.begin(), "placevec");
    if (cli::run(args) != kExitOk) throw std::runtime_error("pipeline stage '" + args[1] + "' failed");
  };
  const auto dir = [&](const char* name) { return (out / name).string(); };
  const std::vector<std::string> synth_keys = {"n-categories", "places-per-category", "world-extent", "agents",
                                               "days", "activity-radius", "visits-per-day", "dwell-min",
                                               "dwell-max", "gps-noise", "grammar-strength", "seed", "cell-size"};

  std::string waypoints = pipeline_.input;
  std::string pois = pipeline_.pois;
  if (waypoints.empty()) {
    std::vector<std::string> args = {"synth", "--out=" + dir("synth")};
    for (const auto& k : synth_keys) args.push_back(fwd(k));
    stage(args);
    waypoints = dir("synth") + "/waypoints.csv";
    if (pois.empty()) pois = dir("synth") + "/pois.csv";
  }
  const std::string threads = fwd("threads");
  stage({"stops", "--input=" + waypoints, "--out=" + dir("stops"), fwd("min-duration"), fwd("radius"),
         fwd("max-noise-run"), fwd("day-offset-hours"), fwd("strict"), fwd("cell-size"), threads});
  stage({"corpus", "--input=" + dir("stops") + "/cells.csv", "--out=" + dir("corpus"), fwd("min-count")});
  stage({"train", "--corpus=" + dir("corpus") + "/corpus.txt", "--vocab=" + dir("corpus") + "/vocab.txt",
         "--out=" + dir("train"), fwd("dim"), fwd("window"), fwd("negatives"), fwd("epochs"), fwd("lr-start"),
         fwd("lr-end"), fwd("unigram-power"), fwd("subsample"), fwd("train-seed", "seed"), threads});
  const std::string embeddings = "--embeddings=" + dir("train") + "/embeddings.txt";

  std::vector<std::string> query = {"query", embeddings, "--out=" + dir("query"), fwd("k"), fwd("target"),
                                    fwd("cell-size"), fwd("plane-distance")};
  if (!pois.empty()) query.push_back("--pois=" + pois);
  stage(query);
  if (!pois.empty()) {
    stage({"analyze", "category-sim", embeddings, "--pois=" + pois, "--out=" + dir("category-sim"),
           fwd("category-sample", "sample"), fwd("analysis-seed", "seed"), fwd("cell-size")});
  } else {
    note("pipeline: no POI file, skipping the category similarity test");
  }
  stage({"analyze", "decay", embeddings, "--out=" + dir("decay"), fwd("decay-sample", "sample"),
         fwd("analysis-seed", "seed"), fwd("cell-size"), fwd("plane-distance"), fwd("svg"), threads});
  std::vector<std::string> var = {"analyze", "variogram", embeddings, "--out=" + dir("variogram"),
                                  fwd("variogram-sample", "sample"), fwd("analysis-seed", "seed"),
                                  fwd("cell-size"), fwd("bin-width"), fwd("max-dist"), fwd("plane-distance"),
                                  fwd("svg"), threads};
  if (!pipeline_variogram_.category.empty()) {
    var.push_back("--category=" + pipeline_variogram_.category);
    var.push_back("--pois=" + pois);
  }
  stage(var);
}

void Cli::replay() {
  const fs::path file = replay_.manifest;
  const RunManifest m = read_manifest(file);
  const fs::path base = file.parent_path().empty() ? fs::path(".") : file.parent_path();
  if (m.tool_version != kToolVersion) {
    note("manifest written by version " + m.tool_version + ", replaying with " + kToolVersion);
  }
  for (const auto& [name, in] : m.inputs) {
    const fs::path p = base / in.path;
    if (sha256_file(p) != in.sha256) {
      throw std::runtime_error("input '" + p.string() + "' changed since the manifest was written");
    }
  }
  std::vector<std::string> args = {"placevec"};
  std::vector<std::string_view> words;
  split_ws(m.subcommand, words);
  for (const auto w : words) args.emplace_back(w);
  for (const auto& [name, values] : m.params) {
    for (const auto& v : values) {
      args.push_back("--" + name + "=" + (m.inputs.count(name) ? (base / v).string() : v));
    }
  }
  args.push_back("--out=" + (replay_.out.empty() ? base.string() : replay_.out));
  if (cli::run(args) != kExitOk) throw std::runtime_error("replay of '" + m.subcommand + "' failed");
}

int Cli::run(std::vector<std::string> args) {
  // Expand --config FILE in front of the first flag so explicit flags win.
  std::vector<std::string> expanded;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        std::cerr << "placevec: --config needs a file\n";
        return kExitUsage;
      }
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      continue;
    }
    try {
      const auto tokens = config_tokens(file);
      expanded.insert(expanded.end(), tokens.begin(), tokens.end());
    } catch (const std::exception& e) {
      std::cerr << "placevec: error: " << e.what() << '\n';
      return kExitModuleError;
    }
    --i;
  }
  std::size_t at = 1;
  while (at < args.size() && !args[at].empty() && args[at][0] != '-') ++at;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), expanded.begin(), expanded.end());

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app_.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app_.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app_.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app_.exit(e);
  } catch (const CLI::ParseError& e) {
    app_.exit(e);
    return kExitUsage;
  }

  for (const auto& c : commands_) {
    if (!c->app->parsed()) continue;
    try {
      if (c->out) fs::create_directories(*c->out);
      c->action();
      if (c->out) write_manifest(*c->out, manifest_for(*c));
    } catch (const std::exception& e) {
      std::cerr << "placevec " << c->path << ": error: " << e.what() << '\n';
      return kExitModuleError;
    }
    return kExitOk;
  }
  std::cerr << app_.help();
  return kExitUsage;
}

}  // namespace

std::vector<std::string> config_tokens(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file '" + file.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string_view key = trim(body.substr(0, eq));
    const std::string_view value = trim(body.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": empty key");
    tokens.push_back("--" + std::string(key) + "=" + std::string(value));
  }
  return tokens;
}

int run(const std::vector<std::string>& args) {
  Cli cli;
  return cli.run(args);
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace placevec::cli
