// Copyright 2026 The oodsim Authors
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

#include "oodsim/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "oodsim/analysis/analysis.hpp"
#include "oodsim/analysis/report.hpp"
#include "oodsim/bus/stage_log.hpp"
#include "oodsim/core/error.hpp"
#include "oodsim/sim/calibration.hpp"
#include "oodsim/sim/engine.hpp"
#include "oodsim/sim/oracle.hpp"
#include "oodsim/sim/realtime.hpp"
#include "oodsim/sim/render.hpp"
#include "oodsim/sim/run_log.hpp"
#include "oodsim/vision/pnm.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace oodsim::cli
{
namespace
{

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::uint64_t kDatasetStream = 0xDA7A5E7000000000ULL;
constexpr std::size_t kDefaultSweepSteps = 9;
constexpr double kMinDatasetDistance = 0.1;

sim::ScenarioConfig base_config(const Options & o)
{
  sim::ScenarioConfig c = o.config.empty() ? sim::ScenarioConfig{} : sim::load_config(o.config);
  if (o.config.empty()) {
    c.seed = kDefaultSeed;
  }
  if (o.seed) {
    c.seed = *o.seed;
  }
  if (o.scorer) {
    c.scorer = sim::parse_scorer(*o.scorer);
  }
  if (!o.weights.empty()) {
    c.weights = o.weights;
  }
  c.validate();
  return c;
}

fs::path out_dir(const Options & o)
{
  fs::path dir(o.out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  out << text;
}

std::string read_text(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ScorerSetup
{
  sim::Calibration calibration;
  std::shared_ptr<const ood::Scorer> scorer;
};

ScorerSetup setup_scorer(const sim::ScenarioConfig & c)
{
  auto model = c.scorer == sim::ScorerKind::kVae ? sim::load_model(c) : nullptr;
  ScorerSetup s;
  if (c.scorer == sim::ScorerKind::kOracle && c.threshold) {
    s.calibration.detector.threshold = *c.threshold;
    s.calibration.quantile = c.quantile;
  } else {
    s.calibration = sim::calibrate(c, model);
  }
  s.scorer = sim::make_scorer(c, s.calibration, model);
  return s;
}

std::size_t count_above(const std::vector<double> & scores, double threshold)
{
  return static_cast<std::size_t>(
    std::count_if(scores.begin(), scores.end(), [&](double s) { return s > threshold; }));
}

void print_run(std::size_t i, const sim::RunLog & log)
{
  const auto & s = log.summary;
  fmt::print(
    "run {:3d}  obstacle {:5}  stop {:.4f} m  {}  v_hat {:.4f} m/s  scored {:2d}  ({})\n", i,
    log.config.obstacle ? sim::to_string(*log.config.obstacle) : "none", s.stopping_distance_m,
    s.collision ? "COLLISION" : "stopped  ", s.velocity_estimate_mps, s.frames_scored, sim::to_string(s.end_reason));
}

std::string run_json_text(const sim::RunLog & log)
{
  return sim::to_json(log).dump(1) + "\n";
}

std::string stage_csv_text(const sim::RunLog & log)
{
  std::ostringstream ss;
  bus::write_stage_csv(ss, log.stages);
  return ss.str();
}

std::vector<sim::RunLog> load_logs(const Options & o)
{
  if (o.logs.empty()) {
    throw ValidationError("--logs DIR is required");
  }
  auto logs = sim::read_runs(o.logs);
  if (logs.empty()) {
    throw ValidationError(fmt::format("no run_*.json logs in '{}'", o.logs));
  }
  return logs;
}

std::vector<double> default_thresholds(const std::vector<sim::RunLog> & logs)
{
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto & log : logs) {
    for (const auto & f : log.scores) {
      lo = any ? std::min(lo, f.score) : f.score;
      hi = any ? std::max(hi, f.score) : f.score;
      any = true;
    }
  }
  if (!any) {
    throw ValidationError("logs hold no scored frames");
  }
  // One step below the smallest score so the lowest threshold triggers on
  // the first scored frame of every run.
  const double step = (hi - lo) / static_cast<double>(kDefaultSweepSteps - 1);
  std::vector<double> t;
  const double start = lo - (step > 0.0 ? step : 1.0);
  for (std::size_t i = 0; i < kDefaultSweepSteps; ++i) {
    t.push_back(start + (hi - start) * static_cast<double>(i) / static_cast<double>(kDefaultSweepSteps - 1));
  }
  return t;
}

}  // namespace

int cmd_render_dataset(const Options & o)
{
  const sim::ScenarioConfig c = base_config(o);
  if (!(o.ood_fraction >= 0.0 && o.ood_fraction <= 1.0)) {
    throw ValidationError(fmt::format("--ood-fraction must lie in [0, 1], got {}", o.ood_fraction));
  }
  if (o.frames < 1) {
    throw ValidationError("--frames must be >= 1");
  }
  const fs::path dir = out_dir(o);
  fs::create_directories(dir / "frames");
  std::mt19937_64 rng(c.seed ^ kDatasetStream);
  std::uniform_real_distribution<double> illum(0.9, 1.1);
  std::uniform_real_distribution<double> dist(kMinDatasetDistance, c.risk_m);
  std::bernoulli_distribution ood(o.ood_fraction);
  std::ostringstream index;
  index << "file,label,obstacle,distance_m,illumination,view_fraction\n";
  std::size_t n_ood = 0;
  for (std::size_t i = 0; i < o.frames; ++i) {
    sim::Scene s;
    s.illumination = illum(rng);
    const bool is_ood = ood(rng);
    const double d = dist(rng);
    if (is_ood) {
      s.obstacle = c.obstacle.value_or(static_cast<sim::ObstacleKind>(n_ood % sim::kObstacleKindCount));
      s.distance_m = d;
      ++n_ood;
    }
    s.noise_seed = c.seed ^ kDatasetStream;
    s.frame_seq = i;
    const auto truth = sim::scene_truth(s);
    const std::string name = fmt::format("frame_{:05d}.ppm", i);
    vision::write_pnm(dir / "frames" / name, vision::detector_view(sim::render(s)));
    index << fmt::format(
      "frames/{},{},{},{},{},{}\n", name, is_ood ? "ood" : "id", s.obstacle ? sim::to_string(*s.obstacle) : "none",
      s.obstacle ? s.distance_m : 0.0, s.illumination, truth.obstacle_view_fraction);
  }
  write_text(dir / "index.csv", index.str());
  fmt::print("wrote {} frames ({} with obstacles) to {}\n", o.frames, n_ood, dir.string());
  return kExitOk;
}

int cmd_calibrate(const Options & o)
{
  const sim::ScenarioConfig c = base_config(o);
  auto model = c.scorer == sim::ScorerKind::kVae ? sim::load_model(c) : nullptr;
  const sim::Calibration cal = sim::calibrate(c, model);
  const fs::path dir = out_dir(o);
  sim::save_calibration(dir / "calibration.json", cal);
  const double t = cal.detector.threshold;
  fmt::print("scorer {}  frames {}  quantile {}\n", sim::to_string(cal.scorer), cal.scores.size(), cal.quantile);
  for (const double q : {0.5, 0.8, 0.95, 1.0}) {
    fmt::print("  p{:<3.0f} {:.6f}\n", q * 100.0, analysis::nearest_rank(cal.scores, q));
  }
  fmt::print("threshold {:.6f}  frames above {}\n", t, count_above(cal.scores, t));
  if (!cal.detector.subset.empty()) {
    fmt::print("subset {}\n", json(cal.detector.subset).dump());
  }
  return kExitOk;
}

int cmd_select_detectors(const Options & o)
{
  const sim::ScenarioConfig c = base_config(o);
  if (c.scorer != sim::ScorerKind::kVae) {
    throw ValidationError("select-detectors needs the vae scorer (--scorer vae --weights PATH)");
  }
  const auto model = sim::load_model(c);
  const ood::KlMatrix kl = sim::calibration_kl(c, *model);
  const auto subset = ood::select_detectors(kl, o.k);
  std::vector<double> means(kl.cols, 0.0);
  for (std::size_t r = 0; r < kl.rows; ++r) {
    for (std::size_t d = 0; d < kl.cols; ++d) {
      means[d] += kl.at(r, d) / static_cast<double>(kl.rows);
    }
  }
  for (std::size_t d = 0; d < kl.cols; ++d) {
    const bool picked = std::binary_search(subset.begin(), subset.end(), d);
    fmt::print("dim {:2d}  mean KL {:.6f}{}\n", d, means[d], picked ? "  *" : "");
  }
  const fs::path dir = out_dir(o);
  write_text(
    dir / "detectors.json",
    json({{"k", o.k}, {"subset", subset}, {"column_means", means}, {"frames", kl.rows}}).dump(2) + "\n");
  fmt::print("selected {}\n", json(subset).dump());
  return kExitOk;
}

int cmd_simulate(const Options & o)
{
  const sim::ScenarioConfig c = base_config(o);
  const ScorerSetup setup = setup_scorer(c);
  const sim::RunLog log = o.realtime ? sim::run_realtime(c, setup.scorer) : sim::run_scenario(c, setup.scorer);
  const fs::path dir = out_dir(o);
  sim::write_run(dir, sim::run_stem(0), log);
  write_text(dir / "summary.jsonl", sim::summary_record(log, 0).dump() + "\n");
  fmt::print("threshold {:.6f}\n", setup.scorer->threshold());
  print_run(0, log);
  if (o.emit_svg) {
    write_text(dir / "scores_vs_distance.svg", analysis::score_distance_svg(std::span<const sim::RunLog>(&log, 1)));
  }
  return kExitOk;
}

int cmd_campaign(const Options & o)
{
  const sim::ScenarioConfig c = base_config(o);
  sim::CampaignOptions opts;
  opts.runs = o.runs;
  if (c.obstacle && !o.config.empty()) {
    spdlog::info("campaign rotates obstacle types; the config's obstacle is ignored");
  }
  const auto result = sim::run_campaign(c, opts);
  const fs::path dir = out_dir(o);
  std::string lines;
  std::vector<double> scored;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto & log = result.runs[i];
    sim::write_run(dir, sim::run_stem(i), log);
    lines += sim::summary_record(log, i).dump() + "\n";
    scored.push_back(static_cast<double>(log.summary.frames_scored));
    print_run(i, log);
  }
  write_text(dir / "summary.jsonl", lines);
  const auto stats = analysis::stopping_stats(result.runs);
  json summary;
  summary["runs"] = result.runs.size();
  summary["seed"] = c.seed;
  summary["scorer"] = sim::to_string(c.scorer);
  summary["threshold"] = result.threshold;
  summary["calibration"] = {
    {"frames", result.calibration.scores.size()},
    {"quantile", result.calibration.quantile},
    {"above_threshold", count_above(result.calibration.scores, result.calibration.detector.threshold)}};
  summary["stopping"] = analysis::to_json(stats);
  summary["frames_scored"] = {
    {"min", *std::min_element(scored.begin(), scored.end())},
    {"median", analysis::median(scored)},
    {"max", *std::max_element(scored.begin(), scored.end())}};
  write_text(dir / "campaign_summary.json", summary.dump(2) + "\n");
  if (o.emit_svg) {
    write_text(dir / "scores_vs_distance.svg", analysis::score_distance_svg(result.runs));
  }
  fmt::print(
    "median stopping distance {:.4f} m  95% CI [{:.4f}, {:.4f}]  success rate {:.3f}\n", stats.median, stats.ci_low,
    stats.ci_high, stats.success_rate);
  return kExitOk;
}

int cmd_sweep(const Options & o)
{
  const auto logs = load_logs(o);
  const auto thresholds = o.thresholds.empty() ? default_thresholds(logs) : o.thresholds;
  const auto sweep = analysis::threshold_sweep(logs, thresholds);
  const fs::path dir = out_dir(o);
  std::ostringstream csv;
  analysis::write_sweep_csv(csv, sweep);
  write_text(dir / "sweep.csv", csv.str());
  write_text(dir / "sweep_summary.json", analysis::to_json(sweep).dump(2) + "\n");
  if (o.emit_svg) {
    write_text(dir / "sweep.svg", analysis::sweep_box_svg(sweep));
  }
  for (std::size_t ti = 0; ti < sweep.thresholds.size(); ++ti) {
    fmt::print(
      "tau {:10.6f}  median {:.4f} m  collisions {:3d}  out-of-risk {:3d}\n", sweep.thresholds[ti],
      analysis::median(sweep.distances[ti]), sweep.collisions[ti], sweep.out_of_risk[ti]);
  }
  return kExitOk;
}

int cmd_report(const Options & o)
{
  const auto logs = load_logs(o);
  const auto stats = analysis::stopping_stats(logs);
  const auto timing = analysis::timing_report(logs);
  const fs::path dir = out_dir(o);
  write_text(
    dir / "report.json", json({{"stopping", analysis::to_json(stats)}, {"timing", analysis::to_json(timing)}}).dump(2) + "\n");
  std::ostringstream csv;
  analysis::write_timing_csv(csv, timing);
  write_text(dir / "timing.csv", csv.str());
  if (o.emit_svg) {
    write_text(dir / "scores_vs_distance.svg", analysis::score_distance_svg(logs));
  }
  fmt::print("{:<28} {:>5} {:>10} {:>10} {:>10} {:>10}\n", "hop", "n", "min s", "median s", "p95 s", "max s");
  auto row = [](const analysis::LatencyStats & h) {
    fmt::print(
      "{:<28} {:>5} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f}\n", h.name, h.samples.size(), h.min, h.median, h.p95, h.max);
  };
  for (const auto & h : timing.hops) {
    row(h);
  }
  row(timing.end_to_end);
  fmt::print("dominant stage: {}\n", timing.dominant);
  fmt::print(
    "runs {}  median stopping distance {:.4f} m  95% CI [{:.4f}, {:.4f}]  success rate {:.3f}\n", stats.runs,
    stats.median, stats.ci_low, stats.ci_high, stats.success_rate);
  return kExitOk;
}

int cmd_replay(const Options & o)
{
  if (o.logs.empty()) {
    throw ValidationError("--logs DIR is required");
  }
  std::vector<fs::path> paths;
  for (const auto & e : fs::directory_iterator(o.logs)) {
    const auto name = e.path().filename().string();
    if (name.rfind("run_", 0) == 0 && e.path().extension() == ".json") {
      paths.push_back(e.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw ValidationError(fmt::format("no run_*.json logs in '{}'", o.logs));
  }
  std::size_t mismatches = 0;
  for (const auto & p : paths) {
    const sim::RunLog log = sim::read_run(p);
    const sim::ScenarioConfig & c = log.config;
    std::shared_ptr<const ood::Scorer> scorer;
    if (c.scorer == sim::ScorerKind::kOracle) {
      scorer = std::make_shared<sim::OracleScorer>(c.oracle, log.threshold);
    } else {
      auto model = sim::load_model(c);
      ood::DetectorConfig det{log.detector_subset, log.threshold, model->latent_dim()};
      scorer = std::make_shared<ood::VaeScorer>(std::move(model), det);
    }
    const sim::RunLog again = sim::run_scenario(c, scorer);
    auto csv = p;
    csv.replace_extension(".csv");
    const bool same = run_json_text(again) == read_text(p) && stage_csv_text(again) == read_text(csv);
    fmt::print("{}: {}\n", p.filename().string(), same ? "identical" : "MISMATCH");
    mismatches += same ? 0 : 1;
  }
  if (mismatches > 0) {
    throw InvariantViolation(fmt::format("{} of {} runs did not replay byte-identically", mismatches, paths.size()));
  }
  return kExitOk;
}

int run(int argc, char ** argv)
{
  CLI::App app{"Simulator for an OOD-guarded emergency braking pipeline"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App * sub) {
    sub->add_option("--config", o.config, "Scenario config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, fmt::format("Seed (default {})", kDefaultSeed));
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--scorer", o.scorer, "Scorer backend")->check(CLI::IsMember({"vae", "oracle"}));
    sub->add_option("--weights", o.weights, "Encoder weight file (vae scorer)");
    sub->add_flag("--emit-svg", o.emit_svg, "Also write SVG figures");
  };

  auto * render = app.add_subcommand("render-dataset", "Write rendered detector-view PPM frames and index.csv");
  common(render);
  render->add_option("--frames", o.frames, "Number of frames")->capture_default_str();
  render->add_option("--ood-fraction", o.ood_fraction, "Fraction of frames with an obstacle")->capture_default_str();

  auto * calibrate = app.add_subcommand("calibrate", "Score calibration frames and set the threshold");
  common(calibrate);

  auto * select = app.add_subcommand("select-detectors", "Rank latent dimensions by mean calibration KL");
  common(select);
  select->add_option("--k", o.k, "Detector count")->capture_default_str();

  auto * simulate = app.add_subcommand("simulate", "Run one closed-loop scenario");
  common(simulate);
  simulate->add_flag("--realtime", o.realtime, "Wall-clock mode with one thread per node");

  auto * campaign = app.add_subcommand("campaign", "Run a seeded batch of scenarios");
  common(campaign);
  campaign->add_option("--runs", o.runs, "Number of runs")->capture_default_str()->check(CLI::PositiveNumber);

  auto * sweep = app.add_subcommand("sweep", "Project stopping distances over thresholds");
  common(sweep);
  sweep->add_option("--logs", o.logs, "Directory of run logs")->required();
  sweep->add_option("--thresholds", o.thresholds, "Comma-separated thresholds")->delimiter(',');

  auto * report = app.add_subcommand("report", "Stopping statistics and stage timing");
  common(report);
  report->add_option("--logs", o.logs, "Directory of run logs")->required();

  auto * replay = app.add_subcommand("replay", "Re-run logged scenarios and verify byte-identical output");
  common(replay);
  replay->add_option("--logs", o.logs, "Directory of run logs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (render->parsed()) {
      return cmd_render_dataset(o);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(o);
    }
    if (select->parsed()) {
      return cmd_select_detectors(o);
    }
    if (simulate->parsed()) {
      return cmd_simulate(o);
    }
    if (campaign->parsed()) {
      return cmd_campaign(o);
    }
    if (sweep->parsed()) {
      return cmd_sweep(o);
    }
    if (report->parsed()) {
      return cmd_report(o);
    }
    if (replay->parsed()) {
      return cmd_replay(o);
    }
  } catch (const InvariantViolation & e) {
    spdlog::critical("invariant violated: {}", e.what());
    return kExitInternal;
  } catch (const Error & e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::filesystem::filesystem_error & e) {
    spdlog::error("{}", e.what());
    return kExitData;
  } catch (const std::exception & e) {
    spdlog::critical("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace oodsim::cli
