#include "driftgp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "driftgp/errors.hpp"
#include "json.hpp"

namespace driftgp {

double normalized_error(std::span<const Vec2> estimate, std::span<const Vec2> truth) {
  if (estimate.size() != truth.size()) {
    throw DimensionMismatch("normalized_error: estimate and truth differ in length");
  }
  double err = 0.0;
  double mag = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double speed = truth[k].norm();
    if (speed <= kSpeedMask) continue;
    err += distance(estimate[k], truth[k]);
    mag += speed;
  }
  if (mag == 0.0) throw DegenerateTruth("normalized_error: every truth speed is below the mask");
  return err / mag;
}

double normalized_error(const VectorField& estimate, const AnalyticField& truth, const Grid& grid) {
  return normalized_error(sample_grid(estimate, grid), sample_grid(truth, grid));
}

void RunConfig::validate() const {
  hp.validate();
  vehicle.validate();
  em.validate();
  if (trials < 1) throw std::invalid_argument("RunConfig: trials must be >= 1");
  if (kernels.empty()) throw std::invalid_argument("RunConfig: at least one kernel");
  if (!grid && grid_points < 2) throw std::invalid_argument("RunConfig: grid_points must be >= 2");
}

Grid RunConfig::error_grid() const {
  if (grid) return *grid;
  Vec2 lo = vehicle.start;
  Vec2 hi = vehicle.start;
  for (const Vec2& w : vehicle.waypoints) {
    lo = Vec2(std::min(lo.x(), w.x()), std::min(lo.y(), w.y()));
    hi = Vec2(std::max(hi.x(), w.x()), std::max(hi.y(), w.y()));
  }
  return Grid::covering(lo, hi, 0.5 * hp.lengthscale, grid_points);
}

namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t trial) {
  const std::uint64_t s = mix(base_seed ^ mix(static_cast<std::uint64_t>(trial)));
  return {s, mix(s)};
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::Ok:
      return "ok";
    case TrialStatus::Aborted:
      return "aborted";
    case TrialStatus::DegenerateTruth:
      return "degenerate_truth";
  }
  return "unknown";
}

std::size_t ConvergenceReport::count(TrialStatus status) const {
  return static_cast<std::size_t>(std::count_if(
      trials.begin(), trials.end(), [status](const TrialResult& t) { return t.status == status; }));
}

TrialResult run_trial(const RunConfig& cfg, std::size_t trial) {
  const TrialSeeds seeds = trial_seeds(cfg.base_seed, trial);
  const AnalyticField field = cfg.fixed_field ? *cfg.fixed_field : random_gyre(seeds.field, cfg.gyre);
  const Grid grid = cfg.error_grid();

  TrialResult result;
  result.trial = trial;
  const std::vector<Vec2> truth = sample_grid(field, grid, Execution::Serial);
  try {
    normalized_error(std::vector<Vec2>(truth.size()), truth);
  } catch (const DegenerateTruth& e) {
    result.status = TrialStatus::DegenerateTruth;
    result.message = e.what();
    return result;
  }

  MissionLog log;
  try {
    log = run_mission(cfg.vehicle, field, seeds.mission);
  } catch (const MissionAborted& e) {
    result.status = TrialStatus::Aborted;
    result.message = e.what();
    return result;
  }

  result.errors.resize(cfg.kernels.size());
  for (std::size_t k = 0; k < cfg.kernels.size(); ++k) {
    auto& curve = result.errors[k];
    const MissionEstimate est =
        process_mission(log, cfg.hp, cfg.kernels[k], cfg.em, [&](std::size_t, const GpModel& model) {
          curve.push_back(normalized_error(predict_mean_on_grid(model, grid, Execution::Serial), truth));
        });
    if (cfg.keep_fields) {
      result.estimated_fields.push_back(predict_mean_on_grid(est.model, grid, Execution::Serial));
    }
  }
  if (cfg.keep_fields) result.truth_field = truth;
  return result;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("percentile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

void summarize(ConvergenceReport& report) {
  report.summary.assign(report.kernels.size(), {});
  for (std::size_t k = 0; k < report.kernels.size(); ++k) {
    for (std::size_t c = 0; c < report.cycles; ++c) {
      std::vector<double> sample;
      for (const TrialResult& t : report.trials) {
        if (t.status == TrialStatus::Ok && c < t.errors[k].size()) sample.push_back(t.errors[k][c]);
      }
      if (sample.empty()) break;
      report.summary[k].push_back(
          {percentile(sample, 0.5), percentile(sample, 0.005), percentile(sample, 0.995)});
    }
  }
}

ConvergenceReport monte_carlo(const RunConfig& cfg, Execution exec) {
  cfg.validate();
  ConvergenceReport report;
  report.kernels = cfg.kernels;
  report.cycles = cfg.vehicle.waypoints.size();
  report.grid = cfg.error_grid();
  report.trials.resize(cfg.trials);
  // Trials write only their own slot, so assembly order is the trial index.
  parallel_for(cfg.trials, exec, [&](std::size_t t) { report.trials[t] = run_trial(cfg, t); });
  summarize(report);
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  const auto old_precision = out.precision(17);
  out << "trial,cycle,kernel,normalized_error\n";
  for (const TrialResult& t : report.trials) {
    if (t.status != TrialStatus::Ok) continue;
    for (std::size_t k = 0; k < t.errors.size(); ++k) {
      for (std::size_t c = 0; c < t.errors[k].size(); ++c) {
        out << t.trial << ',' << c + 1 << ',' << to_string(report.kernels[k]) << ','
            << t.errors[k][c] << '\n';
      }
    }
  }
  out.precision(old_precision);
}

std::vector<ConvergenceRow> read_convergence_csv(std::istream& in) {
  std::vector<ConvergenceRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "trial,cycle,kernel,normalized_error") {
    throw ParseError("convergence CSV: missing header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string trial, cycle, kernel, value;
    if (!std::getline(ss, trial, ',') || !std::getline(ss, cycle, ',') ||
        !std::getline(ss, kernel, ',') || !std::getline(ss, value)) {
      throw ParseError("convergence CSV line " + std::to_string(line_no) + ": expected 4 columns");
    }
    try {
      rows.push_back({std::stoul(trial), std::stoul(cycle), parse_kernel_kind(kernel), std::stod(value)});
    } catch (const std::exception& e) {
      throw ParseError("convergence CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::string summary_to_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["trials"] = report.trials.size();
  j["ok"] = report.count(TrialStatus::Ok);
  j["aborted"] = report.count(TrialStatus::Aborted);
  j["degenerate_truth"] = report.count(TrialStatus::DegenerateTruth);
  j["cycles"] = report.cycles;
  j["grid"] = {{"origin_m", {report.grid.origin.x(), report.grid.origin.y()}},
               {"spacing_m", report.grid.spacing},
               {"nx", report.grid.nx},
               {"ny", report.grid.ny}};
  nlohmann::json kernels = nlohmann::json::object();
  for (std::size_t k = 0; k < report.kernels.size(); ++k) {
    nlohmann::json curve = nlohmann::json::array();
    if (k < report.summary.size()) {
      for (std::size_t c = 0; c < report.summary[k].size(); ++c) {
        const CycleSummary& s = report.summary[k][c];
        curve.push_back({{"cycle", c + 1}, {"median", s.median}, {"p0_5", s.lower}, {"p99_5", s.upper}});
      }
    }
    kernels[std::string(to_string(report.kernels[k]))] = std::move(curve);
  }
  j["summary"] = std::move(kernels);
  nlohmann::json excluded = nlohmann::json::array();
  for (const TrialResult& t : report.trials) {
    if (t.status != TrialStatus::Ok) {
      excluded.push_back({{"trial", t.trial}, {"status", std::string(to_string(t.status))}, {"message", t.message}});
    }
  }
  j["excluded"] = std::move(excluded);
  return j.dump(2);
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const auto csv_path = dir / "convergence.csv";
  auto csv = open_for_write(csv_path);
  write_convergence_csv(csv, report);
  check_written(csv, csv_path);

  const auto summary_path = dir / "summary.json";
  auto summary = open_for_write(summary_path);
  summary << summary_to_json(report) << '\n';
  check_written(summary, summary_path);

  for (const TrialResult& t : report.trials) {
    if (t.truth_field.empty()) continue;
    const auto truth_path = dir / ("trial_" + std::to_string(t.trial) + "_truth.csv");
    auto truth = open_for_write(truth_path);
    write_field_csv(truth, report.grid, t.truth_field);
    check_written(truth, truth_path);
    for (std::size_t k = 0; k < t.estimated_fields.size(); ++k) {
      const auto path = dir / ("trial_" + std::to_string(t.trial) + "_" +
                               std::string(to_string(report.kernels[k])) + ".csv");
      auto out = open_for_write(path);
      write_field_csv(out, report.grid, t.estimated_fields[k]);
      check_written(out, path);
    }
  }
}

}  // namespace driftgp
