#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftgp/estimator.hpp"
#include "driftgp/flowfield.hpp"
#include "driftgp/kernels.hpp"
#include "driftgp/parallel.hpp"
#include "driftgp/simulator.hpp"

namespace driftgp {

/// Truth speeds below this are excluded from the normalised error (m/s).
inline constexpr double kSpeedMask = 1e-3;

/// sum |est - truth| / sum |truth| over points with |truth| > kSpeedMask.
/// Throws DegenerateTruth when no point passes the mask.
double normalized_error(std::span<const Vec2> estimate, std::span<const Vec2> truth);
double normalized_error(const VectorField& estimate, const AnalyticField& truth, const Grid& grid);

struct RunConfig {
  HyperParams hp;
  VehicleConfig vehicle = VehicleConfig::loop_mission();
  EmConfig em;
  std::vector<KernelKind> kernels{KernelKind::Incompressible, KernelKind::StandardDiagonal};
  /// Error grid; when unset, grid_points^2 over the waypoint bounding box padded by lengthscale / 2.
  std::optional<Grid> grid;
  std::size_t grid_points = 20;
  std::size_t trials = 20;
  std::uint64_t base_seed = 1;
  GyreSampling gyre;
  /// Replaces the per-trial random gyre when set.
  std::optional<AnalyticField> fixed_field;
  /// Keep final truth and estimated grid fields per trial for emission.
  bool keep_fields = false;

  void validate() const;
  Grid error_grid() const;
};

/// Seeds derived from base_seed for one trial.
struct TrialSeeds {
  std::uint64_t field;
  std::uint64_t mission;
};
TrialSeeds trial_seeds(std::uint64_t base_seed, std::size_t trial);

enum class TrialStatus { Ok, Aborted, DegenerateTruth };
std::string_view to_string(TrialStatus status);

struct TrialResult {
  std::size_t trial = 0;
  TrialStatus status = TrialStatus::Ok;
  std::string message;
  /// errors[kernel][cycle] after processing cycles 0..cycle.
  std::vector<std::vector<double>> errors;
  std::vector<Vec2> truth_field;
  std::vector<std::vector<Vec2>> estimated_fields;  // per kernel, after the last cycle
};

struct CycleSummary {
  double median = 0.0;
  double lower = 0.0;  // 0.5th percentile
  double upper = 0.0;  // 99.5th percentile
};

struct ConvergenceReport {
  std::vector<KernelKind> kernels;
  std::size_t cycles = 0;
  Grid grid;
  std::vector<TrialResult> trials;
  /// summary[kernel][cycle] over trials with status Ok.
  std::vector<std::vector<CycleSummary>> summary;

  std::size_t count(TrialStatus status) const;
};

/// One Monte Carlo trial: random gyre, mission, GP-EM with every kernel.
TrialResult run_trial(const RunConfig& cfg, std::size_t trial);

/// Runs every trial (OpenMP across trials, or serially) and summarises.
/// The report is identical for both execution paths.
ConvergenceReport monte_carlo(const RunConfig& cfg, Execution exec = Execution::Parallel);

/// Linear-interpolation percentile, q in [0, 1]; input need not be sorted.
double percentile(std::vector<double> values, double q);

void summarize(ConvergenceReport& report);

/// convergence.csv rows: trial,cycle,kernel,normalized_error (cycle is 1-based).
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

struct ConvergenceRow {
  std::size_t trial;
  std::size_t cycle;
  KernelKind kernel;
  double normalized_error;
};
std::vector<ConvergenceRow> read_convergence_csv(std::istream& in);

std::string summary_to_json(const ConvergenceReport& report);

/// Writes convergence.csv, summary.json and, when fields were kept,
/// trial_<i>_truth.csv plus trial_<i>_<kernel>.csv.
void emit_report(const ConvergenceReport& report, const std::filesystem::path& dir);

}  // namespace driftgp
