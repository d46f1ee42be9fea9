// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and runtime limits are pinned below.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "driftgp/cycle_io.hpp"
#include "driftgp/estimator.hpp"
#include "driftgp/gp.hpp"
#include "driftgp/harness.hpp"

using namespace driftgp;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr std::size_t kFdLags = 100;
constexpr double kFdTol = 1e-5;
constexpr double kFdStepFraction = 1e-4;  // h / lengthscale
constexpr double kFdFloor = 1e-3;         // relative-error floor, fraction of the local envelope
// Criterion 2
constexpr std::size_t kPsdMatrices = 20;
constexpr std::size_t kPsdPoints = 40;
constexpr double kPsdTol = 1e-8;  // times sigma_W^2
// Criterion 3
constexpr std::size_t kOracleProblems = 50;
constexpr double kOracleTol = 1e-8;  // norm-wise relative
// Criterion 4
constexpr std::size_t kDivSamples = 30;
constexpr std::size_t kDivGrid = 15;
constexpr double kDivTol = 1e-3;  // times max predicted speed / lengthscale
// Criterion 5
constexpr double kRecoveryNoise = 1e-6;  // m
constexpr double kRecoveryTol = 1e-6;    // m/s
// Criterion 6
constexpr std::size_t kDriftCycles = 20;
// Criterion 7: cycle-8 median must be at most this fraction of the cycle-1
// median. Frozen after a single pilot run of the default scenario (ratio 0.470).
constexpr double kConvergenceRatio = 0.70;
// Criterion 9
constexpr double kRoundTripTol = 1e-10;

const HyperParams kHp;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

Eigen::MatrixXd stack(const std::vector<Vec2>& v) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(v.size()), 2);
  for (std::size_t i = 0; i < v.size(); ++i) out.row(static_cast<Eigen::Index>(i)) << v[i].x(), v[i].y();
  return out;
}

Outcome kernel_finite_differences() {
  const double l = kHp.lengthscale;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3 * l, 3 * l);
  double worst = 0.0;
  for (std::size_t i = 0; i < kFdLags; ++i) {
    const Vec2 x(u(rng), u(rng));
    const Vec2 xp = 0.1 * Vec2(u(rng), u(rng));
    const Mat2 analytic = eval_kernel(kHp, KernelKind::Incompressible, x, xp);
    const Mat2 fd = oracle::kernel_from_scalar_fd(kHp, x, xp, kFdStepFraction * l);
    const double envelope = kHp.current_variance * std::exp(-(x - xp).squared_norm() / (2 * l * l));
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        worst = std::max(worst, oracle::rel_err(fd(r, c), analytic(r, c), kFdFloor * envelope));
  }
  const Vec2 p(1234.5, -678.9);
  const bool zero_lag = eval_kernel(kHp, KernelKind::Incompressible, p, p) ==
                        Mat2(kHp.current_variance * Mat2::Identity());
  return {worst <= kFdTol && zero_lag,
          fmt("max relative error %.2e", worst) + (zero_lag ? ", zero lag = sigma_W^2 I" : ", zero lag WRONG")};
}

Outcome gram_psd() {
  std::mt19937_64 rng(12);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < kPsdMatrices; ++m) {
    const KernelKind kind = m % 2 == 0 ? KernelKind::Incompressible : KernelKind::StandardDiagonal;
    const auto pts = oracle::random_points(rng, kPsdPoints, (m % 4 < 2 ? 2.0 : 0.05) * kHp.lengthscale);
    const Eigen::MatrixXd k = build_gram_matrix(kHp, kind, pts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    worst = std::min(worst, eig.eigenvalues()(0));
  }
  return {worst >= -kPsdTol * kHp.current_variance, fmt("min eigenvalue %.3e", worst)};
}

Outcome gp_oracle() {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> n_data(1, 50), n_query(1, 20);
  std::normal_distribution<double> g(0.0, 0.3);
  double worst = 0.0;
  for (std::size_t p = 0; p < kOracleProblems; ++p) {
    const KernelKind kind = p % 2 == 0 ? KernelKind::Incompressible : KernelKind::StandardDiagonal;
    const auto xs = oracle::random_points(rng, n_data(rng), 1.5 * kHp.lengthscale);
    std::vector<Vec2> ws;
    for (std::size_t i = 0; i < xs.size(); ++i) ws.emplace_back(g(rng), g(rng));
    const auto qs = oracle::random_points(rng, n_query(rng), 1.5 * kHp.lengthscale);
    const GpModel model(kHp, kind, kDefaultTargetNoiseVar, xs, ws);
    const Prediction pred = predict(model, qs, CovarianceMode::Full);
    const auto dense = oracle::dense_predict(kHp, kind, model.regularization(), xs, ws, qs);
    Eigen::VectorXd mean(2 * static_cast<Eigen::Index>(qs.size()));
    for (std::size_t i = 0; i < qs.size(); ++i) mean.segment<2>(2 * i) << pred.mean[i].x(), pred.mean[i].y();
    worst = std::max({worst, rel_norm(mean, dense.mean), rel_norm(pred.covariance, dense.cov)});
  }
  return {worst <= kOracleTol, fmt("max relative deviation %.2e", worst)};
}

Outcome divergence_free_posterior() {
  const AnalyticField truth = random_gyre(14);
  std::mt19937_64 rng(14);
  const double half = 30'000.0;
  const Vec2 centre;
  const auto xs = oracle::random_points(rng, kDivSamples, half, centre);
  std::vector<Vec2> ws;
  for (const Vec2& x : xs) ws.push_back(eval_field(truth, x));
  const GpModel model(kHp, KernelKind::Incompressible, kDefaultTargetNoiseVar, xs, ws);

  const Grid grid = Grid::covering(centre - Vec2(half, half), centre + Vec2(half, half), 0.0, kDivGrid);
  const auto mean = predict_mean_on_grid(model, grid);
  double max_speed = 0.0;
  for (const Vec2& w : mean) max_speed = std::max(max_speed, w.norm());
  const VectorField f = [&](const Vec2& p) { return predict(model, std::span(&p, 1), CovarianceMode::None).mean[0]; };
  double worst = 0.0;
  for (const Vec2& p : grid.points()) worst = std::max(worst, std::abs(divergence_fd(f, p, 1e-3 * kHp.lengthscale)));
  const double bound = kDivTol * max_speed / kHp.lengthscale;
  return {worst <= bound, fmt("max |div| %.2e", worst) + fmt(" vs bound %.2e 1/s", bound)};
}

Outcome average_current_recovery() {
  const HyperParams hp(kHp.lengthscale, kHp.current_variance, kRecoveryNoise);
  Cycle cycle;
  cycle.dt = 60.0;
  cycle.dead_reckoned = {Vec2(100.0, 200.0), Vec2(121.0, 200.0)};
  cycle.gps_fix = Vec2(127.3, 195.2);
  const EmState state = run_em_cycle(GpModel(hp, KernelKind::Incompressible), cycle, EmConfig{});
  const Vec2 expected = cycle.drift() / cycle.dt;
  const double err = distance(state.currents.at(0), expected);
  return {state.currents.size() == 1 && err <= kRecoveryTol, fmt("|W - drift/dt| = %.2e m/s", err)};
}

Outcome drift_consistency() {
  const AnalyticField field = AnalyticField::double_gyre(6'000.0, 50'000.0, 50'000.0, 0.4, 1.3);
  VehicleConfig vehicle = VehicleConfig::loop_mission(kDriftCycles, 12'000.0, Vec2(25'000.0, 25'000.0));
  const MissionLog log = run_mission(vehicle, field, 16);
  const MissionEstimate est = process_mission(log, kHp, KernelKind::Incompressible, EmConfig{});
  const double bound = 3.0 * vehicle.gps_noise_std + 1.0;
  double worst = 0.0;
  std::size_t converged = 0;
  bool all = est.cycles.size() == kDriftCycles;
  for (std::size_t k = 0; k < est.cycles.size(); ++k) {
    if (!est.cycles[k].state) {
      all = false;
      continue;
    }
    const EmState& s = *est.cycles[k].state;
    converged += s.converged ? 1 : 0;
    Vec2 sum;
    for (const Vec2& w : s.currents) sum += w;
    worst = std::max(worst, distance(log.cycles[k].dt * sum, log.cycles[k].drift()));
  }
  all = all && converged == kDriftCycles;
  return {all && worst <= bound, std::to_string(converged) + "/" + std::to_string(kDriftCycles) +
                                     " converged" + fmt(", max residual %.3f m", worst) +
                                     fmt(" vs bound %.1f m", bound)};
}

ConvergenceReport g_report;

Outcome convergence_study() {
  const RunConfig cfg;
  g_report = monte_carlo(cfg);
  const auto& inc = g_report.summary.at(0);
  const auto& std_ = g_report.summary.at(1);
  if (g_report.kernels[0] != KernelKind::Incompressible || inc.size() < 8 || std_.size() < 8) {
    return {false, "unexpected report layout"};
  }
  const double ratio = inc[7].median / inc[0].median;
  const bool a = ratio <= kConvergenceRatio;
  const bool b = inc.back().median <= std_.back().median;
  return {a && b, fmt("(a) cycle8/cycle1 median %.3f", ratio) + fmt(" (limit %.2f)", kConvergenceRatio) +
                      (a ? " ok" : " FAIL") + fmt("; (b) final incompressible %.3f", inc.back().median) +
                      fmt(" vs standard %.3f", std_.back().median) + (b ? " ok" : " FAIL") + ", " +
                      std::to_string(g_report.count(TrialStatus::Ok)) + " trials"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "driftgp_acceptance_determinism";
  fs::remove_all(root);
  emit_report(g_report, root / "a");
  emit_report(monte_carlo(RunConfig{}), root / "b");
  const std::string a = slurp(root / "a" / "convergence.csv");
  const std::string b = slurp(root / "b" / "convergence.csv");
  fs::remove_all(root);
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes" + (a == b ? ", identical" : ", DIFFER")};
}

Outcome ingestion_round_trip() {
  const RunConfig cfg;
  const MissionLog log = run_mission(cfg.vehicle, random_gyre(19), 19);
  const fs::path path = fs::temp_directory_path() / "driftgp_acceptance_cycles.jsonl";
  write_cycles(path, log);
  const MissionLog back = ingest_cycles(path);
  fs::remove(path);

  double worst = 0.0;
  bool same_shape = true;
  for (KernelKind kind : {KernelKind::Incompressible, KernelKind::StandardDiagonal}) {
    const MissionEstimate mem = process_mission(log, cfg.hp, kind, cfg.em);
    const MissionEstimate disk = process_mission(back, cfg.hp, kind, cfg.em);
    same_shape = same_shape && mem.model.size() == disk.model.size() && mem.cycles.size() == disk.cycles.size();
    if (!same_shape) break;
    worst = std::max({worst, rel_norm(stack(mem.model.positions()), stack(disk.model.positions())),
                      rel_norm(stack(mem.model.currents()), stack(disk.model.currents()))});
    for (std::size_t k = 0; k < mem.cycles.size(); ++k) {
      const auto& a = mem.cycles[k].state;
      const auto& b = disk.cycles[k].state;
      if (a.has_value() != b.has_value()) {
        same_shape = false;
        break;
      }
      if (a) worst = std::max({worst, rel_norm(stack(a->currents), stack(b->currents)),
                               rel_norm(stack(a->trajectory), stack(b->trajectory))});
    }
  }
  return {same_shape && worst <= kRoundTripTol,
          std::to_string(log.cycles.size()) + " cycles" + fmt(", max relative deviation %.2e", worst)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "kernel finite differences", 1.0, kernel_finite_differences},
      {2, "gram matrices PSD", 5.0, gram_psd},
      {3, "GP matches dense oracle", 10.0, gp_oracle},
      {4, "divergence-free posterior", 5.0, divergence_free_posterior},
      {5, "average-current recovery", 1.0, average_current_recovery},
      {6, "EM drift consistency", 30.0, drift_consistency},
      {7, "convergence study", available_threads() > 1 ? 120.0 : 600.0, convergence_study},
      {8, "deterministic convergence.csv", 600.0, determinism},
      {9, "ingestion round trip", 30.0, ingestion_round_trip},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
