#include "driftgp/commands.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "driftgp/config.hpp"
#include "driftgp/cycle_io.hpp"
#include "driftgp/errors.hpp"
#include "driftgp/estimator.hpp"
#include "json.hpp"

namespace driftgp {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

void run_simulate(const std::filesystem::path& config, std::uint64_t seed,
                  const std::filesystem::path& out) {
  const LoadedConfig cfg = load_config(config);
  const AnalyticField field = cfg.field.resolve(seed, cfg.run.gyre);
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  write_cycles(out, run_mission(cfg.run.vehicle, field, seed));
}

void run_estimate(const std::filesystem::path& cycles, const std::filesystem::path& hyper,
                  KernelKind kind, const std::filesystem::path& out_dir) {
  const LoadedConfig cfg = load_config(hyper);
  const MissionLog log = ingest_cycles(cycles);
  const MissionEstimate est = process_mission(log, cfg.run.hp, kind, cfg.run.em);

  Grid grid;
  if (cfg.run.grid) {
    grid = *cfg.run.grid;
  } else {
    if (log.cycles.empty()) throw ValidationError("estimate: cycle log is empty and no grid was given");
    Vec2 lo = log.cycles.front().gps_fix;
    Vec2 hi = lo;
    for (const Cycle& c : log.cycles) {
      for (const Vec2& p : c.dead_reckoned) {
        lo = Vec2(std::min(lo.x(), p.x()), std::min(lo.y(), p.y()));
        hi = Vec2(std::max(hi.x(), p.x()), std::max(hi.y(), p.y()));
      }
      lo = Vec2(std::min(lo.x(), c.gps_fix.x()), std::min(lo.y(), c.gps_fix.y()));
      hi = Vec2(std::max(hi.x(), c.gps_fix.x()), std::max(hi.y(), c.gps_fix.y()));
    }
    grid = Grid::covering(lo, hi, 0.5 * cfg.run.hp.lengthscale, cfg.run.grid_points);
  }

  ensure_dir(out_dir);
  write_text(out_dir / "diagnostics.json", diagnostics_to_json(est, log));
  write_text(out_dir / "model.json", model_to_json(est.model));
  std::ofstream csv(out_dir / "field.csv");
  if (!csv) throw IoError("cannot open '" + (out_dir / "field.csv").string() + "' for writing");
  write_field_csv(csv, grid, predict_mean_on_grid(est.model, grid));
}

void run_montecarlo(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                    std::ostream& log) {
  const LoadedConfig cfg = load_config(config);
  log << "montecarlo: " << cfg.run.trials << " trials, " << cfg.run.vehicle.waypoints.size()
      << " waypoints, " << available_threads() << " threads\n";
  const ConvergenceReport report = monte_carlo(cfg.run);
  emit_report(report, out_dir);
  for (std::size_t k = 0; k < report.kernels.size(); ++k) {
    if (report.summary[k].empty()) continue;
    log << to_string(report.kernels[k]) << ": median error cycle 1 = " << report.summary[k].front().median
        << ", final = " << report.summary[k].back().median << '\n';
  }
  log << "excluded trials: " << report.trials.size() - report.count(TrialStatus::Ok) << '\n';
}

std::string kernel_check_json(const KernelCheckOptions& opts) {
  const HyperParams& hp = opts.hp;
  hp.validate();
  std::mt19937_64 rng(opts.seed);
  const double l = hp.lengthscale;
  std::uniform_real_distribution<double> lag(-3.0 * l, 3.0 * l);

  nlohmann::json j;
  const Mat2 zero = eval_kernel(hp, KernelKind::Incompressible, Vec2{}, Vec2{});
  j["zero_lag"] = {{zero(0, 0), zero(0, 1)}, {zero(1, 0), zero(1, 1)}};
  j["zero_lag_equals_variance_identity"] = zero == hp.current_variance * Mat2::Identity();

  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < opts.points; ++i) pts.emplace_back(lag(rng), lag(rng));
  for (KernelKind kind : {KernelKind::Incompressible, KernelKind::StandardDiagonal}) {
    const Eigen::MatrixXd gram = build_gram_matrix(hp, kind, pts);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    j["psd_min_eigenvalue"][std::string(to_string(kind))] = eig.eigenvalues().minCoeff();
  }
  j["psd_threshold"] = -1e-8 * hp.current_variance;

  // Mixed second differences of the scalar kernel in x and x'.
  const double h = l * 1e-4;
  double worst = 0.0;
  for (std::size_t n = 0; n < opts.lags; ++n) {
    const Vec2 x(lag(rng), lag(rng));
    const Vec2 xp{};
    const Mat2 analytic = eval_kernel(hp, KernelKind::Incompressible, x, xp);
    auto mixed = [&](const Vec2& ea, const Vec2& eb) {
      auto k = [&](const Vec2& a, const Vec2& b) { return eval_scalar_kernel(hp, (x + a) - (xp + b)); };
      return (k(ea, eb) - k(ea, -eb) - k(-ea, eb) + k(-ea, -eb)) / (4.0 * h * h);
    };
    const Vec2 ex(h, 0.0);
    const Vec2 ey(0.0, h);
    Mat2 fd;
    fd << mixed(ey, ey), -mixed(ey, ex), -mixed(ex, ey), mixed(ex, ex);
    const double envelope = hp.current_variance * std::exp(-x.squared_norm() / (2.0 * l * l));
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const double denom = std::max(std::abs(analytic(r, c)), 1e-3 * envelope);
        worst = std::max(worst, std::abs(fd(r, c) - analytic(r, c)) / denom);
      }
    }
  }
  j["fd_max_relative_error"] = worst;
  j["fd_step_m"] = h;
  j["fd_lags"] = opts.lags;
  j["fd_tolerance"] = 1e-5;
  return j.dump(2);
}

}  // namespace driftgp
