#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "driftgp/errors.hpp"
#include "driftgp/estimator.hpp"
#include "oracles.hpp"

using namespace driftgp;

namespace {

const HyperParams kHp(35'000.0, 0.5, 3.0);

Cycle straight_cycle(std::size_t n, double dt, const Vec2& current, Vec2 start = {}) {
  Cycle c;
  c.dt = dt;
  const Vec2 v(0.35, 0.0);
  c.dead_reckoned.push_back(start);
  for (std::size_t i = 0; i < n; ++i) c.dead_reckoned.push_back(c.dead_reckoned.back() + dt * v);
  c.gps_fix = c.dead_reckoned.back() + static_cast<double>(n) * dt * current;
  return c;
}

VehicleConfig leg_mission(double gps_noise) {
  VehicleConfig cfg;
  cfg.gps_noise_std = gps_noise;
  cfg.start = Vec2(-1e4, -1e4);
  cfg.waypoints = {Vec2(1e4, -1e4), Vec2(1e4, 1e4), Vec2(-1e4, 1e4), Vec2(-1e4, -1e4)};
  return cfg;
}

}  // namespace

TEST_CASE("e_step") {
  const std::vector<Vec2> dr{Vec2(0, 0), Vec2(10, 0), Vec2(20, 0), Vec2(30, 0)};
  CHECK(e_step(dr, std::vector<Vec2>(3), 60.0) == dr);
  const Vec2 c(0.1, -0.2);
  const auto x = e_step(dr, std::vector<Vec2>(3, c), 60.0);
  for (std::size_t m = 0; m < 4; ++m) CHECK(distance(x[m], dr[m] + static_cast<double>(m) * 60.0 * c) <= 1e-12);
  CHECK_THROWS_AS(e_step(dr, std::vector<Vec2>(4), 60.0), DimensionMismatch);
}

TEST_CASE("e_step with true currents recovers the simulated truth") {
  const auto f = random_gyre(31);
  const MissionLog log = run_mission(leg_mission(0.0), f, 2);
  for (std::size_t k = 0; k < log.cycles.size(); ++k) {
    const auto& truth = log.truth[k];
    std::vector<Vec2> w;
    for (std::size_t t = 0; t + 1 < truth.size(); ++t) w.push_back(eval_field(f, truth[t]));
    const auto x = e_step(log.cycles[k].dead_reckoned, w, log.cycles[k].dt);
    // Truth and reconstruction accumulate the same terms in a different order.
    for (std::size_t t = 0; t < x.size(); ++t) CHECK(distance(x[t], truth[t]) <= 1e-9 * std::max(1.0, truth[t].norm()));
  }
}

TEST_CASE("m_step closed form") {
  const GpModel empty(HyperParams(35'000.0, 0.5, 1e-6), KernelKind::Incompressible);
  const std::vector<Vec2> one_step{Vec2(0, 0), Vec2(21, 0)};

  SUBCASE("single step with empty prior recovers drift / time") {
    const Vec2 drift(12.0, -30.0);
    const auto r = m_step(empty, one_step, drift, 60.0);
    CHECK(distance(r.currents[0], drift / 60.0) <= 1e-6);
  }
  SUBCASE("zero innovation returns the prior mean") {
    const GpModel m(kHp, KernelKind::Incompressible, 1e-4, {Vec2(500, 0)}, {Vec2(0.2, 0.1)});
    const std::vector<Vec2> traj{Vec2(0, 0), Vec2(100, 0), Vec2(200, 0), Vec2(300, 0)};
    const auto mu = predict(m, std::span(traj).first(3), CovarianceMode::None).mean;
    Vec2 cmu;
    for (const Vec2& v : mu) cmu += 60.0 * v;
    const auto r = m_step(m, traj, cmu, 60.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(distance(r.currents[i], mu[i]) <= 1e-12);
  }
  SUBCASE("huge GPS noise ignores the measurement") {
    const GpModel m(HyperParams(35'000.0, 0.5, 1e9), KernelKind::Incompressible, 1e-4, {Vec2(500, 0)},
                    {Vec2(0.2, 0.1)});
    const std::vector<Vec2> traj{Vec2(0, 0), Vec2(100, 0), Vec2(200, 0)};
    const auto mu = predict(m, std::span(traj).first(2), CovarianceMode::None).mean;
    const auto r = m_step(m, traj, Vec2(1e3, -1e3), 60.0);
    for (std::size_t i = 0; i < 2; ++i) CHECK(distance(r.currents[i], mu[i]) <= 1e-8);
  }
  SUBCASE("small GPS noise makes C W match the drift, posterior is PSD") {
    std::mt19937_64 rng(3);
    const auto xs = oracle::random_points(rng, 6, 2e4);
    std::vector<Vec2> ws(6, Vec2(0.1, -0.05));
    const GpModel m(HyperParams(35'000.0, 0.5, 1e-6), KernelKind::Incompressible, 1e-4, xs, ws);
    std::vector<Vec2> traj;
    for (int i = 0; i <= 12; ++i) traj.emplace_back(-5e3 + 800.0 * i, 300.0 * i);
    const Vec2 drift(800.0, 250.0);
    const auto full = m_step(m, traj, drift, 60.0);
    const auto fast = m_step(m, traj, drift, 60.0, CovarianceMode::None);
    Vec2 cw;
    for (const Vec2& w : full.currents) cw += 60.0 * w;
    CHECK(distance(cw, drift) <= 1e-6);
    for (std::size_t i = 0; i < full.currents.size(); ++i) CHECK(distance(full.currents[i], fast.currents[i]) <= 1e-10);
    CHECK(fast.covariance.size() == 0);
    CHECK(full.covariance == full.covariance.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(full.covariance, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * 0.5);
  }
  SUBCASE("degenerate prior with exact GPS is singular") {
    const GpModel m(HyperParams(35'000.0, 0.5, 0.0), KernelKind::Incompressible, 0.0, {Vec2(0, 0)},
                    {Vec2(0.1, 0.0)});
    CHECK_THROWS_AS(m_step(m, one_step, Vec2(6, 0), 60.0), SingularInnovation);
  }
  CHECK_THROWS_AS(m_step(empty, std::vector<Vec2>{Vec2{}}, Vec2{}, 60.0), DimensionMismatch);
}

TEST_CASE("EM on a uniform-current cycle") {
  const Vec2 c(0.12, 0.05);
  const Cycle cycle = straight_cycle(200, 60.0, c);
  const GpModel empty(kHp, KernelKind::Incompressible);
  const EmState s = run_em_cycle(empty, cycle, EmConfig{});
  CHECK(s.converged);
  CHECK(s.trajectory.size() == s.currents.size() + 1);
  const Vec2 avg = cycle.drift() / (200 * 60.0);
  for (const Vec2& w : s.currents) CHECK(distance(w, avg) <= 0.05 * avg.norm());
  CHECK(distance(s.trajectory.back(), cycle.gps_fix) <= kHp.gps_noise_std);
}

TEST_CASE("EM on a zero-drift cycle leaves the track alone") {
  const Cycle cycle = straight_cycle(50, 60.0, Vec2{});
  const EmState s = run_em_cycle(GpModel(kHp, KernelKind::Incompressible), cycle, EmConfig{});
  CHECK(s.converged);
  CHECK(s.iteration == 1);
  for (const Vec2& w : s.currents) CHECK(w.norm() <= 1e-15);
  CHECK(s.trajectory == cycle.dead_reckoned);
}

TEST_CASE("EM on simulated double-gyre cycles: drift residual and descent") {
  for (std::uint64_t seed : {3u, 8u}) {
    const auto f = random_gyre(seed);
    const MissionLog log = run_mission(leg_mission(3.0), f, seed);
    GpModel model(kHp, KernelKind::Incompressible);
    for (const Cycle& c : log.cycles) {
      const EmState s = run_em_cycle(model, c, EmConfig{});
      CHECK(s.residuals.back() <= std::max(kHp.gps_noise_std, 1e-3));
      for (std::size_t i = 1; i < s.residuals.size(); ++i) CHECK(s.residuals[i] <= s.residuals[i - 1] + 1.0);
      auto [xs, ws] = downsample_targets(std::span(s.trajectory).first(s.currents.size()), s.currents, 1750.0);
      model = add_pseudo_targets(model, xs, ws);
    }
  }
}

TEST_CASE("process_mission") {
  SUBCASE("empty log") {
    const MissionEstimate est = process_mission(MissionLog{}, kHp, KernelKind::Incompressible, EmConfig{});
    CHECK(est.model.empty());
    CHECK(est.cycles.empty());
  }
  SUBCASE("single uniform cycle predicts the current near the track") {
    const Vec2 c(-0.1, 0.15);
    MissionLog log;
    log.cycles.push_back(straight_cycle(300, 60.0, c));
    const MissionEstimate est = process_mission(log, kHp, KernelKind::Incompressible, EmConfig{});
    REQUIRE(est.cycles[0].state);
    CHECK(est.cycles[0].targets_added >= 2);
    for (const Vec2& p : est.cycles[0].state->trajectory) {
      CHECK(distance(predict(est.model, std::vector<Vec2>{p}, CovarianceMode::None).mean[0], c) <= 0.1 * c.norm());
    }
  }
  SUBCASE("a bad cycle is recorded and processing continues") {
    MissionLog log;
    log.cycles.push_back(straight_cycle(20, 60.0, Vec2(0.1, 0)));
    Cycle bad;
    bad.dt = 60.0;
    bad.dead_reckoned = {Vec2{}};
    log.cycles.push_back(bad);
    log.cycles.push_back(straight_cycle(20, 60.0, Vec2(0.1, 0), log.cycles[0].gps_fix));
    std::vector<std::size_t> seen;
    const MissionEstimate est = process_mission(log, kHp, KernelKind::Incompressible, EmConfig{},
                                                [&](std::size_t k, const GpModel&) { seen.push_back(k); });
    CHECK(seen == std::vector<std::size_t>{0, 1, 2});
    CHECK(est.cycles[1].error.has_value());
    CHECK(est.cycles[0].state.has_value());
    CHECK(est.cycles[2].state.has_value());
  }
  SUBCASE("each cycle depends only on the model handed to it") {
    const auto f = random_gyre(5);
    const MissionLog log = run_mission(leg_mission(3.0), f, 5);
    EmConfig cfg;
    std::vector<GpModel> before;
    GpModel running(kHp, KernelKind::Incompressible);
    const MissionEstimate est = process_mission(log, kHp, KernelKind::Incompressible, cfg,
                                                [&](std::size_t, const GpModel& m) { before.push_back(m); });
    for (std::size_t k = 0; k < log.cycles.size(); ++k) {
      const GpModel& prior = k == 0 ? running : before[k - 1];
      const EmState again = run_em_cycle(prior, log.cycles[k], cfg);
      CHECK(again.currents == est.cycles[k].state->currents);
    }
    const MissionEstimate twice = process_mission(log, kHp, KernelKind::Incompressible, cfg);
    CHECK(twice.model.currents() == est.model.currents());
    const std::string diag = diagnostics_to_json(est, log);
    CHECK(diag.find("\"converged\"") != std::string::npos);
  }
}
