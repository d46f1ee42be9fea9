#include "driftgp/simulator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "driftgp/errors.hpp"

namespace driftgp {

void VehicleConfig::validate() const {
  if (!(speed > 0.0)) throw std::invalid_argument("VehicleConfig: speed must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("VehicleConfig: dt must be positive");
  if (!(surface_tolerance > 0.0)) {
    throw std::invalid_argument("VehicleConfig: surface tolerance must be positive");
  }
  if (!(gps_noise_std >= 0.0)) throw std::invalid_argument("VehicleConfig: negative GPS noise");
  if (waypoints.empty()) throw std::invalid_argument("VehicleConfig: at least one waypoint");
  if (max_steps_per_cycle < 1) throw std::invalid_argument("VehicleConfig: max_steps must be >= 1");
}

VehicleConfig VehicleConfig::loop_mission(std::size_t count, double radius, Vec2 centre) {
  VehicleConfig cfg;
  for (std::size_t k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    cfg.waypoints.push_back(centre + radius * Vec2(std::cos(angle), std::sin(angle)));
  }
  if (!cfg.waypoints.empty()) cfg.start = cfg.waypoints.back();
  return cfg;
}

void Cycle::validate() const {
  if (dead_reckoned.size() < 2) {
    throw ValidationError("cycle needs at least one step (two dead-reckoned points)");
  }
  if (!(dt > 0.0)) throw ValidationError("cycle dt must be positive");
}

Vec2 step_truth(const Vec2& p, const Vec2& v, const Vec2& w, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_truth: dt must be positive");
  return p + (v + w) * dt;
}

Vec2 step_dead_reckoned(const Vec2& p, const Vec2& v, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_dead_reckoned: dt must be positive");
  return p + v * dt;
}

MissionLog run_mission(const VehicleConfig& cfg, const AnalyticField& field, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto gps = [&](const Vec2& truth) {
    if (cfg.gps_noise_std == 0.0) return truth;
    const double ex = gauss(rng);
    const double ey = gauss(rng);
    return truth + cfg.gps_noise_std * Vec2(ex, ey);
  };

  MissionLog log;
  log.field = field;
  Vec2 truth = cfg.start;
  Vec2 estimate = gps(truth);
  bool any_reached = false;
  for (const Vec2& waypoint : cfg.waypoints) {
    Cycle cycle;
    cycle.dt = cfg.dt;
    cycle.dead_reckoned.push_back(estimate);
    std::vector<Vec2> truth_track{truth};
    bool reached = false;
    for (std::size_t step = 0; step < cfg.max_steps_per_cycle && !reached; ++step) {
      const Vec2 to_go = waypoint - estimate;
      const double dist = to_go.norm();
      const Vec2 heading = dist > 0.0 ? to_go / dist : Vec2{};
      const Vec2 v = cfg.speed * heading;
      truth = step_truth(truth, v, eval_field(field, truth), cfg.dt);
      estimate = step_dead_reckoned(estimate, v, cfg.dt);
      cycle.dead_reckoned.push_back(estimate);
      truth_track.push_back(truth);
      reached = distance(estimate, waypoint) <= cfg.surface_tolerance;
    }
    cycle.gps_fix = gps(truth);
    estimate = cycle.gps_fix;
    any_reached = any_reached || reached;
    log.cycles.push_back(std::move(cycle));
    log.truth.push_back(std::move(truth_track));
    log.budget_exhausted.push_back(!reached);
  }
  if (!any_reached) {
    throw MissionAborted("run_mission: step budget of " + std::to_string(cfg.max_steps_per_cycle) +
                         " exhausted on every waypoint");
  }
  return log;
}

}  // namespace driftgp
