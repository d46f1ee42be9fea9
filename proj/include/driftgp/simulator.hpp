#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftgp/flowfield.hpp"
#include "driftgp/vec2.hpp"

namespace driftgp {

struct VehicleConfig {
  double speed = 0.35;               // through water, m/s
  double dt = 60.0;                  // s
  double surface_tolerance = 100.0;  // m, on dead-reckoned distance
  double gps_noise_std = 3.0;        // m
  Vec2 start;                        // true position before the first dive, m
  std::vector<Vec2> waypoints;       // m
  std::size_t max_steps_per_cycle = 5000;

  void validate() const;

  /// Closed loop over `count` waypoints on a circle, starting at the last one.
  static VehicleConfig loop_mission(std::size_t count = 8, double radius = 20'000.0,
                                    Vec2 centre = {});
};

/// One dive: dead-reckoned track (n + 1 points, index 0 = dive-in fix) and the
/// GPS fix taken on surfacing.
struct Cycle {
  std::vector<Vec2> dead_reckoned;
  double dt = 0.0;
  Vec2 gps_fix;

  std::size_t steps() const { return dead_reckoned.empty() ? 0 : dead_reckoned.size() - 1; }
  /// gps_fix - last dead-reckoned point.
  Vec2 drift() const { return gps_fix - dead_reckoned.back(); }
  /// Throws ValidationError unless n >= 1 and dt > 0.
  void validate() const;

  friend bool operator==(const Cycle&, const Cycle&) = default;
};

struct MissionLog {
  std::vector<Cycle> cycles;
  /// Simulation only: true positions, same length as each dead-reckoned track.
  std::vector<std::vector<Vec2>> truth;
  /// Simulation only: cycles that surfaced because the step budget ran out.
  std::vector<bool> budget_exhausted;
  std::optional<AnalyticField> field;
  /// Non-fatal ingestion findings (for example non-chaining cycles).
  std::vector<std::string> warnings;
};

/// p + (v + w) dt
Vec2 step_truth(const Vec2& p, const Vec2& v, const Vec2& w, double dt);
/// p + v dt
Vec2 step_dead_reckoned(const Vec2& p, const Vec2& v, double dt);

/// Simulates one cycle per waypoint. The vehicle steers straight at the
/// waypoint in dead-reckoned coordinates and surfaces when its dead-reckoned
/// distance is within the tolerance or the step budget is spent. Throws
/// MissionAborted when no waypoint is reached at all.
MissionLog run_mission(const VehicleConfig& cfg, const AnalyticField& field, std::uint64_t seed);

}  // namespace driftgp
