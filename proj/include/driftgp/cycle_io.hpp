#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "driftgp/simulator.hpp"

namespace driftgp {

struct LatLon {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

/// Mean Earth radius used by the equirectangular projection (m).
inline constexpr double kEarthRadius = 6'371'008.8;

/// Local tangent-plane metres about `origin`: x east, y north.
Vec2 project_equirectangular(const LatLon& origin, const LatLon& p);
LatLon unproject_equirectangular(const LatLon& origin, const Vec2& p);

/// JSON Lines, one cycle per line:
///   {"dt_s":..., "dead_reckoned_m":[[x,y],...], "gps_fix_m":[x,y], "drift_m":[dx,dy]}
/// drift_m is written for convenience and validated on read.
void write_cycles(std::ostream& out, const MissionLog& log);
void write_cycles(const std::filesystem::path& path, const MissionLog& log);

/// Parses a cycle log. Optional first line {"origin_latlon":[lat,lon]} enables
/// cycles given as "dead_reckoned_latlon"/"gps_fix_latlon" in degrees.
/// Throws ParseError (with line number) or ValidationError.
MissionLog read_cycles(std::istream& in);
MissionLog ingest_cycles(const std::filesystem::path& path);

}  // namespace driftgp
