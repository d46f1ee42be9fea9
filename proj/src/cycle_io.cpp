#include "driftgp/cycle_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "driftgp/errors.hpp"
#include "json.hpp"

namespace driftgp {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kDriftTolerance = 1e-6;  // m
constexpr double kChainTolerance = 1e-6;  // m

using nlohmann::json;

Vec2 pair_at(const json& j, const char* key) {
  const auto& p = j.at(key);
  if (!p.is_array() || p.size() != 2) {
    throw std::invalid_argument(std::string("'") + key + "' must be a [a, b] pair");
  }
  return {p[0].get<double>(), p[1].get<double>()};
}

std::vector<Vec2> pairs_at(const json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw std::invalid_argument(std::string("'") + key + "' must be an array");
  std::vector<Vec2> out;
  out.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      throw std::invalid_argument(std::string("'") + key + "' entries must be [a, b] pairs");
    }
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

json to_pair(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

Vec2 project_equirectangular(const LatLon& origin, const LatLon& p) {
  const double cos_lat = std::cos(origin.lat_deg * kDegToRad);
  return {kEarthRadius * (p.lon_deg - origin.lon_deg) * kDegToRad * cos_lat,
          kEarthRadius * (p.lat_deg - origin.lat_deg) * kDegToRad};
}

LatLon unproject_equirectangular(const LatLon& origin, const Vec2& p) {
  const double cos_lat = std::cos(origin.lat_deg * kDegToRad);
  return {origin.lat_deg + p.y() / kEarthRadius / kDegToRad,
          origin.lon_deg + p.x() / (kEarthRadius * cos_lat) / kDegToRad};
}

void write_cycles(std::ostream& out, const MissionLog& log) {
  for (const Cycle& c : log.cycles) {
    json j;
    j["dt_s"] = c.dt;
    auto track = json::array();
    for (const Vec2& p : c.dead_reckoned) track.push_back(to_pair(p));
    j["dead_reckoned_m"] = std::move(track);
    j["gps_fix_m"] = to_pair(c.gps_fix);
    j["drift_m"] = to_pair(c.drift());
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write_cycles: stream write failed");
}

void write_cycles(const std::filesystem::path& path, const MissionLog& log) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_cycles(out, log);
}

MissionLog read_cycles(std::istream& in) {
  MissionLog log;
  std::optional<LatLon> origin;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(where + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");

    Cycle c;
    try {
      if (j.contains("origin_latlon")) {
        if (!log.cycles.empty() || origin) {
          throw std::invalid_argument("'origin_latlon' header must be the first line");
        }
        const Vec2 o = pair_at(j, "origin_latlon");
        origin = LatLon{o.x(), o.y()};
        continue;
      }
      c.dt = j.at("dt_s").get<double>();
      if (j.contains("dead_reckoned_m")) {
        c.dead_reckoned = pairs_at(j, "dead_reckoned_m");
        c.gps_fix = pair_at(j, "gps_fix_m");
      } else {
        if (!origin) throw std::invalid_argument("lat/lon cycle without an 'origin_latlon' header");
        for (const Vec2& ll : pairs_at(j, "dead_reckoned_latlon")) {
          c.dead_reckoned.push_back(project_equirectangular(*origin, {ll.x(), ll.y()}));
        }
        const Vec2 fix = pair_at(j, "gps_fix_latlon");
        c.gps_fix = project_equirectangular(*origin, {fix.x(), fix.y()});
      }
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const std::domain_error& e) {
      throw ParseError(where + ": " + e.what());
    }

    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (j.contains("drift_m")) {
      Vec2 stated;
      try {
        stated = pair_at(j, "drift_m");
      } catch (const std::exception& e) {
        throw ParseError(where + ": " + e.what());
      }
      if (distance(stated, c.drift()) > kDriftTolerance) {
        throw ValidationError(where + ": drift_m differs from gps_fix_m minus last dead-reckoned point");
      }
    }
    if (!log.cycles.empty() &&
        distance(log.cycles.back().gps_fix, c.dead_reckoned.front()) > kChainTolerance) {
      log.warnings.push_back(where + ": dive-in point does not match the previous GPS fix");
    }
    log.cycles.push_back(std::move(c));
  }
  return log;
}

MissionLog ingest_cycles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cycle log '" + path.string() + "'");
  return read_cycles(in);
}

}  // namespace driftgp
