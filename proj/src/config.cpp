#include "driftgp/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "driftgp/errors.hpp"

namespace driftgp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a non-negative integer");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError("config key '" + key + "': '" + text + "' is not a boolean");
}

Vec2 to_vec2(const std::string& key, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("config key '" + key + "': expected 'x, y'");
  return {to_double(key, text.substr(0, comma)), to_double(key, text.substr(comma + 1))};
}

std::vector<Vec2> to_vec2_list(const std::string& key, const std::string& text) {
  std::vector<Vec2> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (!trim(item).empty()) out.push_back(to_vec2(key, item));
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "lengthscale_m", "current_variance_m2ps2", "gps_noise_std_m",
      "speed_mps", "dt_s", "surface_tolerance_m", "max_steps_per_cycle", "start_m", "waypoints_m",
      "loop_waypoints", "loop_radius_m", "loop_centre_m",
      "em_max_iters", "em_tol_m", "pseudo_target_spacing_m", "target_noise_var_m2ps2",
      "kernel", "grid_points", "grid_origin_m", "grid_spacing_m", "grid_nx", "grid_ny",
      "trials", "base_seed", "keep_fields",
      "field", "gyre_amplitude_m2ps", "gyre_extent_m", "gyre_phase_rad", "uniform_speed_mps",
      "uniform_direction", "gyre_min_peak_mps", "gyre_max_peak_mps", "gyre_min_extent_m",
      "gyre_max_extent_m"};
  return keys;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

AnalyticField FieldSpec::resolve(std::uint64_t seed, const GyreSampling& ranges) const {
  return source == Source::RandomGyre ? random_gyre(seed, ranges) : field;
}

LoadedConfig config_from_key_values(const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (!known_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  auto has = [&](const char* key) { return kv.contains(key); };
  auto num = [&](const char* key) { return to_double(key, kv.at(key)); };
  auto uint = [&](const char* key) { return to_uint(key, kv.at(key)); };
  auto vec = [&](const char* key) { return to_vec2(key, kv.at(key)); };

  LoadedConfig cfg;
  RunConfig& run = cfg.run;
  if (has("lengthscale_m")) run.hp.lengthscale = num("lengthscale_m");
  if (has("current_variance_m2ps2")) run.hp.current_variance = num("current_variance_m2ps2");
  if (has("gps_noise_std_m")) {
    run.hp.gps_noise_std = num("gps_noise_std_m");
    run.vehicle.gps_noise_std = run.hp.gps_noise_std;
  }

  VehicleConfig& v = run.vehicle;
  if (has("loop_waypoints") || has("loop_radius_m") || has("loop_centre_m")) {
    const auto count = has("loop_waypoints") ? uint("loop_waypoints") : 8;
    const double radius = has("loop_radius_m") ? num("loop_radius_m") : 20'000.0;
    const Vec2 centre = has("loop_centre_m") ? vec("loop_centre_m") : Vec2{};
    const VehicleConfig loop = VehicleConfig::loop_mission(count, radius, centre);
    v.waypoints = loop.waypoints;
    v.start = loop.start;
  }
  if (has("waypoints_m")) {
    v.waypoints = to_vec2_list("waypoints_m", kv.at("waypoints_m"));
    if (!has("start_m") && !v.waypoints.empty()) v.start = v.waypoints.back();
  }
  if (has("start_m")) v.start = vec("start_m");
  if (has("speed_mps")) v.speed = num("speed_mps");
  if (has("dt_s")) v.dt = num("dt_s");
  if (has("surface_tolerance_m")) v.surface_tolerance = num("surface_tolerance_m");
  if (has("max_steps_per_cycle")) v.max_steps_per_cycle = uint("max_steps_per_cycle");

  EmConfig& em = run.em;
  if (has("em_max_iters")) em.max_iters = uint("em_max_iters");
  if (has("em_tol_m")) em.convergence_tol = num("em_tol_m");
  em.pseudo_target_spacing =
      has("pseudo_target_spacing_m") ? num("pseudo_target_spacing_m") : run.hp.lengthscale / 20.0;
  if (has("target_noise_var_m2ps2")) em.target_noise_var = num("target_noise_var_m2ps2");

  if (has("kernel")) {
    const std::string k = kv.at("kernel");
    if (k == "both") {
      run.kernels = {KernelKind::Incompressible, KernelKind::StandardDiagonal};
    } else {
      try {
        run.kernels = {parse_kernel_kind(k)};
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config key 'kernel': ") + e.what());
      }
    }
  }
  if (has("grid_points")) run.grid_points = uint("grid_points");
  if (has("grid_origin_m") || has("grid_spacing_m") || has("grid_nx") || has("grid_ny")) {
    if (!(has("grid_origin_m") && has("grid_spacing_m") && has("grid_nx") && has("grid_ny"))) {
      throw ConfigError("explicit grid needs grid_origin_m, grid_spacing_m, grid_nx and grid_ny");
    }
    try {
      run.grid = Grid(vec("grid_origin_m"), num("grid_spacing_m"), uint("grid_nx"), uint("grid_ny"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (has("trials")) run.trials = uint("trials");
  if (has("base_seed")) run.base_seed = uint("base_seed");
  if (has("keep_fields")) run.keep_fields = to_bool("keep_fields", kv.at("keep_fields"));

  if (has("gyre_min_peak_mps")) run.gyre.min_peak_speed = num("gyre_min_peak_mps");
  if (has("gyre_max_peak_mps")) run.gyre.max_peak_speed = num("gyre_max_peak_mps");
  if (has("gyre_min_extent_m")) run.gyre.min_extent = num("gyre_min_extent_m");
  if (has("gyre_max_extent_m")) run.gyre.max_extent = num("gyre_max_extent_m");

  try {
    const std::string kind = has("field") ? kv.at("field") : "random_gyre";
    if (kind == "random_gyre") {
      cfg.field.source = FieldSpec::Source::RandomGyre;
    } else {
      cfg.field.source = FieldSpec::Source::Fixed;
      if (kind == "zero") {
        cfg.field.field = AnalyticField::zero();
      } else if (kind == "uniform") {
        const Vec2 dir = has("uniform_direction") ? vec("uniform_direction") : Vec2(1.0, 0.0);
        cfg.field.field = AnalyticField::uniform(num("uniform_speed_mps"), dir / dir.norm());
      } else if (kind == "double_gyre") {
        const Vec2 extent = has("gyre_extent_m") ? vec("gyre_extent_m") : Vec2(5e4, 5e4);
        const Vec2 phase = has("gyre_phase_rad") ? vec("gyre_phase_rad") : Vec2{};
        cfg.field.field = AnalyticField::double_gyre(num("gyre_amplitude_m2ps"), extent.x(),
                                                     extent.y(), phase.x(), phase.y());
      } else {
        throw ConfigError("config key 'field': unknown field '" + kind + "'");
      }
      run.fixed_field = cfg.field.field;
    }
    run.validate();
  } catch (const std::out_of_range&) {
    throw ConfigError("config: field parameters missing for the chosen field");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

LoadedConfig load_config(std::istream& in) { return config_from_key_values(parse_key_values(in)); }

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return load_config(in);
}

}  // namespace driftgp
