#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "driftgp/harness.hpp"

namespace driftgp {

/// Flat `key = value` text; `#` starts a comment. Later keys override earlier ones.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Field used by `simulate`.
struct FieldSpec {
  enum class Source { RandomGyre, Fixed } source = Source::RandomGyre;
  AnalyticField field = AnalyticField::zero();

  AnalyticField resolve(std::uint64_t seed, const GyreSampling& ranges) const;
};

struct LoadedConfig {
  RunConfig run;
  FieldSpec field;
};

/// Builds a configuration from key/values on top of the defaults. Unknown
/// keys and malformed values throw ConfigError.
LoadedConfig config_from_key_values(const std::map<std::string, std::string>& kv);
LoadedConfig load_config(const std::filesystem::path& path);
LoadedConfig load_config(std::istream& in);

}  // namespace driftgp
