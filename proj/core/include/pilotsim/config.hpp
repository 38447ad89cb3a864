#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pilotsim/engine.hpp"

namespace pilotsim::config {

// Raised for unreadable, malformed, or infeasible configuration files. `line`
// is 1-based, or 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& where, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

enum class SweepAxis { kTau, kScheme, kProtectedUes, kNk };

std::string_view to_string(SweepAxis axis);

struct SweepPoint {
  std::string label;  // value along the axis, as written in the file
  engine::SimConfig config;
};

struct SweepSpec {
  engine::SimConfig base;
  SweepAxis axis = SweepAxis::kTau;
  std::vector<std::string> values;

  /// One config per value; throws ConfigError if any point is infeasible.
  std::vector<SweepPoint> points() const;
};

using ParsedConfig = std::variant<engine::SimConfig, SweepSpec>;

/// Reads a `key = value` file (or a flat JSON object, as written to
/// resolved_config.json). Unknown and duplicate keys are rejected; omitted
/// physical parameters keep their defaults. Feasibility of every resulting
/// campaign is checked before returning.
ParsedConfig parse_config(const std::filesystem::path& path);

/// Same as parse_config for in-memory text; `name` is used in diagnostics.
ParsedConfig parse_config_text(std::string_view text, const std::string& name = "<config>");

/// Keys accepted by the parser, in the order written to resolved_config.json.
const std::vector<std::string>& known_keys();

/// JSON object holding every key of `config` (pretty-printed, trailing newline).
std::string to_json(const engine::SimConfig& config);

}  // namespace pilotsim::config
