#include "pilotsim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pilotsim::config {
namespace {

using engine::SimConfig;
using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

struct Field {
  std::string name;
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<json(const SimConfig&)> get;
};

template <typename T>
Field number_field(std::string name, T SimConfig::*member) {
  return {name,
          [member, name](SimConfig& c, std::string_view v) { c.*member = parse_number<T>(v, name); },
          [member](const SimConfig& c) { return json(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"scheme",
                 [](SimConfig& c, std::string_view v) {
                   auto s = srs::parse_scheme(v);
                   if (!s)
                     throw std::invalid_argument("unknown scheme '" + std::string(v) +
                                                 "' (expected reuse1 | reuse3 | fr-cc | fr-na)");
                   c.scheme = *s;
                 },
                 [](const SimConfig& c) { return json(std::string(srs::to_string(c.scheme))); }});
    f.push_back(number_field("tau", &SimConfig::tau));
    f.push_back(number_field("n_k", &SimConfig::n_k));
    f.push_back(number_field("n_antennas", &SimConfig::n_antennas));
    f.push_back(number_field("protected_ues_per_bs", &SimConfig::protected_ues_per_bs));
    f.push_back(number_field("n_drops", &SimConfig::n_drops));
    f.push_back(number_field("seed", &SimConfig::seed));
    f.push_back(number_field("isd_m", &SimConfig::isd_m));
    f.push_back(number_field("n_sites", &SimConfig::n_sites));
    f.push_back(number_field("carrier_ghz", &SimConfig::carrier_ghz));
    f.push_back(number_field("bandwidth_hz", &SimConfig::bandwidth_hz));
    f.push_back(number_field("bs_tx_power_dbm", &SimConfig::bs_tx_power_dbm));
    f.push_back(number_field("ue_tx_power_dbm", &SimConfig::ue_tx_power_dbm));
    f.push_back(number_field("noise_psd_dbm_hz", &SimConfig::noise_psd_dbm_hz));
    f.push_back(number_field("ue_noise_figure_db", &SimConfig::ue_noise_figure_db));
    f.push_back(number_field("bs_noise_figure_db", &SimConfig::bs_noise_figure_db));
    f.push_back(number_field("bs_height_m", &SimConfig::bs_height_m));
    f.push_back(number_field("ue_height_m", &SimConfig::ue_height_m));
    f.push_back(number_field("downtilt_deg", &SimConfig::downtilt_deg));
    f.push_back(number_field("min_distance_m", &SimConfig::min_distance_m));
    f.push_back(number_field("ue_density", &SimConfig::ue_density));
    return f;
  }();
  return table;
}

constexpr std::string_view kSweepAxisKey = "sweep.axis";
constexpr std::string_view kSweepValuesKey = "sweep.values";

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<Entry> read_key_values(std::string_view text, const std::string& name) {
  std::vector<Entry> entries;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(name, line_no, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(name, line_no, "missing key before '='");
    if (value.empty()) throw ConfigError(name, line_no, "missing value for '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ConfigError(name, line_no, "duplicate key '" + std::string(key) + "'");
    entries.push_back({std::string(key), std::string(value), line_no});
  }
  return entries;
}

std::vector<Entry> read_json(std::string_view text, const std::string& name) {
  // Track keys per nesting level so duplicates are caught before the parser
  // silently keeps the last one.
  std::vector<std::set<std::string>> stack;
  std::string duplicate;
  auto cb = [&](int /*depth*/, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start: stack.emplace_back(); break;
      case json::parse_event_t::object_end: stack.pop_back(); break;
      case json::parse_event_t::key:
        if (!stack.back().insert(parsed.get<std::string>()).second && duplicate.empty())
          duplicate = parsed.get<std::string>();
        break;
      default: break;
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(name, 0, std::string("malformed JSON: ") + e.what());
  }
  if (!duplicate.empty()) throw ConfigError(name, 0, "duplicate key '" + duplicate + "'");
  if (!doc.is_object()) throw ConfigError(name, 0, "top-level JSON value must be an object");

  std::vector<Entry> entries;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& v = it.value();
    std::string value;
    if (v.is_string()) {
      value = v.get<std::string>();
    } else if (v.is_number()) {
      value = v.dump();
    } else if (v.is_array() && it.key() == kSweepValuesKey) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) value += ",";
        value += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
      }
    } else {
      throw ConfigError(name, 0, "unsupported value type for '" + it.key() + "'");
    }
    entries.push_back({it.key(), value, 0});
  }
  return entries;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

SweepAxis parse_axis(std::string_view v) {
  for (auto a : {SweepAxis::kTau, SweepAxis::kScheme, SweepAxis::kProtectedUes, SweepAxis::kNk})
    if (to_string(a) == v) return a;
  throw std::invalid_argument("unknown sweep axis '" + std::string(v) + "' (expected tau | scheme | protected_ues | n_k)");
}

std::string describe(const std::string& name, int line) {
  return line > 0 ? name + ":" + std::to_string(line) : name;
}

}  // namespace

ConfigError::ConfigError(const std::string& where, int line, const std::string& what)
    : std::runtime_error(describe(where, line) + ": " + what), line_(line) {}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kTau: return "tau";
    case SweepAxis::kScheme: return "scheme";
    case SweepAxis::kProtectedUes: return "protected_ues";
    case SweepAxis::kNk: return "n_k";
  }
  return "unknown";
}

std::vector<SweepPoint> SweepSpec::points() const {
  if (values.empty()) throw ConfigError("sweep", 0, "sweep.values is empty");
  std::vector<SweepPoint> out;
  for (const auto& v : values) {
    SimConfig c = base;
    try {
      switch (axis) {
        case SweepAxis::kTau: c.tau = parse_number<int>(v, "tau"); break;
        case SweepAxis::kNk: c.n_k = parse_number<int>(v, "n_k"); break;
        case SweepAxis::kProtectedUes: c.protected_ues_per_bs = parse_number<int>(v, "protected_ues"); break;
        case SweepAxis::kScheme: fields().front().set(c, v); break;
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("sweep", 0, e.what());
    }
    if (auto err = engine::check_config(c))
      throw ConfigError("sweep", 0, std::string(to_string(axis)) + "=" + v + ": " + *err);
    out.push_back({v, c});
  }
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.name);
    k.emplace_back(kSweepAxisKey);
    k.emplace_back(kSweepValuesKey);
    return k;
  }();
  return keys;
}

ParsedConfig parse_config_text(std::string_view text, const std::string& name) {
  const auto body = trim(text);
  const bool is_json = !body.empty() && body.front() == '{';
  const auto entries = is_json ? read_json(text, name) : read_key_values(text, name);

  SimConfig config;
  std::optional<SweepAxis> axis;
  std::vector<std::string> values;
  int sweep_line = 0;
  for (const auto& e : entries) {
    try {
      if (e.key == kSweepAxisKey) {
        axis = parse_axis(e.value);
        sweep_line = e.line;
        continue;
      }
      if (e.key == kSweepValuesKey) {
        values = split_list(e.value);
        continue;
      }
      auto it = std::find_if(fields().begin(), fields().end(), [&](const Field& f) { return f.name == e.key; });
      if (it == fields().end()) throw std::invalid_argument("unknown key '" + e.key + "'");
      it->set(config, e.value);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(name, e.line, ex.what());
    }
  }

  if (axis.has_value() != !values.empty())
    throw ConfigError(name, sweep_line, "sweep.axis and sweep.values must be given together");

  if (axis) {
    SweepSpec spec{config, *axis, values};
    try {
      spec.points();
    } catch (const ConfigError& e) {
      throw ConfigError(name, sweep_line, e.what());
    }
    return spec;
  }
  if (auto err = engine::check_config(config)) throw ConfigError(name, 0, *err);
  return config;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::string to_json(const SimConfig& config) {
  json j = json::object();
  for (const auto& f : fields()) j[f.name] = f.get(config);
  return j.dump(2) + "\n";
}

}  // namespace pilotsim::config
