#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cheeger_flow/ricci_flow.hpp"
#include "cheeger_flow/scenarios.hpp"

namespace cheeger_flow {

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

inline const std::vector<std::string>& verification_registry() {
  static const std::vector<std::string> names = {
      "area_law",   "residual_12a", "residual_12b", "residual_heat_9",
      "identities_13", "monotonicity", "papasoglu",  "stationarity",
      "convergence"};
  return names;
}

/// Fully validated run description.
struct RunConfig {
  ScenarioSpec scenario;
  std::string out_dir;
  bool emit_csv = true;
  bool emit_json = true;
  std::vector<std::string> verify;  // subset of the registry, in registry order
  std::uint64_t seed = 1;

  bool operator==(const RunConfig& o) const {
    return scenario.name == o.scenario.name &&
           scenario.parameters == o.scenario.parameters &&
           scenario.grid_n == o.scenario.grid_n &&
           scenario.control.cfl_factor == o.scenario.control.cfl_factor &&
           scenario.control.dt_min == o.scenario.control.dt_min &&
           scenario.control.dt_max == o.scenario.control.dt_max &&
           scenario.control.t_end == o.scenario.control.t_end &&
           scenario.control.min_area == o.scenario.control.min_area &&
           scenario.control.max_curvature == o.scenario.control.max_curvature &&
           out_dir == o.out_dir && emit_csv == o.emit_csv && emit_json == o.emit_json &&
           verify == o.verify && seed == o.seed;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

inline double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw config_error(key + ": expected a real number, got '" + value + "'");
  }
  return out;
}

inline long parse_int(const std::string& key, const std::string& value) {
  long out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw config_error(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw config_error(key + ": expected true/false, got '" + value + "'");
}

inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace detail

/// Normalizes a requested verification list: "all" expands to the registry,
/// unknown names are rejected, duplicates collapse, registry order is kept.
inline std::vector<std::string> resolve_verifications(const std::vector<std::string>& req) {
  const auto& reg = verification_registry();
  if (req.size() == 1 && req[0] == "all") return reg;
  for (const std::string& name : req) {
    if (std::find(reg.begin(), reg.end(), name) == reg.end()) {
      std::string known;
      for (const auto& r : reg) known += (known.empty() ? "" : ", ") + r;
      throw config_error("verify: unknown verification '" + name + "' (known: " + known +
                         ", or 'all')");
    }
  }
  std::vector<std::string> out;
  for (const std::string& name : reg) {
    if (std::find(req.begin(), req.end(), name) != req.end()) out.push_back(name);
  }
  return out;
}

/// Parses the flat-section key = value format:
///
///   [scenario]            [flow]                 [verify]        [output]
///   name = round_sphere   cfl_factor = 0.2       checks = all    dir = out
///   r = 1.0               dt_min / dt_max        seed = 1        csv = true
///   grid_n = 256          t_end = 0.25                           json = true
///                         min_area / max_curvature
///
/// Dotted keys (scenario.name = ...) are accepted as an equivalent spelling.
/// Unknown keys, type mismatches, and out-of-range values are rejected with
/// the key named in the message.  Defaults: grid_n = 256, cfl_factor = 0.2,
/// t_end = 0.25, checks = all, seed = 1.
inline RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    // strip comments, allow "key = v, key = v" on one line
    const auto hash = raw.find_first_of("#;");
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("malformed section header: " + line);
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    // "a = 1, b = 2" is several assignments; a comma-bearing value such as
    // "checks = x,y" is one (only split when every piece carries an '=')
    std::vector<std::string> pieces = detail::split_list(line);
    const bool all_assignments =
        pieces.size() > 1 &&
        std::all_of(pieces.begin(), pieces.end(), [](const std::string& s) {
          return s.find('=') != std::string::npos;
        });
    if (!all_assignments) pieces = {line};
    for (const std::string& piece : pieces) {
      const auto eq = piece.find('=');
      if (eq == std::string::npos) {
        throw config_error("malformed line (expected key = value): " + piece);
      }
      std::string key = detail::trim(std::string_view(piece).substr(0, eq));
      const std::string value = detail::trim(std::string_view(piece).substr(eq + 1));
      if (key.find('.') == std::string::npos) {
        if (section.empty()) {
          throw config_error("key '" + key + "' appears before any [section]");
        }
        key = section + "." + key;
      }
      if (kv.count(key)) throw config_error("duplicate key '" + key + "'");
      kv[key] = value;
    }
  }

  RunConfig cfg;
  cfg.scenario.name = "round_sphere";
  cfg.scenario.grid_n = 256;
  cfg.out_dir = "";
  cfg.verify = verification_registry();

  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return std::optional<std::string>{};
    std::optional<std::string> v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("scenario.name")) cfg.scenario.name = *v;
  static const std::map<std::string, std::vector<std::string>> scenario_params = {
      {"round_sphere", {"r"}},
      {"bump_sphere", {"a", "w"}},
      {"dumbbell", {"neck", "w"}},
  };
  const auto sp = scenario_params.find(cfg.scenario.name);
  if (sp == scenario_params.end()) {
    throw config_error("scenario.name: unknown scenario '" + cfg.scenario.name +
                       "' (known: round_sphere, bump_sphere, dumbbell)");
  }
  for (const std::string& pname : sp->second) {
    if (auto v = take("scenario." + pname)) {
      cfg.scenario.parameters[pname] = detail::parse_real("scenario." + pname, *v);
    }
  }
  if (auto v = take("scenario.grid_n")) {
    const long n = detail::parse_int("scenario.grid_n", *v);
    if (n < 16 || n > 1 << 20) {
      throw config_error("scenario.grid_n: expected integer in [16, 2^20], got " + *v);
    }
    cfg.scenario.grid_n = static_cast<int>(n);
  }

  StepControl& c = cfg.scenario.control;
  if (auto v = take("flow.cfl_factor")) {
    c.cfl_factor = detail::parse_real("flow.cfl_factor", *v);
    if (!(c.cfl_factor > 0.0 && c.cfl_factor <= 0.5)) {
      throw config_error("flow.cfl_factor: expected real in (0, 0.5], got " + *v);
    }
  }
  if (auto v = take("flow.dt_min")) {
    c.dt_min = detail::parse_real("flow.dt_min", *v);
    if (c.dt_min < 0.0) throw config_error("flow.dt_min: expected real >= 0, got " + *v);
  }
  if (auto v = take("flow.dt_max")) {
    c.dt_max = detail::parse_real("flow.dt_max", *v);
    if (!(c.dt_max > 0.0)) throw config_error("flow.dt_max: expected real > 0, got " + *v);
  }
  if (c.dt_min > c.dt_max) {
    throw config_error("flow.dt_min: must not exceed flow.dt_max");
  }
  if (auto v = take("flow.t_end")) {
    c.t_end = detail::parse_real("flow.t_end", *v);
    if (!(c.t_end > 0.0)) throw config_error("flow.t_end: expected real > 0, got " + *v);
  }
  if (auto v = take("flow.min_area")) {
    c.min_area = detail::parse_real("flow.min_area", *v);
    if (!(c.min_area > 0.0)) {
      throw config_error("flow.min_area: expected real > 0, got " + *v);
    }
  }
  if (auto v = take("flow.max_curvature")) {
    c.max_curvature = detail::parse_real("flow.max_curvature", *v);
    if (!(c.max_curvature > 0.0)) {
      throw config_error("flow.max_curvature: expected real > 0, got " + *v);
    }
  }

  if (auto v = take("verify.checks")) cfg.verify = resolve_verifications(detail::split_list(*v));
  if (auto v = take("verify.seed")) {
    const long s = detail::parse_int("verify.seed", *v);
    if (s < 0) throw config_error("verify.seed: expected integer >= 0, got " + *v);
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  if (auto v = take("output.dir")) cfg.out_dir = *v;
  if (auto v = take("output.csv")) cfg.emit_csv = detail::parse_bool("output.csv", *v);
  if (auto v = take("output.json")) cfg.emit_json = detail::parse_bool("output.json", *v);

  if (!kv.empty()) {
    throw config_error("unknown key '" + kv.begin()->first + "'");
  }

  // constructor-level validation (parameter ranges, grid size)
  build_scenario(cfg.scenario);
  return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << cfg.scenario.name << "\n";
  for (const auto& [k, v] : cfg.scenario.parameters) {
    out << k << " = " << detail::format_double(v) << "\n";
  }
  out << "grid_n = " << cfg.scenario.grid_n << "\n";
  const StepControl& c = cfg.scenario.control;
  out << "\n[flow]\n";
  out << "cfl_factor = " << detail::format_double(c.cfl_factor) << "\n";
  out << "dt_min = " << detail::format_double(c.dt_min) << "\n";
  out << "dt_max = " << detail::format_double(c.dt_max) << "\n";
  out << "t_end = " << detail::format_double(c.t_end) << "\n";
  if (c.min_area > 0.0) out << "min_area = " << detail::format_double(c.min_area) << "\n";
  out << "max_curvature = " << detail::format_double(c.max_curvature) << "\n";
  out << "\n[verify]\n";
  out << "checks = ";
  for (std::size_t i = 0; i < cfg.verify.size(); ++i) {
    out << (i ? "," : "") << cfg.verify[i];
  }
  out << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[output]\n";
  if (!cfg.out_dir.empty()) out << "dir = " << cfg.out_dir << "\n";
  out << "csv = " << (cfg.emit_csv ? "true" : "false") << "\n";
  out << "json = " << (cfg.emit_json ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace cheeger_flow
