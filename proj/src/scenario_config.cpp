#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "krf/scenario.hpp"

namespace krf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Real parse_real(const std::string& v) {
  std::size_t used = 0;
  Real out = 0.0L;
  try {
    out = std::stold(v, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigInvalid, "expected a number, got '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(out)) {
    throw Error(ErrorKind::ConfigInvalid, "expected a finite number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(ErrorKind::ConfigInvalid, "expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigInvalid, "integer out of range: '" + v + "'");
  }
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw Error(ErrorKind::ConfigInvalid, "expected true or false, got '" + v + "'");
}

std::vector<Real> parse_list(const std::string& v) {
  std::vector<Real> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item)));
  if (out.empty()) throw Error(ErrorKind::ConfigInvalid, "expected a comma-separated list");
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"name", [](auto& c, const auto& v) { c.name = v; }},
      {"preset", [](auto& c, const auto& v) { c.preset = v; }},
      {"potential_table", [](auto& c, const auto& v) { c.potential_table = v; }},
      {"far_field",
       [](auto& c, const auto& v) {
         if (v == "exponential") c.far_field = FarField::Exponential;
         else if (v == "cylindrical") c.far_field = FarField::Cylindrical;
         else throw Error(ErrorKind::ConfigInvalid, "far_field must be exponential or cylindrical");
       }},
      {"far_rate", [](auto& c, const auto& v) { c.far_rate = parse_real(v); }},
      {"ricci_potential_bounded", [](auto& c, const auto& v) { c.ricci_potential_bounded = parse_bool(v); }},
      {"n", [](auto& c, const auto& v) { c.n = static_cast<int>(parse_unsigned(v)); }},
      {"rho_min", [](auto& c, const auto& v) { c.rho_min = parse_real(v); }},
      {"rho_max", [](auto& c, const auto& v) { c.rho_max = parse_real(v); }},
      {"resolution", [](auto& c, const auto& v) { c.resolution = parse_unsigned(v); }},
      {"t_end", [](auto& c, const auto& v) { c.t_end = parse_real(v); }},
      {"speed", [](auto& c, const auto& v) { c.speed = parse_real(v); }},
      {"taus", [](auto& c, const auto& v) { c.taus = parse_list(v); }},
      {"dt_max", [](auto& c, const auto& v) { c.dt_max = parse_real(v); }},
      {"theta_curv", [](auto& c, const auto& v) { c.theta_curv = parse_real(v); }},
      {"blowup_factor", [](auto& c, const auto& v) { c.blowup_factor = parse_real(v); }},
      {"max_steps", [](auto& c, const auto& v) { c.max_steps = parse_unsigned(v); }},
      {"bump_exponent", [](auto& c, const auto& v) { c.params.bump_exponent = parse_real(v); }},
      {"cusp_exponent", [](auto& c, const auto& v) { c.params.cusp_exponent = parse_real(v); }},
      {"cap_epsilon", [](auto& c, const auto& v) { c.params.cap_epsilon = parse_real(v); }},
      {"shrink_time", [](auto& c, const auto& v) { c.params.shrink_time = parse_real(v); }},
      {"fixture_samples", [](auto& c, const auto& v) { c.fixture_samples = parse_unsigned(v); }},
      {"monitor.bounds", [](auto& c, const auto& v) { c.monitor_bounds = parse_bool(v); }},
      {"monitor.residuals", [](auto& c, const auto& v) { c.monitor_residuals = parse_bool(v); }},
      {"monitor.entropy", [](auto& c, const auto& v) { c.monitor_entropy = parse_bool(v); }},
      {"monitor.curvature_operators",
       [](auto& c, const auto& v) { c.monitor_curvature_operators = parse_bool(v); }},
      {"monitor.blowup", [](auto& c, const auto& v) { c.monitor_blowup = parse_bool(v); }},
      {"monitor.stride", [](auto& c, const auto& v) { c.monitor_stride = parse_unsigned(v); }},
      {"tolerance.residual_factor", [](auto& c, const auto& v) { c.residual_factor = parse_real(v); }},
      {"tolerance.ricci", [](auto& c, const auto& v) { c.ricci_tolerance = parse_real(v); }},
      {"tolerance.mu", [](auto& c, const auto& v) { c.mu_tolerance = parse_real(v); }},
      {"tolerance.normalization",
       [](auto& c, const auto& v) { c.normalization_tolerance = parse_real(v); }},
      {"window_constant", [](auto& c, const auto& v) { c.window_constant = parse_real(v); }},
      {"output_dir", [](auto& c, const auto& v) { c.output_dir = v; }},
      {"seed", [](auto& c, const auto& v) { c.seed = parse_unsigned(v); }},
  };
  return table;
}

}  // namespace

void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorKind::ConfigInvalid, "unknown key '" + key + "'");
  try {
    it->second(config, value);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, "key '" + key + "': " + e.detail());
  }
}

void validate_config(const ScenarioConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
  if (c.resolution < kMinGridSize) fail("resolution must be at least 16");
  if (!(c.t_end > 0.0L)) fail("t_end must be positive");
  if (!(c.rho_max > c.rho_min)) fail("rho_max must exceed rho_min");
  if (c.n < 1) fail("n must be at least 1");
  if (!(c.speed > 0.0L)) fail("speed must be positive");
  if (c.taus.empty()) fail("taus must not be empty");
  for (Real tau : c.taus) {
    if (!(tau > 0.0L)) fail("every tau must be positive");
  }
  if (!(c.dt_max > 0.0L) || !(c.theta_curv > 0.0L)) fail("dt_max and theta_curv must be positive");
  if (!(c.blowup_factor > 1.0L)) fail("blowup_factor must exceed 1");
  if (c.monitor_stride == 0) fail("monitor.stride must be positive");
  if (c.fixture_samples < 3) fail("fixture_samples must be at least 3");
  if (!(c.residual_factor > 0.0L) || !(c.ricci_tolerance > 0.0L) || !(c.mu_tolerance > 0.0L) ||
      !(c.normalization_tolerance > 0.0L)) {
    fail("tolerances must be positive");
  }
  if (!(c.window_constant > 1.0L)) fail("window_constant must exceed 1");
  if (c.potential_table.empty()) {
    const auto names = preset_names();
    if (std::find(names.begin(), names.end(), c.preset) == names.end()) {
      fail("unknown preset '" + c.preset + "'");
    }
    if (c.preset == "shrinking-fixture" && !(c.t_end < c.params.shrink_time)) {
      fail("shrinking-fixture needs t_end below shrink_time");
    }
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
  ScenarioConfig config;
  std::set<std::string> seen;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const auto where = source + ":" + std::to_string(number) + ": ";
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigInvalid, where + "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ConfigInvalid, where + "missing key");
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::ConfigInvalid, where + "duplicate key '" + key + "'");
    }
    try {
      set_config_value(config, key, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigInvalid, where + e.detail());
    }
  }
  try {
    validate_config(config);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, source + ": " + e.detail());
  }
  return config;
}

std::vector<std::pair<std::string, std::string>> config_pairs(const ScenarioConfig& c) {
  auto num = [](Real v) {
    std::ostringstream os;
    os.precision(18);
    os << v;
    return os.str();
  };
  auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  std::string taus;
  for (std::size_t i = 0; i < c.taus.size(); ++i) taus += (i ? "," : "") + num(c.taus[i]);
  return {
      {"name", c.name},
      {"preset", c.preset},
      {"potential_table", c.potential_table},
      {"far_field", c.far_field == FarField::Cylindrical ? "cylindrical" : "exponential"},
      {"far_rate", num(c.far_rate)},
      {"ricci_potential_bounded", flag(c.ricci_potential_bounded)},
      {"n", std::to_string(c.n)},
      {"rho_min", num(c.rho_min)},
      {"rho_max", num(c.rho_max)},
      {"resolution", std::to_string(c.resolution)},
      {"t_end", num(c.t_end)},
      {"speed", num(c.speed)},
      {"taus", taus},
      {"dt_max", num(c.dt_max)},
      {"theta_curv", num(c.theta_curv)},
      {"blowup_factor", num(c.blowup_factor)},
      {"max_steps", std::to_string(c.max_steps)},
      {"bump_exponent", num(c.params.bump_exponent)},
      {"cusp_exponent", num(c.params.cusp_exponent)},
      {"cap_epsilon", num(c.params.cap_epsilon)},
      {"shrink_time", num(c.params.shrink_time)},
      {"fixture_samples", std::to_string(c.fixture_samples)},
      {"monitor.bounds", flag(c.monitor_bounds)},
      {"monitor.residuals", flag(c.monitor_residuals)},
      {"monitor.entropy", flag(c.monitor_entropy)},
      {"monitor.curvature_operators", flag(c.monitor_curvature_operators)},
      {"monitor.blowup", flag(c.monitor_blowup)},
      {"monitor.stride", std::to_string(c.monitor_stride)},
      {"tolerance.residual_factor", num(c.residual_factor)},
      {"tolerance.ricci", num(c.ricci_tolerance)},
      {"tolerance.mu", num(c.mu_tolerance)},
      {"tolerance.normalization", num(c.normalization_tolerance)},
      {"window_constant", num(c.window_constant)},
      {"output_dir", c.output_dir},
      {"seed", std::to_string(c.seed)},
  };
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open config " + path.string());
  return parse_config(in, path.string());
}

}  // namespace krf
