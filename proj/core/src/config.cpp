#include "vela/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vela/constitutive.hpp"
#include "vela/diagnostics.hpp"
#include "vela/error.hpp"

namespace vela {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(key + ": cannot parse '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

std::string list_string(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key number_key(const std::string& name, T RunConfig::*field) {
  return {[name, field](RunConfig& c, const std::string& s) { c.*field = parse_number<T>(name, s); },
          [field](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<T>)
              return format_double(c.*field);
            else
              return std::to_string(c.*field);
          }};
}

Key bool_key(const std::string& name, bool RunConfig::*field) {
  return {[name, field](RunConfig& c, const std::string& s) { c.*field = parse_bool(name, s); },
          [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

Key string_key(std::string RunConfig::*field) {
  return {[field](RunConfig& c, const std::string& s) { c.*field = trim(s); },
          [field](const RunConfig& c) { return c.*field; }};
}

/// Ordered so the writer emits sections in a stable order.
const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table = [] {
    std::vector<std::pair<std::string, Key>> t;
    t.emplace_back("grid.n", number_key("grid.n", &RunConfig::n));
    t.emplace_back("grid.L", number_key("grid.L", &RunConfig::L));
    t.emplace_back("material.model", string_key(&RunConfig::model));
    t.emplace_back("material.c1", number_key("material.c1", &RunConfig::c1));
    t.emplace_back("material.nu", number_key("material.nu", &RunConfig::nu));
    t.emplace_back("solver.dt", number_key("solver.dt", &RunConfig::dt));
    t.emplace_back("solver.T", number_key("solver.T", &RunConfig::T));
    t.emplace_back("solver.dealias", bool_key("solver.dealias", &RunConfig::dealias));
    t.emplace_back("solver.linear", bool_key("solver.linear", &RunConfig::linear));
    t.emplace_back("solver.cadence", number_key("solver.cadence", &RunConfig::cadence));
    t.emplace_back("solver.snapshot_every", number_key("solver.snapshot_every", &RunConfig::snapshot_every));
    t.emplace_back("data.seed", number_key("data.seed", &RunConfig::seed));
    t.emplace_back("data.epsilon", number_key("data.epsilon", &RunConfig::epsilon));
    t.emplace_back("data.width", number_key("data.width", &RunConfig::width));
    t.emplace_back("diagnostics.m", number_key("diagnostics.m", &RunConfig::m));
    t.emplace_back("diagnostics.delta", number_key("diagnostics.delta", &RunConfig::delta));
    t.emplace_back("diagnostics.theorem_cmax", number_key("diagnostics.theorem_cmax", &RunConfig::theorem_cmax));
    t.emplace_back("diagnostics.div_threshold", number_key("diagnostics.div_threshold", &RunConfig::div_threshold));
    t.emplace_back("diagnostics.det_threshold", number_key("diagnostics.det_threshold", &RunConfig::det_threshold));
    t.emplace_back("diagnostics.curl_threshold", number_key("diagnostics.curl_threshold", &RunConfig::curl_threshold));
    t.emplace_back("diagnostics.full", bool_key("diagnostics.full", &RunConfig::full_diagnostics));
    t.emplace_back("output.dir", string_key(&RunConfig::dir));
    t.emplace_back("sweep.nu", Key{[](RunConfig& c, const std::string& s) { c.nu_list = parse_list("sweep.nu", s); },
                                   [](const RunConfig& c) { return list_string(c.nu_list); }});
    t.emplace_back("checks.null_samples", number_key("checks.null_samples", &RunConfig::null_samples));
    t.emplace_back("checks.null_threshold", number_key("checks.null_threshold", &RunConfig::null_threshold));
    t.emplace_back("checks.hardy_count", number_key("checks.hardy_count", &RunConfig::hardy_count));
    t.emplace_back("checks.sobolev_count", number_key("checks.sobolev_count", &RunConfig::sobolev_count));
    t.emplace_back("checks.sobolev_lambda", number_key("checks.sobolev_lambda", &RunConfig::sobolev_lambda));
    t.emplace_back("checks.n", number_key("checks.n", &RunConfig::inequality_n));
    t.emplace_back("checks.null_check", bool_key("checks.null_check", &RunConfig::null_check));
    return t;
  }();
  return table;
}

const Key& find_key(const std::string& name) {
  for (const auto& [k, v] : keys())
    if (k == name) return v;
  throw ConfigError("unknown config key '" + name + "'");
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

int RunConfig::steps() const {
  const double base = dt > 0.0 ? dt : 0.5 * spacing() / c1;
  return std::max(1, static_cast<int>(std::ceil(horizon() / base - 1e-9)));
}

double RunConfig::step_size() const { return horizon() / steps(); }

void RunConfig::validate() const {
  if (!power_of_two(n) || n < 8) throw ConfigError("grid.n must be a power of two >= 8");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid.L must be positive");
  if (!(c1 >= 1.0)) throw ConfigError("material.c1 must be >= 1 (c2 is fixed to 1)");
  if (!(nu >= 0.0)) throw ConfigError("material.nu must be >= 0");
  const auto names = model_names();
  if (std::find(names.begin(), names.end(), model) == names.end())
    throw ConfigError("material.model '" + model + "' is not a known model");
  if (dt < 0.0) throw ConfigError("solver.dt must be >= 0");
  const double cfl = 0.5 * spacing() / c1;
  if (dt > cfl * (1.0 + 1e-12))
    throw ConfigError("solver.dt = " + format_double(dt) + " exceeds the CFL bound 0.5 * spacing / c1 = " +
                      format_double(cfl));
  if (T < 0.0) throw ConfigError("solver.T must be >= 0");
  if (T > cone_cap() * (1.0 + 1e-12))
    throw ConfigError("solver.T = " + format_double(T) + " exceeds the cone cap (0.8 L - L/4) / c1 = " +
                      format_double(cone_cap()) + ": waves from data in r <= L/4 would reach the periodic images");
  if (cadence < 1) throw ConfigError("solver.cadence must be >= 1");
  if (snapshot_every < 0) throw ConfigError("solver.snapshot_every must be >= 0");
  if (!(epsilon >= 0.0)) throw ConfigError("data.epsilon must be >= 0");
  if (!(width > 0.0 && width <= 0.5)) throw ConfigError("data.width must lie in (0, 0.5]");
  if (!(m > 4.0)) throw ConfigError("diagnostics.m must exceed 4");
  if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("diagnostics.delta must lie in [0, 1)");
  if (!(theorem_cmax >= 1.0)) throw ConfigError("diagnostics.theorem_cmax must be >= 1");
  for (double v : nu_list)
    if (!(v >= 0.0)) throw ConfigError("sweep.nu entries must be >= 0");
  if (null_samples < 1 || hardy_count < 1 || sobolev_count < 1) throw ConfigError("check counts must be >= 1");
  if (!power_of_two(inequality_n) || inequality_n < 8) throw ConfigError("checks.n must be a power of two >= 8");
  if (!(sobolev_lambda >= 0.0 && sobolev_lambda <= 2.0)) throw ConfigError("checks.sobolev_lambda must lie in [0, 2]");
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' lies outside any section");
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      find_key(name).set(c, value.get_value<std::string>());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string write_config(const RunConfig& c) {
  std::string out, section;
  for (const auto& [name, key] : keys()) {
    const auto dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) out += '\n';
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += name.substr(dot + 1) + " = " + key.get(c) + "\n";
  }
  return out;
}

void save_config(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config '" + path + "'");
  out << write_config(c);
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  find_key(trim(assignment.substr(0, eq))).set(c, assignment.substr(eq + 1));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [k, v] : keys()) out.push_back(k);
  return out;
}

}  // namespace vela
