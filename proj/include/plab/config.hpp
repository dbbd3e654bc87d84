#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plab/params.hpp"
#include "plab/profiles.hpp"

namespace plab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cutoff placement, in physical units.
struct CutoffSpec {
  std::array<double, 2> center{0.5, 0.5};
  double space_radius = 0.35;
  double time_center = 0.0;  // 0 means "T/2"
  double time_radius = 0.0;  // 0 means "0.4*T"
};

/// Full description of a run. Round-trips losslessly through to_string/parse.
struct RunConfig {
  Params params;
  std::array<double, 2> box_lo{0.0, 0.0};
  std::array<double, 2> box_hi{1.0, 1.0};
  std::array<int, 2> nx{33, 33};
  int nt = 0;  // 0 -> derived from the CFL bound
  std::string profile = "sine-mode-1d";
  std::string manufactured = "sine-decay";
  CutoffSpec cutoff;
  std::vector<std::string> checks;
  std::vector<double> eps_list;
  std::string mode = "assertion";  // or "exploration"
  std::string out_dir = "out";
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> v = {
      "max-principle",          "veps-evolution",      "gradient-interior-bound",
      "miranda-talenti",        "fundamental-identity", "second-derivative-bound",
      "time-derivative-bound",  "weak-time-derivative", "epsilon-convergence",
      "elementary-inequality"};
  return v;
}

namespace detail {

struct ConfigValue {
  std::string raw;  // trimmed value text

  double as_double(const std::string& key) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("config key '" + key + "': expected a number, got '" + raw + "'");
    }
  }
  int as_int(const std::string& key) const {
    const double v = as_double(key);
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v)
      throw ConfigError("config key '" + key + "': expected an integer, got '" + raw + "'");
    return n;
  }
  std::string as_string(const std::string& key) const {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
      return raw.substr(1, raw.size() - 2);
    throw ConfigError("config key '" + key + "': expected a quoted string, got '" + raw + "'");
  }
  std::vector<std::string> list_items(const std::string& key) const {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
      throw ConfigError("config key '" + key + "': expected a [list], got '" + raw + "'");
    std::vector<std::string> items;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto b = item.find_first_not_of(" \t");
      auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      items.push_back(item.substr(b, e - b + 1));
    }
    return items;
  }
  std::vector<double> as_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& it : list_items(key)) out.push_back(ConfigValue{it}.as_double(key));
    return out;
  }
  std::vector<std::string> as_string_list(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& it : list_items(key)) out.push_back(ConfigValue{it}.as_string(key));
    return out;
  }
};

inline std::map<std::string, ConfigValue> parse_kv(const std::string& text) {
  std::map<std::string, ConfigValue> kv;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      const auto y = s.find_last_not_of(" \t\r");
      return (x == std::string::npos) ? std::string() : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = ConfigValue{val};
  }
  return kv;
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  auto kv = detail::parse_kv(text);
  RunConfig c;
  auto take = [&](const std::string& key) -> const detail::ConfigValue* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = take("p")) c.params.p = v->as_double("p");
  if (auto* v = take("epsilon")) c.params.epsilon = v->as_double("epsilon");
  if (auto* v = take("dim")) c.params.dim = v->as_int("dim");
  if (auto* v = take("T")) c.params.horizon_T = v->as_double("T");
  if (auto* v = take("box_lo")) {
    auto l = v->as_double_list("box_lo");
    for (std::size_t a = 0; a < l.size() && a < 2; ++a) c.box_lo[a] = l[a];
  }
  if (auto* v = take("box_hi")) {
    auto l = v->as_double_list("box_hi");
    for (std::size_t a = 0; a < l.size() && a < 2; ++a) c.box_hi[a] = l[a];
  }
  if (auto* v = take("nx")) c.nx[0] = c.nx[1] = v->as_int("nx");
  if (auto* v = take("ny")) c.nx[1] = v->as_int("ny");
  if (auto* v = take("nt")) c.nt = v->as_int("nt");
  if (auto* v = take("profile")) c.profile = v->as_string("profile");
  if (auto* v = take("manufactured")) c.manufactured = v->as_string("manufactured");
  if (auto* v = take("cutoff_center")) {
    auto l = v->as_double_list("cutoff_center");
    for (std::size_t a = 0; a < l.size() && a < 2; ++a) c.cutoff.center[a] = l[a];
  }
  if (auto* v = take("cutoff_space_radius"))
    c.cutoff.space_radius = v->as_double("cutoff_space_radius");
  if (auto* v = take("cutoff_time_center"))
    c.cutoff.time_center = v->as_double("cutoff_time_center");
  if (auto* v = take("cutoff_time_radius"))
    c.cutoff.time_radius = v->as_double("cutoff_time_radius");
  if (auto* v = take("checks")) c.checks = v->as_string_list("checks");
  if (auto* v = take("eps_list")) c.eps_list = v->as_double_list("eps_list");
  if (auto* v = take("mode")) c.mode = v->as_string("mode");
  if (auto* v = take("out_dir")) c.out_dir = v->as_string("out_dir");
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string to_string(const RunConfig& c) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "p = " << fmt_double(c.params.p) << "\n";
  os << "epsilon = " << fmt_double(c.params.epsilon) << "\n";
  os << "dim = " << c.params.dim << "\n";
  os << "T = " << fmt_double(c.params.horizon_T) << "\n";
  os << "box_lo = [" << fmt_double(c.box_lo[0]) << ", " << fmt_double(c.box_lo[1]) << "]\n";
  os << "box_hi = [" << fmt_double(c.box_hi[0]) << ", " << fmt_double(c.box_hi[1]) << "]\n";
  os << "nx = " << c.nx[0] << "\n";
  os << "ny = " << c.nx[1] << "\n";
  os << "nt = " << c.nt << "\n";
  os << "profile = \"" << c.profile << "\"\n";
  os << "manufactured = \"" << c.manufactured << "\"\n";
  os << "cutoff_center = [" << fmt_double(c.cutoff.center[0]) << ", "
     << fmt_double(c.cutoff.center[1]) << "]\n";
  os << "cutoff_space_radius = " << fmt_double(c.cutoff.space_radius) << "\n";
  os << "cutoff_time_center = " << fmt_double(c.cutoff.time_center) << "\n";
  os << "cutoff_time_radius = " << fmt_double(c.cutoff.time_radius) << "\n";
  os << "checks = [";
  for (std::size_t i = 0; i < c.checks.size(); ++i)
    os << (i ? ", " : "") << '"' << c.checks[i] << '"';
  os << "]\n";
  os << "eps_list = [";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i)
    os << (i ? ", " : "") << fmt_double(c.eps_list[i]);
  os << "]\n";
  os << "mode = \"" << c.mode << "\"\n";
  os << "out_dir = \"" << c.out_dir << "\"\n";
  return os.str();
}

/// Field-level validation. Throws ConfigError naming the offending key.
inline void validate_config(const RunConfig& c) {
  try {
    c.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  for (int a = 0; a < c.params.dim; ++a) {
    if (!(c.box_hi[a] > c.box_lo[a]))
      throw ConfigError("box: degenerate extent on axis " + std::to_string(a));
    if (c.nx[a] < 3) throw ConfigError("nx: need at least 3 nodes per axis");
  }
  const auto& names = profile_names();
  if (std::find(names.begin(), names.end(), c.profile) == names.end())
    throw ConfigError("profile: unknown name '" + c.profile + "'");
  for (const auto& ch : c.checks) {
    const auto& kc = known_checks();
    if (std::find(kc.begin(), kc.end(), ch) == kc.end())
      throw ConfigError("checks: unknown check '" + ch + "'");
  }
  if (c.mode != "assertion" && c.mode != "exploration")
    throw ConfigError("mode: must be \"assertion\" or \"exploration\"");
  const bool wants_d2 = std::find(c.checks.begin(), c.checks.end(),
                                  "second-derivative-bound") != c.checks.end();
  if (wants_d2 && c.mode == "assertion" &&
      !(c.params.p > 6.0 / 5.0 && c.params.p < 14.0 / 5.0))
    throw ConfigError("p: second-derivative-bound in assertion mode requires 6/5 < p < 14/5");
}

}  // namespace plab
