#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msac/energies.hpp"
#include "msac/evolution.hpp"
#include "msac/phantom.hpp"
#include "msac/pipeline.hpp"

namespace msac {

/// Ordered key/value pairs from a plain-text config: one `key = value` per
/// line, `#` starts a comment, later keys win on lookup.
using ConfigMap = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace detail

inline ConfigMap parse_config(std::istream& in) {
  ConfigMap cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.emplace_back(key, val);
  }
  return cfg;
}

inline ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

inline std::optional<std::string> config_get(const ConfigMap& cfg, const std::string& key) {
  std::optional<std::string> found;
  for (const auto& [k, v] : cfg)
    if (k == key) found = v;
  return found;
}

namespace detail {

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': not a number: " + s);
  }
}

inline long to_long(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': not an integer: " + s);
  }
}

}  // namespace detail

/// Apply recognized model keys (named after the ModelParams fields).
inline void apply_config(const ConfigMap& cfg, ModelParams& p) {
  for (const auto& [k, v] : cfg) {
    if (k == "omega1") p.omega1 = detail::to_double(k, v);
    else if (k == "omega2") p.omega2 = detail::to_double(k, v);
    else if (k == "omega3") p.omega3 = detail::to_double(k, v);
    else if (k == "patch_radius") p.patch_radius = int(detail::to_long(k, v));
    else if (k == "band_halfwidth") p.band_halfwidth = detail::to_double(k, v);
    else if (k == "r_s") p.r_s = detail::to_double(k, v);
    else if (k == "heaviside_eps") p.heaviside_eps = detail::to_double(k, v);
    else if (k == "dt") p.dt = detail::to_double(k, v);
    else if (k == "max_iters_per_scale") p.max_iters_per_scale = int(detail::to_long(k, v));
    else if (k == "convergence_tol") p.convergence_tol = detail::to_double(k, v);
  }
}

inline void apply_config(const ConfigMap& cfg, CvParams& p) {
  for (const auto& [k, v] : cfg) {
    if (k == "cv_nu") p.nu = detail::to_double(k, v);
    else if (k == "cv_lambda1") p.lambda1 = detail::to_double(k, v);
    else if (k == "cv_lambda2") p.lambda2 = detail::to_double(k, v);
    else if (k == "cv_eps") p.eps = detail::to_double(k, v);
    else if (k == "cv_dt") p.dt = detail::to_double(k, v);
    else if (k == "cv_max_iters") p.max_iters = int(detail::to_long(k, v));
  }
}

inline void apply_config(const ConfigMap& cfg, DrlseParams& p) {
  for (const auto& [k, v] : cfg) {
    if (k == "drlse_dt") p.dt = detail::to_double(k, v);
    else if (k == "drlse_mu") p.mu = detail::to_double(k, v);
    else if (k == "drlse_lambda") p.lambda = detail::to_double(k, v);
    else if (k == "drlse_alpha") p.alpha = detail::to_double(k, v);
    else if (k == "drlse_sigma") p.sigma = detail::to_double(k, v);
    else if (k == "drlse_max_iters") p.max_iters = int(detail::to_long(k, v));
  }
}

/// Phantom spec from the same key = value format. Composite values use
/// colon-separated tuples, comma-separated lists:
///   gap_arcs = 20:30, 200:15
///   distractors = 180:120:14:0.8
///   bias = 0.3:0:0:0:0            (x, y, x^2, y^2, xy)
///   polygon = 10:10, 80:20, 50:90
inline PhantomSpec phantom_from_config(const ConfigMap& cfg) {
  PhantomSpec s;
  for (const auto& [k, v] : cfg) {
    if (k == "width") s.width = int(detail::to_long(k, v));
    else if (k == "height") s.height = int(detail::to_long(k, v));
    else if (k == "cx") s.cx = detail::to_double(k, v);
    else if (k == "cy") s.cy = detail::to_double(k, v);
    else if (k == "a") s.a = detail::to_double(k, v);
    else if (k == "b") s.b = detail::to_double(k, v);
    else if (k == "rot_deg") s.rot_deg = detail::to_double(k, v);
    else if (k == "fg") s.fg = detail::to_double(k, v);
    else if (k == "bg") s.bg = detail::to_double(k, v);
    else if (k == "blur_sigma") s.blur_sigma = detail::to_double(k, v);
    else if (k == "gap_ramp") s.gap_ramp = detail::to_double(k, v);
    else if (k == "speckle_sigma") s.speckle_sigma = detail::to_double(k, v);
    else if (k == "rng_seed") s.rng_seed = std::uint64_t(detail::to_long(k, v));
    else if (k == "gap_arcs") {
      s.gaps.clear();
      for (const auto& item : detail::split(v, ',')) {
        if (item.empty()) continue;
        const auto parts = detail::split(item, ':');
        if (parts.size() != 2) throw std::invalid_argument("gap_arcs: expected start:extent");
        s.gaps.push_back({detail::to_double(k, parts[0]), detail::to_double(k, parts[1])});
      }
    } else if (k == "distractors") {
      s.distractors.clear();
      for (const auto& item : detail::split(v, ',')) {
        if (item.empty()) continue;
        const auto parts = detail::split(item, ':');
        if (parts.size() != 4) throw std::invalid_argument("distractors: expected cx:cy:r:level");
        s.distractors.push_back({detail::to_double(k, parts[0]), detail::to_double(k, parts[1]),
                                 detail::to_double(k, parts[2]), detail::to_double(k, parts[3])});
      }
    } else if (k == "bias") {
      const auto parts = detail::split(v, ':');
      if (parts.size() > 5) throw std::invalid_argument("bias: at most 5 coefficients");
      s.bias = {0, 0, 0, 0, 0};
      for (std::size_t i = 0; i < parts.size(); ++i) s.bias[i] = detail::to_double(k, parts[i]);
    } else if (k == "polygon") {
      s.polygon.clear();
      for (const auto& item : detail::split(v, ',')) {
        if (item.empty()) continue;
        const auto parts = detail::split(item, ':');
        if (parts.size() != 2) throw std::invalid_argument("polygon: expected x:y pairs");
        s.polygon.push_back({detail::to_double(k, parts[0]), detail::to_double(k, parts[1])});
      }
    }
  }
  return s;
}

}  // namespace msac
