#include "ajwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ajwave/io.hpp"
#include "ajwave/units.hpp"

namespace ajwave {

SimConfig default_sim_config() {
  SimConfig cfg;  // ThConfig defaults already carry the reference timing
  cfg.fj_hz = 1.5e9;
  cfg.theta_rad = 0.0;
  cfg.jam_enabled = true;
  cfg.sjr_db = -10.0;
  cfg.ebn0_db = 15.0;
  cfg.mode = WaveformMode::Optimized;
  cfg.n_coeffs = 5;
  cfg.tm_s = 0.25e-9;
  cfg.clip_enabled = false;
  cfg.clip_k = 1.2;
  cfg.n_bits = 200000;
  cfg.seed = 1;
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad real for " + key + ": '" + v + "'");
  }
}

long long parse_count(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad seed for " + key + ": '" + v + "'");
  }
}

bool parse_flag(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config: bad flag for " + key + ": '" + v + "'");
}

}  // namespace

SimConfig parse_config_text(const std::string& text) {
  SimConfig cfg = default_sim_config();
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      throw std::runtime_error("config: line " + std::to_string(line_no) + " is missing a key or value");
    }
    if (!seen.insert(key).second) throw std::runtime_error("config: duplicate key " + key);

    if (key == "th.tc_ns") {
      cfg.th.tc_s = ns_to_s(parse_real(key, val));
    } else if (key == "th.tf_ns") {
      cfg.th.tf_s = ns_to_s(parse_real(key, val));
    } else if (key == "th.nf") {
      cfg.th.nf = static_cast<int>(parse_count(key, val));
    } else if (key == "th.nc") {
      cfg.th.nc = static_cast<int>(parse_count(key, val));
    } else if (key == "th.delta_ns") {
      cfg.th.delta_s = ns_to_s(parse_real(key, val));
    } else if (key == "th.tp_ns") {
      cfg.th.tp_s = ns_to_s(parse_real(key, val));
    } else if (key == "th.dt_ns") {
      cfg.th.dt_s = ns_to_s(parse_real(key, val));
    } else if (key == "th.alpha") {
      cfg.th.alpha = parse_real(key, val);
    } else if (key == "jammer.fj_ghz") {
      cfg.fj_hz = ghz_to_hz(parse_real(key, val));
    } else if (key == "jammer.theta_rad") {
      cfg.theta_rad = parse_real(key, val);
    } else if (key == "jammer.sjr_db") {
      cfg.sjr_db = parse_real(key, val);
      cfg.jam_enabled = std::isfinite(cfg.sjr_db);  // sjr = inf → jammer off
    } else if (key == "link.ebn0_db") {
      cfg.ebn0_db = parse_real(key, val);
    } else if (key == "waveform.mode") {
      std::string m = val;
      std::transform(m.begin(), m.end(), m.begin(), [](unsigned char c) { return std::tolower(c); });
      if (m == "optimized") {
        cfg.mode = WaveformMode::Optimized;
      } else if (m == "gaussian_doublet" || m == "doublet") {
        cfg.mode = WaveformMode::GaussianDoublet;
      } else {
        throw std::runtime_error("config: unknown waveform.mode '" + val + "'");
      }
    } else if (key == "waveform.n") {
      cfg.n_coeffs = static_cast<int>(parse_count(key, val));
    } else if (key == "clipper.enabled") {
      cfg.clip_enabled = parse_flag(key, val);
    } else if (key == "clipper.k") {
      cfg.clip_k = parse_real(key, val);
    } else if (key == "estimator.mu_ghz") {
      cfg.estimator.mu_hz = ghz_to_hz(parse_real(key, val));
    } else if (key == "estimator.sigma_ghz") {
      cfg.estimator.sigma_hz = ghz_to_hz(parse_real(key, val));
    } else if (key == "mc.n_bits") {
      cfg.n_bits = parse_count(key, val);
    } else if (key == "mc.seed") {
      cfg.seed = parse_seed(key, val);
    } else {
      throw std::runtime_error("config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config_file(const std::string& path) { return parse_config_text(read_text_file(path)); }

}  // namespace ajwave
