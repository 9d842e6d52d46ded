#include "pmfpair/config.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "pmfpair/errors.hpp"
#include "pmfpair/io.hpp"

namespace pmfpair::cfg {

namespace {

struct KeyEntry {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as a number");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < -(1LL << 31) || v > (1LL << 31)) {
      throw std::invalid_argument("out of range");
    }
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value +
                      "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw ConfigError("config key '" + key + "': cannot parse '" + value +
                    "' as a boolean (use true/false)");
}

std::string dump_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

#define DOUBLE_KEY(field)                                               \
  KeyEntry{#field,                                                      \
           [](ExperimentConfig& c, const std::string& v) {              \
             c.field = parse_double(#field, v);                         \
           },                                                           \
           [](const ExperimentConfig& c) { return dump_double(c.field); }}
#define INT_KEY(field)                                                  \
  KeyEntry{#field,                                                      \
           [](ExperimentConfig& c, const std::string& v) {              \
             c.field = parse_int(#field, v);                            \
           },                                                           \
           [](const ExperimentConfig& c) { return std::to_string(c.field); }}
#define BOOL_KEY(field)                                                 \
  KeyEntry{#field,                                                      \
           [](ExperimentConfig& c, const std::string& v) {              \
             c.field = parse_bool(#field, v);                           \
           },                                                           \
           [](const ExperimentConfig& c) {                              \
             return std::string(c.field ? "true" : "false");            \
           }}

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      DOUBLE_KEY(pump_center_nm),
      DOUBLE_KEY(pump_fwhm_nm),
      DOUBLE_KEY(pump_rep_rate_hz),
      DOUBLE_KEY(pump_avg_power_w),
      DOUBLE_KEY(fiber_length_m),
      DOUBLE_KEY(fiber_birefringence),
      INT_KEY(grid_signal_points),
      INT_KEY(grid_idler_points),
      DOUBLE_KEY(grid_sum_halfwidth_fwhm),
      DOUBLE_KEY(grid_diff_halfwidth_lobes),
      DOUBLE_KEY(intrinsic_delay_fs),
      DOUBLE_KEY(compensation_fs),
      DOUBLE_KEY(residual_distinguishability),
      DOUBLE_KEY(relative_phase_rad),
      DOUBLE_KEY(calibrate_tau_fs),
      DOUBLE_KEY(calibrate_overlap_sq),
      DOUBLE_KEY(brightness),
      DOUBLE_KEY(acquisition_s),
      BOOL_KEY(noiseless),
      INT_KEY(mle_max_iterations),
      INT_KEY(mle_restarts),
      DOUBLE_KEY(mle_gradient_tol),
      INT_KEY(bootstrap_resamples),
      DOUBLE_KEY(sweep_start_fs),
      DOUBLE_KEY(sweep_stop_fs),
      DOUBLE_KEY(sweep_step_fs),
      INT_KEY(visibility_points),
      DOUBLE_KEY(max_detuning_thz),
      INT_KEY(threads),
  };
  return table;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef BOOL_KEY

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) {
    return "";
  }
  return s.substr(a, b - a + 1);
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(pump_center_nm > 0.0, "pump_center_nm must be > 0");
  require(pump_fwhm_nm > 0.0 && pump_fwhm_nm < pump_center_nm / 10.0,
          "pump_fwhm_nm must be positive and below pump_center_nm/10");
  require(pump_rep_rate_hz > 0.0, "pump_rep_rate_hz must be > 0");
  require(pump_avg_power_w > 0.0, "pump_avg_power_w must be > 0");
  require(fiber_length_m > 0.0, "fiber_length_m must be > 0");
  require(std::abs(fiber_birefringence) < 1e-2,
          "fiber_birefringence must satisfy |dn| < 1e-2");
  require(grid_signal_points >= 64 && grid_idler_points >= 64,
          "grid_signal_points and grid_idler_points must be >= 64");
  require(grid_sum_halfwidth_fwhm > 0.0 && grid_diff_halfwidth_lobes > 0.0,
          "grid halfwidths must be > 0");
  require(residual_distinguishability > 0.0 &&
              residual_distinguishability <= 1.0,
          "residual_distinguishability must lie in (0, 1]");
  require(calibrate_overlap_sq >= 0.0 && calibrate_overlap_sq < 1.0,
          "calibrate_overlap_sq must lie in [0, 1)");
  if (calibrate_overlap_sq > 0.0) {
    require(calibrate_tau_fs != 0.0,
            "calibrate_tau_fs must be nonzero when calibration is enabled");
  }
  require(brightness > 0.0, "brightness must be > 0");
  require(acquisition_s > 0.0, "acquisition_s must be > 0");
  require(mle_max_iterations >= 1, "mle_max_iterations must be >= 1");
  require(mle_restarts >= 0, "mle_restarts must be >= 0");
  require(mle_gradient_tol > 0.0, "mle_gradient_tol must be > 0");
  require(bootstrap_resamples == 0 || bootstrap_resamples >= 2,
          "bootstrap_resamples must be 0 (disabled) or >= 2");
  require(sweep_step_fs > 0.0, "sweep_step_fs must be > 0");
  require(sweep_stop_fs >= sweep_start_fs,
          "sweep_stop_fs must be >= sweep_start_fs");
  require((sweep_stop_fs - sweep_start_fs) / sweep_step_fs < 100000.0,
          "delay sweep would exceed 100000 points");
  require(visibility_points >= 8, "visibility_points must be >= 8");
  require(max_detuning_thz >= 0.0, "max_detuning_thz must be >= 0");
  require(threads >= 1 && threads <= 256, "threads must lie in [1, 256]");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("duplicate config key '" + key + "'");
    }
    bool matched = false;
    for (const auto& entry : key_table()) {
      if (key == entry.name) {
        entry.set(config, value);
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::string& path_or_default) {
  if (path_or_default == "default") {
    ExperimentConfig config;
    config.validate();
    return config;
  }
  return parse_config(io::read_text_file(path_or_default));
}

std::string config_to_text(const ExperimentConfig& config) {
  std::ostringstream out;
  for (const auto& entry : key_table()) {
    out << entry.name << " = " << entry.get(config) << "\n";
  }
  return out.str();
}

}  // namespace pmfpair::cfg
