#pragma once

#include <cstdint>
#include <string>

namespace pmfpair::cfg {

inline constexpr const char* schema_version = "1";

// Flat key=value experiment description. Unknown or duplicate keys and
// out-of-range values are rejected with messages naming the key; there are
// no environment-variable overrides. All keys have the defaults below, so
// the literal config name "default" is always valid.
struct ExperimentConfig {
  // pump (key prefix pump_)
  double pump_center_nm = 726.0;
  double pump_fwhm_nm = 6.0;
  double pump_rep_rate_hz = 80e6;
  double pump_avg_power_w = 5e-3;

  // fiber (fiber_)
  double fiber_length_m = 0.20;
  double fiber_birefringence = 3.5e-4;

  // quadrature grid (grid_)
  int grid_signal_points = 512;
  int grid_idler_points = 512;
  double grid_sum_halfwidth_fwhm = 5.0;
  double grid_diff_halfwidth_lobes = 3.0;

  // path imbalance
  double intrinsic_delay_fs = 28.0;
  double compensation_fs = 28.0;
  double residual_distinguishability = 1.0;
  double relative_phase_rad = 0.0;

  // pump-width calibration against a measured overlap; enabled when
  // calibrate_overlap_sq > 0 (then calibrate_tau_fs must be nonzero)
  double calibrate_tau_fs = 0.0;
  double calibrate_overlap_sq = 0.0;

  // tomography simulation and reconstruction
  double brightness = 1e5;
  double acquisition_s = 15.0;
  bool noiseless = false;
  int mle_max_iterations = 10000;
  int mle_restarts = 5;
  double mle_gradient_tol = 1e-8;
  int bootstrap_resamples = 100;

  // compensation-delay sweep, inclusive of both endpoints where they land
  // on the step grid
  double sweep_start_fs = -100.0;
  double sweep_stop_fs = 100.0;
  double sweep_step_fs = 4.0;

  // visibility fringe scan
  int visibility_points = 37;

  // phase matching: detuning scan window, 0 = up to the dispersion
  // validity edge
  double max_detuning_thz = 0.0;

  int threads = 1;

  void validate() const;  // throws ConfigError naming the offending key
};

// Parses key=value text ('#' starts a comment). Unknown keys, duplicate
// keys, unparsable values and range violations all throw ConfigError.
ExperimentConfig parse_config(const std::string& text);

// path_or_default == "default" returns the built-in defaults; anything else
// is read as a file.
ExperimentConfig load_config(const std::string& path_or_default);

// Round-trippable dump of every key (parse_config(config_to_text(c)) == c).
std::string config_to_text(const ExperimentConfig& config);

}  // namespace pmfpair::cfg
