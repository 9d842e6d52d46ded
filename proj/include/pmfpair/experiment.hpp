#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "pmfpair/config.hpp"
#include "pmfpair/dispersion.hpp"
#include "pmfpair/source_model.hpp"
#include "pmfpair/tomography.hpp"

namespace pmfpair::experiment {

// Everything derived once per config: phase matching, (optionally
// calibrated) pump, quadrature grid, joint spectrum and the nominal path
// imbalance.
struct ModelBundle {
  source::PumpPulse pump;
  dispersion::FiberSpec fiber;
  dispersion::PhaseMatchSolution solution;
  source::JointSpectralAmplitude jsa;
  source::PathImbalance imbalance;
};

ModelBundle build_model(const cfg::ExperimentConfig& config);

// Compensation delays of the configured sweep, in seconds.
std::vector<double> sweep_delays_s(const cfg::ExperimentConfig& config);

struct DelayScanRow {
  double compensation_s = 0.0;
  std::complex<double> overlap;  // model path overlap
  double model_tangle = 0.0;
  double recon_tangle = 0.0;
  double recon_tangle_sigma = 0.0;  // bootstrap, 0 when disabled
  bool converged = false;
};

// The compensation-scan experiment: for every delay, simulate a tomography
// (Poisson counts unless config.noiseless), reconstruct, and bootstrap the
// tangle uncertainty. Per-delay random streams are derived from (seed,
// delay index), so the result is identical for any `threads` setting.
std::vector<DelayScanRow> run_delay_sweep_experiment(
    const cfg::ExperimentConfig& config, std::uint64_t seed);

}  // namespace pmfpair::experiment
