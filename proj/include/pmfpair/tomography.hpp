#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pmfpair/quantum_state.hpp"

namespace pmfpair::tomo {

// One coincidence measurement: signal and idler each projected onto one of
// the six analysis kets H, V, D, A, L, R.
struct MeasurementSetting {
  char signal_label = 'H';
  char idler_label = 'H';

  quantum::Ket4 projector_ket() const;
  std::string label() const;  // e.g. "DL"
};

// The standard 36-setting set, signal-major: HH, HV, HD, ..., RL, RR.
std::vector<MeasurementSetting> settings_36();

// Expected coincidences mu = brightness * <psi|rho|psi> for the setting's
// product ket. brightness must be >= 0.
double predict_coincidences(const quantum::TwoQubitState& state,
                            const MeasurementSetting& setting,
                            double brightness);

struct CountRecord {
  MeasurementSetting setting;
  std::int64_t coincidences = 0;
  double duration_s = 15.0;
};

// Poisson-distributed counts for all 36 settings. `brightness` is the mean
// coincidence number a unit-probability setting would collect during one
// acquisition of `duration_s`. With noiseless = true the rounded means are
// returned instead of samples. Each record draws from its own substream of
// `seed`, so the output is independent of evaluation order.
std::vector<CountRecord> simulate_counts(const quantum::TwoQubitState& state,
                                         double brightness, std::uint64_t seed,
                                         double duration_s = 15.0,
                                         bool noiseless = false);

// Counts CSV: header `signal,idler,coincidences,duration_s`, one row per
// setting, e.g. `D,L,1234,15`. read(write(x)) == x.
std::string counts_to_csv(const std::vector<CountRecord>& records);
std::vector<CountRecord> counts_from_csv(const std::string& text);

// Direct linear inversion of the Born rule in an orthonormal Hermitian
// operator basis, least squares over all records. The result has unit trace
// and is Hermitian but may have (slightly) negative eigenvalues; it is the
// standard starting point for the likelihood fit. Rank-deficient designs
// (not enough independent settings) throw NumericalError.
struct LinearInversionResult {
  Eigen::Matrix4cd matrix;
  double brightness = 0.0;  // total counts / settings per complete basis set
};
LinearInversionResult linear_inversion(const std::vector<CountRecord>& records);

struct MleOptions {
  int max_iterations = 10000;
  int restarts = 5;          // random-restart perturbations after the base run
  double gradient_tolerance = 1e-8;  // scaled by (1 + total counts)
  std::uint64_t seed = 0;    // restart perturbations only
};

struct TomographyResult {
  quantum::TwoQubitState state;
  double neg_log_likelihood = 0.0;
  double brightness = 0.0;  // profiled analytically at every step
  int iterations = 0;       // of the returned run
  bool converged = false;
};

// Maximum-likelihood reconstruction under the Poisson counting model.
// rho = T^dag T / Tr(T^dag T) with T lower triangular (16 real parameters),
// so positivity and unit trace hold by construction; the overall scale of T
// is fixed by a quadratic penalty on Tr(T^dag T) = 1, which is exactly
// orthogonal to the likelihood's scale invariance. Minimization is L-BFGS
// with analytic gradients, started from the physical projection of the
// linear inversion plus seeded random restarts.
TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 const MleOptions& options = {});

struct ErrorEstimate {
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;
  int samples = 0;  // successful resamples
  int skipped = 0;  // resamples whose reconstruction failed
};

// Parametric bootstrap: resample every count as Poisson(n_k), reconstruct,
// and report mean/std over resamples for tangle, linear_entropy and
// fidelity_phi_plus. Failed reconstructions are skipped and counted.
std::vector<ErrorEstimate> bootstrap_errors(
    const std::vector<CountRecord>& records, int n_resamples,
    std::uint64_t seed, const MleOptions& options = {});

}  // namespace pmfpair::tomo
