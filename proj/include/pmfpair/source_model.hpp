#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pmfpair/dispersion.hpp"
#include "pmfpair/quantum_state.hpp"

namespace pmfpair::source {

// Pulsed pump driving the four-wave mixing process.
struct PumpPulse {
  double center_wavelength_nm = 726.0;
  double spectral_fwhm_nm = 6.0;  // intensity FWHM of the wavelength spectrum
  double repetition_rate_hz = 80e6;
  double average_power_w = 5e-3;

  void validate() const;

  double omega_center() const;

  // Intensity FWHM translated to angular frequency, 2 pi c d_lambda / lambda^2.
  double sum_fwhm_omega() const;

  // Standard deviation of the |envelope|^2 distribution over the two-photon
  // sum frequency.
  double sum_sigma_omega() const;
};

// Gaussian two-photon spectral envelope over the sum frequency, peak 1 at
// omega_sum = 2 omega_pump, |envelope|^2 FWHM equal to pump.sum_fwhm_omega().
double pump_envelope(const PumpPulse& pump, double omega_sum);

struct GridOptions {
  int signal_points = 512;
  int idler_points = 512;
  // Half-extent of the covered sum-frequency band, in units of the pump
  // intensity FWHM.
  double sum_halfwidth_fwhm = 5.0;
  // Half-extent along the difference direction, in units of the sinc main
  // lobe of the phase-matching factor.
  double diff_halfwidth_lobes = 3.0;

  void validate() const;
};

// Rectangular frequency grid for joint-spectrum quadrature. Axes must be
// strictly increasing with at least 64 points each; trapezoid weights are
// precomputed. Use around_solution to center the grid on a phase-matched
// solution with physically motivated extents.
class FrequencyGrid {
 public:
  FrequencyGrid(Eigen::VectorXd signal_omegas, Eigen::VectorXd idler_omegas);

  static FrequencyGrid around_solution(
      const dispersion::PhaseMatchSolution& solution, const PumpPulse& pump,
      const dispersion::FiberSpec& fiber, const GridOptions& options = {});

  const Eigen::VectorXd& signal_omegas() const { return signal_; }
  const Eigen::VectorXd& idler_omegas() const { return idler_; }
  const Eigen::VectorXd& signal_weights() const { return signal_w_; }
  const Eigen::VectorXd& idler_weights() const { return idler_w_; }

  // Width of the sum-frequency band the grid can represent.
  double sum_span() const;

 private:
  Eigen::VectorXd signal_, idler_;
  Eigen::VectorXd signal_w_, idler_w_;
};

// Joint spectral amplitude f(omega_s, omega_i) sampled on a grid, normalized
// so that sum_ab W_a W_b |f_ab|^2 = 1 with the grid's trapezoid weights.
class JointSpectralAmplitude {
 public:
  JointSpectralAmplitude(FrequencyGrid grid, Eigen::MatrixXcd amplitude,
                         double sum_reference);

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::MatrixXcd& amplitude() const { return amp_; }

  // Phase reference for the sum frequency (2 omega_pump); overlap phases are
  // reported relative to it.
  double sum_reference() const { return sum_reference_; }

 private:
  FrequencyGrid grid_;
  Eigen::MatrixXcd amp_;
  double sum_reference_;
};

// f = pump_envelope(omega_s + omega_i) * sinc(delta_k L / 2) with the
// mismatch evaluated at the energy-conserving pump (omega_s + omega_i)/2.
// Throws std::domain_error if the grid's sum span is narrower than 6 sigma
// of the pump envelope (the quadrature would truncate the spectrum).
JointSpectralAmplitude compute_jsa(const PumpPulse& pump,
                                   const dispersion::FiberSpec& fiber,
                                   const FrequencyGrid& grid);

// Pump factor only (phase matching set to 1). This is the separable
// reference model, mainly useful for validating the quadrature against the
// Gaussian closed form.
JointSpectralAmplitude pump_only_jsa(const PumpPulse& pump,
                                     const FrequencyGrid& grid);

// Temporal imbalance between the two pair-generation paths of the loop.
struct PathImbalance {
  double intrinsic_delay_s = 0.0;       // tau_0, set by the source
  double compensation_delay_s = 0.0;    // tau_c, the experimental knob
  double residual_distinguishability = 1.0;  // eta in (0, 1]
  double relative_phase = 0.0;          // extra phase between the two paths

  void validate() const;

  double net_delay_s() const { return intrinsic_delay_s - compensation_delay_s; }
};

// Complex overlap of the two path amplitudes,
//   gamma = eta * sum_ab W_a W_b |f_ab|^2 exp(i (w_s + w_i - ref) tau),
// tau = intrinsic - compensation. |gamma| <= eta, and gamma = eta at
// tau = 0 because of the JSA normalization. gamma(-tau) = conj(gamma(tau))
// holds bit for bit.
std::complex<double> path_overlap(const JointSpectralAmplitude& jsa,
                                  const PathImbalance& imbalance);

// Two-qubit polarization state of the emitted pair for the given imbalance:
// dephased_pair_state(path_overlap(...), relative_phase).
quantum::TwoQubitState entangled_state(const JointSpectralAmplitude& jsa,
                                       const PathImbalance& imbalance);

struct SweepPoint {
  double compensation_delay_s = 0.0;
  std::complex<double> overlap;
  double tangle = 0.0;
};

// Model tangle-vs-compensation curve: one point per requested compensation
// delay, all other imbalance parameters held fixed.
std::vector<SweepPoint> tangle_delay_sweep(
    const JointSpectralAmplitude& jsa, const PathImbalance& imbalance,
    const std::vector<double>& compensation_delays_s);

// Calibrates the pump spectral width so that the model reproduces a measured
// overlap: returns a copy of `pump` whose FWHM makes |gamma(tau_ref)|^2 equal
// to target_overlap_sq (with eta = 1 and zero compensation). The mapping
// FWHM -> |gamma|^2 is strictly decreasing, so bisection is reliable.
// target outside (0, 1) or an unbracketable target throws.
PumpPulse calibrate_pump_fwhm(const PumpPulse& pump,
                              const dispersion::FiberSpec& fiber,
                              double tau_ref_s, double target_overlap_sq,
                              const GridOptions& options = {});

}  // namespace pmfpair::source
