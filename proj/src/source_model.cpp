#include "pmfpair/source_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pmfpair/constants.hpp"
#include "pmfpair/errors.hpp"

namespace pmfpair::source {

namespace {

constexpr double two_sqrt_ln2 = 1.6651092223153954;      // 2 sqrt(ln 2)
constexpr double two_sqrt_2ln2 = 2.3548200450309493;     // 2 sqrt(2 ln 2)

double sinc(double x) {
  if (std::abs(x) < 1e-8) {
    return 1.0 - x * x / 6.0;
  }
  return std::sin(x) / x;
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& axis) {
  const Eigen::Index n = axis.size();
  Eigen::VectorXd w(n);
  w(0) = 0.5 * (axis(1) - axis(0));
  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    w(j) = 0.5 * (axis(j + 1) - axis(j - 1));
  }
  w(n - 1) = 0.5 * (axis(n - 1) - axis(n - 2));
  return w;
}

}  // namespace

void PumpPulse::validate() const {
  if (!(center_wavelength_nm > 0.0)) {
    throw std::domain_error("PumpPulse: center wavelength must be > 0");
  }
  if (!(spectral_fwhm_nm > 0.0) ||
      !(spectral_fwhm_nm < center_wavelength_nm / 10.0)) {
    std::ostringstream msg;
    msg << "PumpPulse: spectral FWHM " << spectral_fwhm_nm
        << " nm must be positive and below a tenth of the center wavelength";
    throw std::domain_error(msg.str());
  }
  if (!(repetition_rate_hz > 0.0) || !(average_power_w > 0.0)) {
    throw std::domain_error(
        "PumpPulse: repetition rate and average power must be > 0");
  }
}

double PumpPulse::omega_center() const {
  return wavelength_nm_to_omega(center_wavelength_nm);
}

double PumpPulse::sum_fwhm_omega() const {
  const double lambda_m = center_wavelength_nm * 1e-9;
  return 2.0 * pi * speed_of_light * (spectral_fwhm_nm * 1e-9) /
         (lambda_m * lambda_m);
}

double PumpPulse::sum_sigma_omega() const {
  return sum_fwhm_omega() / two_sqrt_2ln2;
}

double pump_envelope(const PumpPulse& pump, double omega_sum) {
  // amplitude sigma chosen so the *intensity* FWHM equals sum_fwhm_omega()
  const double sigma_amp = pump.sum_fwhm_omega() / two_sqrt_ln2;
  const double d = omega_sum - 2.0 * pump.omega_center();
  return std::exp(-0.5 * (d / sigma_amp) * (d / sigma_amp));
}

void GridOptions::validate() const {
  if (signal_points < 64 || idler_points < 64) {
    throw std::domain_error("GridOptions: need at least 64 points per axis");
  }
  if (!(sum_halfwidth_fwhm > 0.0) || !(diff_halfwidth_lobes > 0.0)) {
    throw std::domain_error("GridOptions: halfwidths must be > 0");
  }
}

FrequencyGrid::FrequencyGrid(Eigen::VectorXd signal_omegas,
                             Eigen::VectorXd idler_omegas)
    : signal_(std::move(signal_omegas)), idler_(std::move(idler_omegas)) {
  for (const auto* axis : {&signal_, &idler_}) {
    if (axis->size() < 64) {
      throw std::domain_error(
          "FrequencyGrid: need at least 64 points per axis");
    }
    for (Eigen::Index j = 1; j < axis->size(); ++j) {
      if (!((*axis)(j) > (*axis)(j - 1))) {
        throw std::domain_error(
            "FrequencyGrid: axes must be strictly increasing");
      }
    }
    if (!((*axis)(0) > 0.0)) {
      throw std::domain_error("FrequencyGrid: frequencies must be positive");
    }
  }
  signal_w_ = trapezoid_weights(signal_);
  idler_w_ = trapezoid_weights(idler_);
}

double FrequencyGrid::sum_span() const {
  return (signal_(signal_.size() - 1) - signal_(0)) +
         (idler_(idler_.size() - 1) - idler_(0));
}

FrequencyGrid FrequencyGrid::around_solution(
    const dispersion::PhaseMatchSolution& solution, const PumpPulse& pump,
    const dispersion::FiberSpec& fiber, const GridOptions& options) {
  options.validate();
  pump.validate();
  fiber.validate();

  // Width of the sinc main lobe along the signal-idler difference direction:
  // delta_k changes by d(delta_k) = -(k'(w_s) - k'(w_i)) dv when moving
  // (w_s, w_i) -> (w_s + dv/2, w_i - dv/2) at fixed sum, so the first zero
  // sits one lobe = 2 pi / (L |k'_s - k'_i|) away in v.
  const auto group_slowness = [&](double omega) {
    const double h = 1e-6 * omega;
    return (fiber.base.wavevector(omega + h) -
            fiber.base.wavevector(omega - h)) /
           (2.0 * h);
  };
  const double slope = std::abs(group_slowness(solution.omega_signal) -
                                group_slowness(solution.omega_idler));
  if (!(slope > 0.0)) {
    throw NumericalError(
        "FrequencyGrid: signal and idler group velocities coincide; cannot "
        "size the grid from the phase-matching lobe");
  }
  const double lobe = 2.0 * pi / (fiber.length_m * slope);

  const double half_sum = options.sum_halfwidth_fwhm * pump.sum_fwhm_omega();
  const double half_diff = options.diff_halfwidth_lobes * lobe;
  // Each axis must accommodate sum deviations up to half_sum and difference
  // deviations up to half_diff; both split evenly between the two axes.
  const double half_axis = 0.5 * (half_sum + half_diff);

  const auto linspace = [](double center, double half, int n) {
    Eigen::VectorXd v(n);
    const double step = 2.0 * half / static_cast<double>(n - 1);
    for (int j = 0; j < n; ++j) {
      v(j) = center - half + step * static_cast<double>(j);
    }
    return v;
  };
  return FrequencyGrid(
      linspace(solution.omega_signal, half_axis, options.signal_points),
      linspace(solution.omega_idler, half_axis, options.idler_points));
}

JointSpectralAmplitude::JointSpectralAmplitude(FrequencyGrid grid,
                                               Eigen::MatrixXcd amplitude,
                                               double sum_reference)
    : grid_(std::move(grid)),
      amp_(std::move(amplitude)),
      sum_reference_(sum_reference) {
  if (amp_.rows() != grid_.signal_omegas().size() ||
      amp_.cols() != grid_.idler_omegas().size()) {
    throw std::domain_error(
        "JointSpectralAmplitude: amplitude shape does not match the grid");
  }
}

namespace {

JointSpectralAmplitude build_jsa(const PumpPulse& pump,
                                 const FrequencyGrid& grid,
                                 const dispersion::FiberSpec* fiber) {
  pump.validate();
  const double six_sigma = 6.0 * pump.sum_sigma_omega();
  if (!(grid.sum_span() >= six_sigma)) {
    std::ostringstream msg;
    msg << "compute_jsa: grid sum span " << grid.sum_span()
        << " rad/s is narrower than 6 pump sigma (" << six_sigma
        << " rad/s); the quadrature would truncate the spectrum";
    throw std::domain_error(msg.str());
  }

  const Eigen::VectorXd& ws = grid.signal_omegas();
  const Eigen::VectorXd& wi = grid.idler_omegas();
  Eigen::MatrixXcd amp(ws.size(), wi.size());
  for (Eigen::Index a = 0; a < ws.size(); ++a) {
    for (Eigen::Index b = 0; b < wi.size(); ++b) {
      const double sum = ws(a) + wi(b);
      double f = pump_envelope(pump, sum);
      if (fiber != nullptr) {
        const double dk =
            dispersion::phase_mismatch(*fiber, 0.5 * sum, ws(a), wi(b));
        f *= sinc(0.5 * dk * fiber->length_m);
      }
      amp(a, b) = f;
    }
  }

  // Normalize so that sum_ab W_a W_b |f_ab|^2 = 1.
  const Eigen::VectorXd& wsa = grid.signal_weights();
  const Eigen::VectorXd& wib = grid.idler_weights();
  double norm_sq = 0.0;
  for (Eigen::Index a = 0; a < ws.size(); ++a) {
    double row = 0.0;
    for (Eigen::Index b = 0; b < wi.size(); ++b) {
      row += wib(b) * std::norm(amp(a, b));
    }
    norm_sq += wsa(a) * row;
  }
  if (!(norm_sq > 0.0) || !std::isfinite(norm_sq)) {
    throw NumericalError("compute_jsa: joint spectrum has zero norm");
  }
  amp /= std::sqrt(norm_sq);
  return JointSpectralAmplitude(grid, std::move(amp), 2.0 * pump.omega_center());
}

}  // namespace

JointSpectralAmplitude compute_jsa(const PumpPulse& pump,
                                   const dispersion::FiberSpec& fiber,
                                   const FrequencyGrid& grid) {
  fiber.validate();
  return build_jsa(pump, grid, &fiber);
}

JointSpectralAmplitude pump_only_jsa(const PumpPulse& pump,
                                     const FrequencyGrid& grid) {
  return build_jsa(pump, grid, nullptr);
}

void PathImbalance::validate() const {
  if (!(residual_distinguishability > 0.0) ||
      !(residual_distinguishability <= 1.0)) {
    throw std::domain_error(
        "PathImbalance: residual_distinguishability must be in (0, 1]");
  }
  if (!std::isfinite(intrinsic_delay_s) || !std::isfinite(compensation_delay_s)) {
    throw std::domain_error("PathImbalance: delays must be finite");
  }
}

std::complex<double> path_overlap(const JointSpectralAmplitude& jsa,
                                  const PathImbalance& imbalance) {
  imbalance.validate();
  const double tau = imbalance.net_delay_s();
  const Eigen::VectorXd& ws = jsa.grid().signal_omegas();
  const Eigen::VectorXd& wi = jsa.grid().idler_omegas();
  const Eigen::VectorXd& wsa = jsa.grid().signal_weights();
  const Eigen::VectorXd& wib = jsa.grid().idler_weights();
  const Eigen::MatrixXcd& amp = jsa.amplitude();
  const double ref = jsa.sum_reference();

  // exp(i (w_s + w_i - ref) tau) factorizes across the two axes
  Eigen::VectorXcd phase_s(ws.size()), phase_i(wi.size());
  for (Eigen::Index a = 0; a < ws.size(); ++a) {
    const double arg = (ws(a) - 0.5 * ref) * tau;
    phase_s(a) = std::complex<double>(std::cos(arg), std::sin(arg));
  }
  for (Eigen::Index b = 0; b < wi.size(); ++b) {
    const double arg = (wi(b) - 0.5 * ref) * tau;
    phase_i(b) = std::complex<double>(std::cos(arg), std::sin(arg));
  }

  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index a = 0; a < ws.size(); ++a) {
    std::complex<double> row(0.0, 0.0);
    for (Eigen::Index b = 0; b < wi.size(); ++b) {
      row += wib(b) * std::norm(amp(a, b)) * phase_i(b);
    }
    acc += wsa(a) * phase_s(a) * row;
  }
  return imbalance.residual_distinguishability * acc;
}

quantum::TwoQubitState entangled_state(const JointSpectralAmplitude& jsa,
                                       const PathImbalance& imbalance) {
  std::complex<double> overlap = path_overlap(jsa, imbalance);
  // quadrature rounding can push |overlap| a hair above eta; clamp the
  // magnitude, never the phase
  const double mag = std::abs(overlap);
  if (mag > 1.0) {
    overlap *= 1.0 / mag;
  }
  return quantum::dephased_pair_state(overlap, imbalance.relative_phase);
}

std::vector<SweepPoint> tangle_delay_sweep(
    const JointSpectralAmplitude& jsa, const PathImbalance& imbalance,
    const std::vector<double>& compensation_delays_s) {
  std::vector<SweepPoint> points;
  points.reserve(compensation_delays_s.size());
  for (const double tau_c : compensation_delays_s) {
    PathImbalance p = imbalance;
    p.compensation_delay_s = tau_c;
    SweepPoint pt;
    pt.compensation_delay_s = tau_c;
    pt.overlap = path_overlap(jsa, p);
    pt.tangle = quantum::tangle(entangled_state(jsa, p));
    points.push_back(pt);
  }
  return points;
}

PumpPulse calibrate_pump_fwhm(const PumpPulse& pump,
                              const dispersion::FiberSpec& fiber,
                              double tau_ref_s, double target_overlap_sq,
                              const GridOptions& options) {
  if (!(target_overlap_sq > 0.0) || !(target_overlap_sq < 1.0)) {
    throw std::domain_error(
        "calibrate_pump_fwhm: target |overlap|^2 must lie in (0, 1)");
  }
  if (tau_ref_s == 0.0) {
    throw std::domain_error(
        "calibrate_pump_fwhm: reference delay must be nonzero");
  }
  const auto solution =
      dispersion::solve_phase_matching(fiber, pump.center_wavelength_nm);

  const auto overlap_sq_at = [&](double fwhm_nm) {
    PumpPulse candidate = pump;
    candidate.spectral_fwhm_nm = fwhm_nm;
    const FrequencyGrid grid =
        FrequencyGrid::around_solution(solution, candidate, fiber, options);
    const JointSpectralAmplitude jsa = compute_jsa(candidate, fiber, grid);
    PathImbalance ref;
    ref.intrinsic_delay_s = tau_ref_s;
    const std::complex<double> g = path_overlap(jsa, ref);
    return std::norm(g);
  };

  double lo = 0.05;                                     // nm
  double hi = pump.center_wavelength_nm / 10.0 * 0.99;  // validity limit
  const double f_lo = overlap_sq_at(lo);
  const double f_hi = overlap_sq_at(hi);
  // |gamma|^2 decreases with spectral width (shorter coherence time)
  if (!(f_lo > target_overlap_sq) || !(f_hi < target_overlap_sq)) {
    std::ostringstream msg;
    msg << "calibrate_pump_fwhm: target " << target_overlap_sq
        << " not bracketed: |overlap|^2 spans [" << f_hi << ", " << f_lo
        << "] for FWHM in [" << lo << ", " << hi << "] nm";
    throw NumericalError(msg.str());
  }
  for (int it = 0; it < 100 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (overlap_sq_at(mid) > target_overlap_sq) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  PumpPulse calibrated = pump;
  calibrated.spectral_fwhm_nm = 0.5 * (lo + hi);
  return calibrated;
}

}  // namespace pmfpair::source
