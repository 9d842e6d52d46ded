#include "pmfpair/dispersion.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pmfpair/constants.hpp"
#include "pmfpair/errors.hpp"

namespace pmfpair::dispersion {

SellmeierModel::SellmeierModel(std::string name,
                               std::array<double, 3> strengths,
                               std::array<double, 3> resonances_um,
                               double min_wavelength_um,
                               double max_wavelength_um)
    : name_(std::move(name)),
      strengths_(strengths),
      resonances_um_(resonances_um),
      min_wavelength_um_(min_wavelength_um),
      max_wavelength_um_(max_wavelength_um) {
  if (!(min_wavelength_um_ > 0.0) || !(max_wavelength_um_ > min_wavelength_um_)) {
    throw std::domain_error("SellmeierModel: invalid validity window");
  }
}

SellmeierModel SellmeierModel::fused_silica() {
  return SellmeierModel("fused silica (Malitson 1965)",
                        {0.6961663, 0.4079426, 0.8974794},
                        {0.0684043, 0.1162414, 9.896161}, 0.21, 3.71);
}

double SellmeierModel::refractive_index(double wavelength_um) const {
  if (!(wavelength_um >= min_wavelength_um_) ||
      !(wavelength_um <= max_wavelength_um_)) {
    std::ostringstream msg;
    msg << name_ << ": wavelength " << wavelength_um
        << " um outside validity range [" << min_wavelength_um_ << ", "
        << max_wavelength_um_ << "] um";
    throw std::domain_error(msg.str());
  }
  const double l2 = wavelength_um * wavelength_um;
  double n2 = 1.0;
  for (int j = 0; j < 3; ++j) {
    const double c2 = resonances_um_[j] * resonances_um_[j];
    n2 += strengths_[j] * l2 / (l2 - c2);
  }
  return std::sqrt(n2);
}

double SellmeierModel::wavevector(double omega) const {
  if (!(omega > 0.0)) {
    throw std::domain_error(name_ + ": wavevector requires omega > 0");
  }
  const double wavelength_um = 2.0 * pi * speed_of_light / omega * 1e6;
  return refractive_index(wavelength_um) * omega / speed_of_light;
}

void FiberSpec::validate() const {
  if (!(length_m > 0.0)) {
    throw std::domain_error("FiberSpec: length must be > 0");
  }
  if (!(birefringence > -1e-2) || !(birefringence < 1e-2)) {
    throw std::domain_error(
        "FiberSpec: |birefringence| must be below 1e-2 (phase birefringence "
        "of a PM fiber, not a refractive index)");
  }
}

double phase_mismatch(const FiberSpec& fiber, double omega_pump,
                      double omega_signal, double omega_idler) {
  const SellmeierModel& m = fiber.base;
  return 2.0 * m.wavevector(omega_pump) - m.wavevector(omega_signal) -
         m.wavevector(omega_idler) +
         2.0 * fiber.birefringence * omega_pump / speed_of_light;
}

double PhaseMatchSolution::signal_wavelength_nm() const {
  return omega_to_wavelength_nm(omega_signal);
}

double PhaseMatchSolution::idler_wavelength_nm() const {
  return omega_to_wavelength_nm(omega_idler);
}

PhaseMatchSolution solve_phase_matching(const FiberSpec& fiber,
                                        double pump_wavelength_nm,
                                        const SolveOptions& options) {
  fiber.validate();
  if (!(pump_wavelength_nm > 0.0)) {
    throw std::domain_error("solve_phase_matching: pump wavelength must be > 0");
  }
  const double omega_p = wavelength_nm_to_omega(pump_wavelength_nm);

  // Largest detuning keeping both signal (blue side) and idler (red side)
  // inside the dispersion model's validity window.
  const double omega_blue_edge =
      2.0 * pi * speed_of_light / (fiber.base.min_wavelength_um() * 1e-6);
  const double omega_red_edge =
      2.0 * pi * speed_of_light / (fiber.base.max_wavelength_um() * 1e-6);
  double max_detuning =
      std::min(omega_blue_edge - omega_p, omega_p - omega_red_edge);
  if (options.max_detuning > 0.0) {
    max_detuning = std::min(max_detuning, options.max_detuning);
  }
  if (!(max_detuning > 0.0)) {
    throw NumericalError(
        "solve_phase_matching: pump wavelength leaves no room inside the "
        "dispersion validity window");
  }

  const auto mismatch_at = [&](double detuning) {
    return phase_mismatch(fiber, omega_p, omega_p + detuning,
                          omega_p - detuning);
  };

  // Coarse scan for sign changes; start away from zero detuning because the
  // mismatch at exact degeneracy equals 2 delta_n w_p / c (no root there for
  // delta_n > 0) and tiny detunings are numerically indistinct from it.
  const int n_scan = std::max(16, options.scan_points);
  const double d0 = max_detuning / static_cast<double>(n_scan);
  std::vector<std::pair<double, double>> brackets;
  double prev_x = d0;
  double prev_f = mismatch_at(prev_x);
  for (int j = 2; j <= n_scan; ++j) {
    const double x = d0 * static_cast<double>(j);
    const double f = mismatch_at(x);
    if (prev_f == 0.0) {
      brackets.emplace_back(prev_x, prev_x);
    } else if ((prev_f < 0.0) != (f < 0.0)) {
      brackets.emplace_back(prev_x, x);
    }
    prev_x = x;
    prev_f = f;
  }
  if (brackets.empty()) {
    std::ostringstream msg;
    msg << "solve_phase_matching: no phase-matched solution for pump "
        << pump_wavelength_nm << " nm, birefringence " << fiber.birefringence
        << " within detuning window " << max_detuning << " rad/s";
    throw NumericalError(msg.str());
  }

  // Bisection on the bracket with the smallest detuning.
  double lo = brackets.front().first;
  double hi = brackets.front().second;
  double flo = mismatch_at(lo);
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = mismatch_at(mid);
    if (fmid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);

  PhaseMatchSolution sol;
  sol.omega_pump = omega_p;
  sol.omega_signal = omega_p + root;
  sol.omega_idler = omega_p - root;
  sol.residual = mismatch_at(root);
  sol.ambiguous = brackets.size() > 1;

  const double scale = 2.0 * fiber.base.wavevector(omega_p);
  if (std::abs(sol.residual) > 1e-6 * scale) {
    throw NumericalError(
        "solve_phase_matching: bisection failed to reduce the residual "
        "mismatch below 1e-6 of the pump wavevector");
  }
  return sol;
}

}  // namespace pmfpair::dispersion
