#pragma once

#include <array>
#include <string>

namespace pmfpair::dispersion {

// Three-term Sellmeier model n^2(lambda) = 1 + sum_j B_j lambda^2 / (lambda^2 - C_j^2),
// lambda in micrometres. Evaluation outside [min,max]_wavelength_um throws
// std::domain_error naming the valid interval; no silent extrapolation.
class SellmeierModel {
 public:
  SellmeierModel(std::string name, std::array<double, 3> strengths,
                 std::array<double, 3> resonances_um, double min_wavelength_um,
                 double max_wavelength_um);

  // Fused silica fit from Malitson, JOSA 55, 1205 (1965), valid 0.21-3.71 um.
  static SellmeierModel fused_silica();

  double refractive_index(double wavelength_um) const;

  // k(omega) = n(omega) * omega / c for omega > 0 inside the validity window
  double wavevector(double omega) const;

  double min_wavelength_um() const { return min_wavelength_um_; }
  double max_wavelength_um() const { return max_wavelength_um_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::array<double, 3> strengths_;
  std::array<double, 3> resonances_um_;
  double min_wavelength_um_;
  double max_wavelength_um_;
};

// Polarization-maintaining fiber: isotropic base dispersion plus a constant
// phase birefringence delta_n = n_slow - n_fast > 0. The pump propagates on
// the slow axis and the generated pair on the fast axis, so delta_n enters
// the mismatch only through the +2 delta_n omega_p / c term below.
struct FiberSpec {
  SellmeierModel base = SellmeierModel::fused_silica();
  double birefringence = 3.5e-4;
  double length_m = 0.20;

  void validate() const;  // throws std::domain_error on nonsense values
};

// Momentum mismatch for degenerate-pump four-wave mixing with the pump on
// the slow axis and signal/idler on the fast axis:
//   delta_k = 2 k(w_p) - k(w_s) - k(w_i) + 2 delta_n w_p / c
// All frequencies are angular (rad/s). Positive birefringence shifts the
// zero crossing to large signal/idler detunings.
double phase_mismatch(const FiberSpec& fiber, double omega_pump,
                      double omega_signal, double omega_idler);

struct PhaseMatchSolution {
  double omega_pump = 0.0;    // rad/s
  double omega_signal = 0.0;  // rad/s, omega_signal > omega_pump
  double omega_idler = 0.0;   // rad/s, omega_idler = 2 omega_pump - omega_signal
  double residual = 0.0;      // delta_k at the root, 1/m
  bool ambiguous = false;     // true if other sign changes exist in the window

  double detuning() const { return omega_signal - omega_pump; }
  double signal_wavelength_nm() const;
  double idler_wavelength_nm() const;
};

struct SolveOptions {
  // Maximum |omega_s - omega_p| scanned for sign changes. 0 = scan up to the
  // edge of the dispersion model's validity window.
  double max_detuning = 0.0;
  // Coarse scan resolution used to bracket sign changes.
  int scan_points = 4000;
};

// Finds the signal/idler pair that zeroes the mismatch at fixed pump, with
// omega_i = 2 omega_p - omega_s substituted so energy conservation holds by
// construction. Brackets sign changes on a coarse scan, then bisects to a
// relative width of 1e-12. If several sign changes exist the one with the
// smallest detuning is returned and `ambiguous` is set. No sign change in
// the window throws NumericalError.
PhaseMatchSolution solve_phase_matching(const FiberSpec& fiber,
                                        double pump_wavelength_nm,
                                        const SolveOptions& options = {});

}  // namespace pmfpair::dispersion
