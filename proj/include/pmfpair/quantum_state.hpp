#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>

namespace pmfpair::quantum {

using Ket2 = Eigen::Vector2cd;  // single polarization qubit
using Ket4 = Eigen::Vector4cd;  // two-qubit product space, signal first

// Standard polarization analysis kets.
Ket2 ket_h();
Ket2 ket_v();
Ket2 ket_d();  // (H + V)/sqrt(2)
Ket2 ket_a();  // (H - V)/sqrt(2)
Ket2 ket_l();  // (H - iV)/sqrt(2)
Ket2 ket_r();  // (H + iV)/sqrt(2)

// One of 'H','V','D','A','L','R'; anything else throws std::domain_error.
Ket2 ket_from_label(char label);

// |signal> (x) |idler>, ordered HH, HV, VH, VV.
Ket4 product_ket(const Ket2& signal, const Ket2& idler);

Ket4 bell_phi_plus_ket();  // (|HH> + |VV>)/sqrt(2)

// Validated two-qubit density matrix in the {HH, HV, VH, VV} basis
// (signal qubit first). Construction via from_matrix enforces hermiticity
// (1e-12), unit trace (1e-12) and eigenvalues >= -1e-10, throwing
// std::domain_error naming the violated property.
class TwoQubitState {
 public:
  static const std::array<const char*, 4> basis_labels;

  static TwoQubitState from_matrix(const Eigen::Matrix4cd& rho);

  const Eigen::Matrix4cd& matrix() const { return rho_; }

 private:
  explicit TwoQubitState(const Eigen::Matrix4cd& rho) : rho_(rho) {}
  Eigen::Matrix4cd rho_;
};

// Partially dephased polarization-entangled pair
//   rho = (|HH><HH| + |VV><VV|)/2 + (e^{i phase} conj(overlap)/2)|HH><VV| + h.c.
// `overlap` is the complex temporal-mode overlap of the two pair-generation
// paths (|overlap| <= 1) and `phase` an extra settable relative phase.
// |overlap| = 1, phase = 0 gives the Bell state Phi+; overlap = 0 the fully
// dephased mixture.
TwoQubitState dephased_pair_state(std::complex<double> overlap,
                                  double phase = 0.0);

// Wootters tangle (squared concurrence), 0 for separable states through 1
// for Bell states. Computed from the eigenvalues of rho (sy x sy) rho^*
// (sy x sy); see Wootters, PRL 80, 2245 (1998).
double tangle(const TwoQubitState& state);

// Normalized linear entropy (4/3)(1 - Tr rho^2): 0 for pure states, 1 for
// the maximally mixed state.
double linear_entropy(const TwoQubitState& state);

double purity(const TwoQubitState& state);  // Tr rho^2

// <psi| rho |psi> for a normalized pure reference ket.
double fidelity_to_ket(const TwoQubitState& state, const Ket4& psi);

}  // namespace pmfpair::quantum
