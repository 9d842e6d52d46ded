#include "pmfpair/quantum_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pmfpair::quantum {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
constexpr double inv_sqrt2 = 0.7071067811865475244;
}  // namespace

Ket2 ket_h() { return Ket2(1.0, 0.0); }
Ket2 ket_v() { return Ket2(0.0, 1.0); }
Ket2 ket_d() { return Ket2(inv_sqrt2, inv_sqrt2); }
Ket2 ket_a() { return Ket2(inv_sqrt2, -inv_sqrt2); }
Ket2 ket_l() { return Ket2(inv_sqrt2, -I * inv_sqrt2); }
Ket2 ket_r() { return Ket2(inv_sqrt2, I * inv_sqrt2); }

Ket2 ket_from_label(char label) {
  switch (label) {
    case 'H': return ket_h();
    case 'V': return ket_v();
    case 'D': return ket_d();
    case 'A': return ket_a();
    case 'L': return ket_l();
    case 'R': return ket_r();
    default:
      throw std::domain_error(std::string("unknown polarization label '") +
                              label + "' (expected one of H V D A L R)");
  }
}

Ket4 product_ket(const Ket2& signal, const Ket2& idler) {
  Ket4 out;
  out(0) = signal(0) * idler(0);
  out(1) = signal(0) * idler(1);
  out(2) = signal(1) * idler(0);
  out(3) = signal(1) * idler(1);
  return out;
}

Ket4 bell_phi_plus_ket() {
  Ket4 out = Ket4::Zero();
  out(0) = inv_sqrt2;
  out(3) = inv_sqrt2;
  return out;
}

const std::array<const char*, 4> TwoQubitState::basis_labels = {"HH", "HV",
                                                                "VH", "VV"};

TwoQubitState TwoQubitState::from_matrix(const Eigen::Matrix4cd& rho) {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm <= 1e-12)) {
    std::ostringstream msg;
    msg << "TwoQubitState: matrix is not Hermitian (max |rho - rho^H| = "
        << herm << ", tolerance 1e-12)";
    throw std::domain_error(msg.str());
  }
  const std::complex<double> tr = rho.trace();
  if (!(std::abs(tr - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg << "TwoQubitState: trace " << tr.real() << " + " << tr.imag()
        << "i differs from 1 by more than 1e-12";
    throw std::domain_error(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho,
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig >= -1e-10)) {
    std::ostringstream msg;
    msg << "TwoQubitState: matrix is not positive semidefinite (smallest "
           "eigenvalue "
        << min_eig << ", tolerance -1e-10)";
    throw std::domain_error(msg.str());
  }
  return TwoQubitState(rho);
}

TwoQubitState dephased_pair_state(std::complex<double> overlap, double phase) {
  if (!(std::abs(overlap) <= 1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dephased_pair_state: |overlap| = " << std::abs(overlap)
        << " exceeds 1";
    throw std::domain_error(msg.str());
  }
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(0, 0) = 0.5;
  rho(3, 3) = 0.5;
  const std::complex<double> coherence =
      0.5 * std::conj(overlap) * std::exp(I * phase);
  rho(0, 3) = coherence;
  rho(3, 0) = std::conj(coherence);
  return TwoQubitState::from_matrix(rho);
}

double tangle(const TwoQubitState& state) {
  const Eigen::Matrix4cd& rho = state.matrix();
  // sy (x) sy in the HH,HV,VH,VV basis: antidiagonal (-1, 1, 1, -1)
  Eigen::Matrix4cd spin_flip = Eigen::Matrix4cd::Zero();
  spin_flip(0, 3) = -1.0;
  spin_flip(1, 2) = 1.0;
  spin_flip(2, 1) = 1.0;
  spin_flip(3, 0) = -1.0;

  const Eigen::Matrix4cd product =
      rho * spin_flip * rho.conjugate() * spin_flip;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(product, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("tangle: eigenvalue decomposition failed");
  }

  std::array<double, 4> vals{};
  double max_val = 0.0;
  for (int j = 0; j < 4; ++j) {
    vals[j] = std::max(0.0, es.eigenvalues()(j).real());
    max_val = std::max(max_val, vals[j]);
  }
  // The eigenvalues of rho rho~ are >= 0 in exact arithmetic; tiny spurious
  // values from rounding would otherwise leak O(sqrt(eps)) noise through the
  // square root below.
  std::array<double, 4> lambda{};
  for (int j = 0; j < 4; ++j) {
    lambda[j] = (vals[j] < 1e-12 * max_val) ? 0.0 : std::sqrt(vals[j]);
  }
  std::sort(lambda.begin(), lambda.end(), std::greater<double>());
  const double c = std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
  return c * c;
}

double purity(const TwoQubitState& state) {
  const Eigen::Matrix4cd& rho = state.matrix();
  return (rho * rho).trace().real();
}

double linear_entropy(const TwoQubitState& state) {
  return (4.0 / 3.0) * (1.0 - purity(state));
}

double fidelity_to_ket(const TwoQubitState& state, const Ket4& psi) {
  const double norm = psi.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "fidelity_to_ket: reference ket has norm " << norm
        << ", expected 1";
    throw std::domain_error(msg.str());
  }
  const std::complex<double> val = psi.dot(state.matrix() * psi);
  return std::clamp(val.real(), 0.0, 1.0);
}

}  // namespace pmfpair::quantum
