#include "pmfpair/visibility.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pmfpair/constants.hpp"
#include "pmfpair/errors.hpp"

namespace pmfpair::vis {

FringeFit fit_fringe(const std::vector<double>& angles_rad,
                     const std::vector<double>& values) {
  if (angles_rad.size() != values.size()) {
    throw std::domain_error("fit_fringe: angle/value size mismatch");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(angles_rad.size());
  if (n < 8) {
    throw std::domain_error("fit_fringe: need at least 8 samples");
  }
  const auto [lo, hi] =
      std::minmax_element(angles_rad.begin(), angles_rad.end());
  if (!(*hi - *lo >= pi - 1e-9)) {
    throw std::domain_error(
        "fit_fringe: angle grid must span at least pi (one fringe period)");
  }

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double th = angles_rad[static_cast<size_t>(k)];
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(2.0 * th);
    design(k, 2) = std::sin(2.0 * th);
    rhs(k) = values[static_cast<size_t>(k)];
  }
  const Eigen::Vector3d c =
      design.colPivHouseholderQr().solve(rhs);

  FringeFit fit;
  fit.offset = c(0);
  fit.amplitude = std::hypot(c(1), c(2));
  fit.phase = std::atan2(-c(2), c(1));
  double max_res = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double model = c(0) + c(1) * design(k, 1) + c(2) * design(k, 2);
    max_res = std::max(max_res, std::abs(model - rhs(k)));
  }
  fit.max_residual = max_res;

  const double scale = rhs.cwiseAbs().maxCoeff();
  if (fit.offset <= 1e-12 * std::max(scale, 1.0) &&
      fit.amplitude <= 1e-12 * std::max(scale, 1.0)) {
    throw NumericalError(
        "fit_fringe: degenerate fringe (offset and amplitude are both zero)");
  }
  return fit;
}

VisibilityScan visibility_curve(const quantum::TwoQubitState& state,
                                Basis basis,
                                const std::vector<double>& angles_rad,
                                double brightness) {
  if (!(brightness > 0.0)) {
    throw std::domain_error("visibility_curve: brightness must be > 0");
  }
  const quantum::Ket2 idler =
      (basis == Basis::HV) ? quantum::ket_h() : quantum::ket_d();

  VisibilityScan scan;
  scan.basis = basis;
  scan.angles_rad = angles_rad;
  scan.coincidences.reserve(angles_rad.size());
  for (const double th : angles_rad) {
    const quantum::Ket2 signal(std::cos(th), std::sin(th));
    const quantum::Ket4 proj = quantum::product_ket(signal, idler);
    scan.coincidences.push_back(brightness *
                                quantum::fidelity_to_ket(state, proj));
  }
  scan.fit = fit_fringe(scan.angles_rad, scan.coincidences);

  // fringe extrema from the fit: max = a + b, min = a - b
  const double v = scan.fit.amplitude / scan.fit.offset;
  if (!(v <= 1.0 + 1e-6) || !(scan.fit.offset > 0.0)) {
    std::ostringstream msg;
    msg << "visibility_curve: unphysical fringe (offset " << scan.fit.offset
        << ", amplitude " << scan.fit.amplitude << ")";
    throw NumericalError(msg.str());
  }
  scan.visibility = std::clamp(v, 0.0, 1.0);
  return scan;
}

}  // namespace pmfpair::vis
