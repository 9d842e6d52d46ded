#pragma once

#include <vector>

#include "pmfpair/quantum_state.hpp"

namespace pmfpair::vis {

// Which fringe is scanned: idler analyzer fixed to H (the computational
// basis fringe) or to D (the superposition-basis fringe whose contrast
// measures the coherence of the pair).
enum class Basis { HV, DA };

struct FringeFit {
  double offset = 0.0;     // a  in a + b cos(2 theta + c)
  double amplitude = 0.0;  // b >= 0
  double phase = 0.0;      // c
  double max_residual = 0.0;
};

// Least-squares fit of a + b cos(2 theta + c) to a coincidence curve,
// linear in (a, b cos c, -b sin c). Degenerate data (offset and amplitude
// both ~0) throws NumericalError.
FringeFit fit_fringe(const std::vector<double>& angles_rad,
                     const std::vector<double>& values);

struct VisibilityScan {
  Basis basis = Basis::HV;
  std::vector<double> angles_rad;
  std::vector<double> coincidences;
  FringeFit fit;
  double visibility = 0.0;  // amplitude / offset, in [0, 1]
};

// Coincidence fringe: the signal analyzer rotates to cos(theta)|H> +
// sin(theta)|V| while the idler analyzer stays at H (HV) or D (DA);
// C(theta) = brightness <proj|rho|proj>. The visibility comes from the
// fitted extrema (a+b vs a-b), not from sampled extrema. The angle grid
// must span at least pi (one full fringe period) and hold >= 8 points.
VisibilityScan visibility_curve(const quantum::TwoQubitState& state,
                                Basis basis,
                                const std::vector<double>& angles_rad,
                                double brightness);

}  // namespace pmfpair::vis
