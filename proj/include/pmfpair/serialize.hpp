#pragma once

#include <json.hpp>

#include "pmfpair/dispersion.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/source_model.hpp"
#include "pmfpair/tomography.hpp"

namespace pmfpair::serialize {

// Density matrix schema:
//   {"basis": ["HH","HV","VH","VV"], "re": [[4x4]], "im": [[4x4]]}
// Reading re-validates the physical invariants and reports which one failed.
// Extra keys (e.g. the metrics of a reconstruction report) are ignored on
// read, so a report parses as a density matrix too.
nlohmann::ordered_json density_matrix_to_json(
    const quantum::TwoQubitState& state);
quantum::TwoQubitState density_matrix_from_json(const nlohmann::json& j);

nlohmann::ordered_json phase_match_to_json(
    const dispersion::PhaseMatchSolution& solution);

// Grid axes in rad/s plus the re/im parts of the normalized amplitude.
nlohmann::ordered_json jsa_to_json(const source::JointSpectralAmplitude& jsa);

// Density matrix fields plus tangle / linear_entropy / fidelity_phi_plus /
// brightness / nll / converged, and optionally bootstrap errors keyed by
// metric name.
nlohmann::ordered_json reconstruction_report_to_json(
    const tomo::TomographyResult& result,
    const std::vector<tomo::ErrorEstimate>& errors = {});

}  // namespace pmfpair::serialize
