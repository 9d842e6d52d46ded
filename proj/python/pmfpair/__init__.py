"""Simulation and estimation toolkit for a fiber-based polarization-entangled
photon-pair source: phase matching, joint-spectrum overlap, coincidence
tomography and entanglement metrics."""

from ._core import (
    __version__,
    bell_phi_plus,
    bootstrap_errors,
    born_probabilities,
    calibrated_pump_fwhm_nm,
    delay_sweep,
    dephased_pair_state,
    fidelity_phi_plus,
    linear_entropy,
    mle_reconstruct,
    model_overlap,
    model_state,
    phase_mismatch,
    purity,
    refractive_index,
    settings,
    simulate_counts,
    solve_phase_matching,
    tangle,
    visibility,
)

__all__ = [
    "__version__",
    "bell_phi_plus",
    "bootstrap_errors",
    "born_probabilities",
    "calibrated_pump_fwhm_nm",
    "delay_sweep",
    "dephased_pair_state",
    "fidelity_phi_plus",
    "linear_entropy",
    "mle_reconstruct",
    "model_overlap",
    "model_state",
    "phase_mismatch",
    "purity",
    "refractive_index",
    "settings",
    "simulate_counts",
    "solve_phase_matching",
    "tangle",
    "visibility",
]
