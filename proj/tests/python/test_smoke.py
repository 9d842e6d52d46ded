"""End-to-end smoke checks of the python bindings."""

import math

import numpy as np
import pytest

import pmfpair


def test_version():
    assert pmfpair.__version__ == "1.0.0"


def test_refractive_index_reference_point():
    assert pmfpair.refractive_index(0.726) == pytest.approx(1.454724, abs=1e-6)


def test_phase_matching_solution_window():
    sol = pmfpair.solve_phase_matching()
    assert 629.0 <= sol["signal_wavelength_nm"] <= 639.0
    assert 845.0 <= sol["idler_wavelength_nm"] <= 855.0
    assert sol["detuning_thz"] == pytest.approx(60.1418031, abs=1e-4)
    assert not sol["ambiguous"]
    mismatch = pmfpair.phase_mismatch(
        sol["pump_omega_rad_s"],
        sol["signal_omega_rad_s"],
        sol["idler_omega_rad_s"],
    )
    assert abs(mismatch) < 1e-3


def test_entanglement_metrics_closed_forms():
    bell = pmfpair.bell_phi_plus()
    assert pmfpair.tangle(bell) == pytest.approx(1.0, abs=1e-12)
    assert pmfpair.purity(bell) == pytest.approx(1.0, abs=1e-12)
    assert pmfpair.linear_entropy(bell) == pytest.approx(0.0, abs=1e-12)
    assert pmfpair.fidelity_phi_plus(bell) == pytest.approx(1.0, abs=1e-12)

    g = 0.6
    rho = pmfpair.dephased_pair_state(g)
    assert pmfpair.tangle(rho) == pytest.approx(g * g, abs=1e-12)
    assert pmfpair.fidelity_phi_plus(rho) == pytest.approx((1 + g) / 2, abs=1e-12)


def test_settings_and_born_probabilities():
    labels = pmfpair.settings()
    assert len(labels) == 36
    assert labels[0] == "HH"
    probs = pmfpair.born_probabilities(pmfpair.bell_phi_plus())
    assert probs[0] == pytest.approx(0.5, abs=1e-12)
    assert probs[labels.index("HV")] == pytest.approx(0.0, abs=1e-12)


def test_simulated_counts_deterministic():
    bell = pmfpair.bell_phi_plus()
    noiseless = pmfpair.simulate_counts(bell, 1000.0, 1, noiseless=True)
    assert noiseless[0] == 500
    a = pmfpair.simulate_counts(bell, 1e4, seed=5)
    b = pmfpair.simulate_counts(bell, 1e4, seed=5)
    c = pmfpair.simulate_counts(bell, 1e4, seed=6)
    assert a == b
    assert a != c


def test_reconstruction_round_trip():
    truth = pmfpair.dephased_pair_state(0.9)
    counts = pmfpair.simulate_counts(truth, 1e6, 1, noiseless=True)
    result = pmfpair.mle_reconstruct(counts)
    assert result["converged"]
    assert result["tangle"] == pytest.approx(0.81, abs=1e-3)
    assert np.linalg.norm(result["rho"] - truth) < 1e-3
    again = pmfpair.mle_reconstruct(counts)
    assert np.array_equal(result["rho"], again["rho"])


def test_bootstrap_errors_present():
    counts = pmfpair.simulate_counts(pmfpair.bell_phi_plus(), 2000.0, 3)
    errors = pmfpair.bootstrap_errors(counts, resamples=10, seed=4)
    assert set(errors) == {"tangle", "linear_entropy", "fidelity_phi_plus"}
    est = errors["tangle"]
    assert est["samples"] + est["skipped"] == 10
    assert est["std"] >= 0.0


def test_visibility_two_bases():
    rho = pmfpair.dephased_pair_state(0.6)
    hv = pmfpair.visibility(rho, "HV")
    da = pmfpair.visibility(rho, "DA")
    assert hv["visibility"] == pytest.approx(1.0, abs=1e-9)
    assert da["visibility"] == pytest.approx(0.6, abs=1e-9)
    assert len(hv["angles_rad"]) == 37
    with pytest.raises(Exception):
        pmfpair.visibility(rho, "XY")


def test_source_model_defaults():
    # default configuration: matched delays, no residual distinguishability
    (gamma,) = pmfpair.model_overlap(delays_fs=[28.0])
    assert abs(gamma) == pytest.approx(1.0, abs=1e-9)
    assert pmfpair.calibrated_pump_fwhm_nm() == pytest.approx(6.0, abs=1e-12)
    rho = pmfpair.model_state()
    assert pmfpair.tangle(rho) == pytest.approx(1.0, abs=1e-9)


def test_delay_sweep_peak():
    rows = pmfpair.delay_sweep()
    assert len(rows) == 51
    best = max(rows, key=lambda r: r["tangle"])
    assert best["delay_fs"] == pytest.approx(28.0, abs=1e-9)
    assert best["tangle"] == pytest.approx(1.0, abs=1e-9)
    assert math.isfinite(abs(best["overlap"]))
