#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "pmfpair/constants.hpp"
#include "pmfpair/dispersion.hpp"
#include "pmfpair/errors.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/source_model.hpp"

using namespace pmfpair;
using namespace pmfpair::dispersion;
using namespace pmfpair::source;
using Complex = std::complex<double>;

namespace {

FiberSpec reference_fiber() {
    FiberSpec fiber;
    fiber.birefringence = 3.5e-4;
    fiber.length_m = 0.20;
    return fiber;
}

JointSpectralAmplitude reference_jsa(const PumpPulse& pump, const FiberSpec& fiber,
                                     const GridOptions& options = {}) {
    const PhaseMatchSolution sol = solve_phase_matching(fiber, pump.center_wavelength_nm);
    const FrequencyGrid grid = FrequencyGrid::around_solution(sol, pump, fiber, options);
    return compute_jsa(pump, fiber, grid);
}

}  // namespace

TEST_CASE("pump spectral width converts to the frozen sum-frequency FWHM") {
    PumpPulse pump;  // 6 nm at 726 nm
    CHECK(pump.sum_fwhm_omega() == doctest::Approx(2.144265609485751e13).epsilon(1e-12));
    const double sigma = pump.sum_fwhm_omega() / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    CHECK(pump.sum_sigma_omega() == doctest::Approx(sigma).epsilon(1e-12));
}

TEST_CASE("pump envelope peaks at the doubled pump frequency with half intensity at FWHM/2") {
    PumpPulse pump;
    const double ref = 2.0 * pump.omega_center();
    CHECK(pump_envelope(pump, ref) == doctest::Approx(1.0).epsilon(1e-15));
    const double half = pump_envelope(pump, ref + 0.5 * pump.sum_fwhm_omega());
    CHECK(half * half == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pump_envelope(pump, ref - 0.3e13) ==
          doctest::Approx(pump_envelope(pump, ref + 0.3e13)).epsilon(1e-14));
}

TEST_CASE("pump validation rejects out-of-model parameters") {
    PumpPulse pump;
    pump.spectral_fwhm_nm = 80.0;  // not narrowband relative to 726 nm
    CHECK_THROWS_AS(pump.validate(), std::domain_error);
    pump.spectral_fwhm_nm = 6.0;
    pump.center_wavelength_nm = -1.0;
    CHECK_THROWS_AS(pump.validate(), std::domain_error);
}

TEST_CASE("grid construction enforces size, ordering, and positivity") {
    const Eigen::VectorXd good = Eigen::VectorXd::LinSpaced(64, 1.0e15, 1.1e15);
    CHECK_NOTHROW(FrequencyGrid(good, good));
    CHECK_THROWS_AS(FrequencyGrid(Eigen::VectorXd::LinSpaced(16, 1.0e15, 1.1e15), good),
                    std::domain_error);
    Eigen::VectorXd unsorted = good;
    std::swap(unsorted(3), unsorted(4));
    CHECK_THROWS_AS(FrequencyGrid(unsorted, good), std::domain_error);
    CHECK_THROWS_AS(FrequencyGrid(Eigen::VectorXd::LinSpaced(64, -1.0, 1.0), good),
                    std::domain_error);
}

TEST_CASE("solution-centered grid covers the pump band and stays ordered") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const PhaseMatchSolution sol = solve_phase_matching(fiber, pump.center_wavelength_nm);
    const FrequencyGrid grid = FrequencyGrid::around_solution(sol, pump, fiber);

    CHECK(grid.signal_omegas().size() == 512);
    CHECK(grid.idler_omegas().size() == 512);
    CHECK(grid.sum_span() >= 6.0 * pump.sum_sigma_omega());
    // Axes are centered on the matched pair.
    const Eigen::VectorXd& ws = grid.signal_omegas();
    const Eigen::VectorXd& wi = grid.idler_omegas();
    CHECK(0.5 * (ws(0) + ws(ws.size() - 1)) == doctest::Approx(sol.omega_signal).epsilon(1e-12));
    CHECK(0.5 * (wi(0) + wi(wi.size() - 1)) == doctest::Approx(sol.omega_idler).epsilon(1e-12));
    for (Eigen::Index a = 1; a < ws.size(); ++a) CHECK(ws(a) > ws(a - 1));
    // Trapezoid weights: half at the ends, spacing in the middle, summing to the span.
    const Eigen::VectorXd& w = grid.signal_weights();
    const double h = ws(1) - ws(0);
    CHECK(w(0) == doctest::Approx(0.5 * h).epsilon(1e-12));
    CHECK(w(5) == doctest::Approx(h).epsilon(1e-12));
    CHECK(w.sum() == doctest::Approx(ws(ws.size() - 1) - ws(0)).epsilon(1e-12));
}

TEST_CASE("joint spectrum is normalized under the grid weights") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    const Eigen::VectorXd& wa = jsa.grid().signal_weights();
    const Eigen::VectorXd& wb = jsa.grid().idler_weights();
    double total = 0.0;
    for (Eigen::Index a = 0; a < wa.size(); ++a)
        for (Eigen::Index b = 0; b < wb.size(); ++b)
            total += wa(a) * wb(b) * std::norm(jsa.amplitude()(a, b));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(jsa.sum_reference() == doctest::Approx(2.0 * pump.omega_center()).epsilon(1e-15));
}

TEST_CASE("joint spectrum rejects grids that truncate the pump band") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const PhaseMatchSolution sol = solve_phase_matching(fiber, pump.center_wavelength_nm);
    const double half = 0.5 * pump.sum_sigma_omega();  // far too narrow
    const Eigen::VectorXd ws =
        Eigen::VectorXd::LinSpaced(64, sol.omega_signal - half, sol.omega_signal + half);
    const Eigen::VectorXd wi =
        Eigen::VectorXd::LinSpaced(64, sol.omega_idler - half, sol.omega_idler + half);
    CHECK_THROWS_AS((void)compute_jsa(pump, fiber, FrequencyGrid(ws, wi)), std::domain_error);
}

TEST_CASE("pump-only overlap reproduces the Gaussian characteristic function") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const PhaseMatchSolution sol = solve_phase_matching(fiber, pump.center_wavelength_nm);
    const double sigma = pump.sum_sigma_omega();
    // Without the phase-matching factor the spectrum does not decay along the
    // frequency difference, so a square grid clips the sum coordinate with a
    // tent-shaped window. An asymmetric rectangle keeps that window flat over
    // the whole pump band and the closed form holds to quadrature accuracy.
    const Eigen::VectorXd ws = Eigen::VectorXd::LinSpaced(
        1024, sol.omega_signal - 40.0 * sigma, sol.omega_signal + 40.0 * sigma);
    const Eigen::VectorXd wi = Eigen::VectorXd::LinSpaced(
        256, sol.omega_idler - 10.0 * sigma, sol.omega_idler + 10.0 * sigma);
    const JointSpectralAmplitude jsa = pump_only_jsa(pump, FrequencyGrid(ws, wi));
    for (double tau_fs : {0.0, 10.0, 28.0, 56.7, 100.0}) {
        PathImbalance imbalance;
        imbalance.intrinsic_delay_s = fs_to_s(tau_fs);
        const Complex gamma = path_overlap(jsa, imbalance);
        const double tau = fs_to_s(tau_fs);
        const double expected = std::exp(-0.5 * sigma * sigma * tau * tau);
        CHECK(std::abs(gamma) == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("overlap equals the distinguishability factor at zero net delay") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    PathImbalance imbalance;
    imbalance.intrinsic_delay_s = fs_to_s(40.0);
    imbalance.compensation_delay_s = fs_to_s(40.0);
    imbalance.residual_distinguishability = 0.9;
    const Complex gamma = path_overlap(jsa, imbalance);
    CHECK(std::abs(gamma - Complex(0.9, 0.0)) < 1e-12);
}

TEST_CASE("overlap is exactly conjugated under delay reversal") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    for (double tau_fs : {13.0, 28.0, 61.5}) {
        PathImbalance forward, backward;
        forward.intrinsic_delay_s = fs_to_s(tau_fs);
        backward.intrinsic_delay_s = -fs_to_s(tau_fs);
        const Complex g_f = path_overlap(jsa, forward);
        const Complex g_b = path_overlap(jsa, backward);
        CHECK(g_b.real() == g_f.real());
        CHECK(g_b.imag() == -g_f.imag());
    }
}

TEST_CASE("overlap magnitude decays monotonically over the central delay range") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    double previous = 1.1;
    for (double tau_fs = 0.0; tau_fs <= 120.0; tau_fs += 8.0) {
        PathImbalance imbalance;
        imbalance.intrinsic_delay_s = fs_to_s(tau_fs);
        const double mag = std::abs(path_overlap(jsa, imbalance));
        CHECK(mag < previous);
        CHECK(mag <= 1.0 + 1e-12);
        previous = mag;
    }
}

TEST_CASE("overlap magnitude is stable under grid doubling") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    GridOptions fine;
    fine.signal_points = 1024;
    fine.idler_points = 1024;
    const JointSpectralAmplitude coarse_jsa = reference_jsa(pump, fiber);
    const JointSpectralAmplitude fine_jsa = reference_jsa(pump, fiber, fine);
    PathImbalance imbalance;
    imbalance.intrinsic_delay_s = fs_to_s(28.0);
    const double coarse_mag = std::abs(path_overlap(coarse_jsa, imbalance));
    const double fine_mag = std::abs(path_overlap(fine_jsa, imbalance));
    CHECK(std::abs(coarse_mag - fine_mag) < 1e-4);
}

TEST_CASE("emitted state is the dephased family evaluated at the path overlap") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    PathImbalance imbalance;
    imbalance.intrinsic_delay_s = fs_to_s(35.0);
    imbalance.residual_distinguishability = 0.95;
    imbalance.relative_phase = 0.4;
    const Complex gamma = path_overlap(jsa, imbalance);
    const quantum::TwoQubitState state = entangled_state(jsa, imbalance);
    const quantum::TwoQubitState expected =
        quantum::dephased_pair_state(gamma, imbalance.relative_phase);
    CHECK((state.matrix() - expected.matrix()).norm() < 1e-14);
    CHECK(quantum::tangle(state) == doctest::Approx(std::norm(gamma)).epsilon(1e-9));
}

TEST_CASE("delay sweep is symmetric about the intrinsic delay and peaks there") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const JointSpectralAmplitude jsa = reference_jsa(pump, fiber);
    PathImbalance imbalance;
    imbalance.intrinsic_delay_s = fs_to_s(30.0);
    imbalance.residual_distinguishability = 0.92;
    const std::vector<double> delays = {fs_to_s(10.0), fs_to_s(30.0), fs_to_s(50.0)};
    const std::vector<SweepPoint> sweep = tangle_delay_sweep(jsa, imbalance, delays);
    REQUIRE(sweep.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(sweep[i].compensation_delay_s == doctest::Approx(delays[i]).epsilon(1e-15));
    CHECK(sweep[0].tangle == doctest::Approx(sweep[2].tangle).epsilon(1e-10));
    CHECK(sweep[1].tangle > sweep[0].tangle);
    CHECK(sweep[1].tangle == doctest::Approx(0.92 * 0.92).epsilon(1e-9));
}

TEST_CASE("imbalance validation rejects out-of-range parameters") {
    PathImbalance imbalance;
    imbalance.residual_distinguishability = 0.0;
    CHECK_THROWS_AS(imbalance.validate(), std::domain_error);
    imbalance.residual_distinguishability = 1.1;
    CHECK_THROWS_AS(imbalance.validate(), std::domain_error);
    imbalance.residual_distinguishability = 1.0;
    imbalance.intrinsic_delay_s = std::nan("");
    CHECK_THROWS_AS(imbalance.validate(), std::domain_error);
}

TEST_CASE("pump calibration hits the requested overlap and orders with the target") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    const double tau = fs_to_s(28.0);
    const double target = 0.885120863647031;  // 0.7543 / 0.8522

    const PumpPulse calibrated = calibrate_pump_fwhm(pump, fiber, tau, target);
    CHECK(calibrated.spectral_fwhm_nm > 7.0);
    CHECK(calibrated.spectral_fwhm_nm < 10.0);
    CHECK(calibrated.center_wavelength_nm == pump.center_wavelength_nm);

    const JointSpectralAmplitude jsa = reference_jsa(calibrated, fiber);
    PathImbalance ref;
    ref.intrinsic_delay_s = tau;
    CHECK(std::norm(path_overlap(jsa, ref)) == doctest::Approx(target).epsilon(1e-9));

    const PumpPulse narrower = calibrate_pump_fwhm(pump, fiber, tau, 0.95);
    const PumpPulse wider = calibrate_pump_fwhm(pump, fiber, tau, 0.80);
    CHECK(narrower.spectral_fwhm_nm < calibrated.spectral_fwhm_nm);
    CHECK(wider.spectral_fwhm_nm > calibrated.spectral_fwhm_nm);
}

TEST_CASE("pump calibration rejects impossible requests") {
    PumpPulse pump;
    const FiberSpec fiber = reference_fiber();
    CHECK_THROWS_AS((void)calibrate_pump_fwhm(pump, fiber, fs_to_s(28.0), 1.5),
                    std::domain_error);
    CHECK_THROWS_AS((void)calibrate_pump_fwhm(pump, fiber, 0.0, 0.5), std::domain_error);
    // A target this close to one is unreachable for any width in the bracket.
    CHECK_THROWS_AS((void)calibrate_pump_fwhm(pump, fiber, fs_to_s(2000.0), 0.999999),
                    NumericalError);
}
