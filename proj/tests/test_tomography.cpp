#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "pmfpair/errors.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/rng.hpp"
#include "pmfpair/tomography.hpp"

using namespace pmfpair;
using namespace pmfpair::quantum;
using namespace pmfpair::tomo;
using Complex = std::complex<double>;

namespace {

TwoQubitState ginibre_state(rng::SplitMix64& gen) {
    Eigen::Matrix4cd g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = Complex(gen.normal(), gen.normal());
    Eigen::Matrix4cd rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint().eval());
    return TwoQubitState::from_matrix(rho);
}

}  // namespace

TEST_CASE("the measurement set runs over all 36 label pairs signal-major") {
    const std::vector<MeasurementSetting> settings = settings_36();
    REQUIRE(settings.size() == 36);
    CHECK(settings[0].label() == "HH");
    CHECK(settings[1].label() == "HV");
    CHECK(settings[5].label() == "HR");
    CHECK(settings[6].label() == "VH");
    CHECK(settings[35].label() == "RR");
    const MeasurementSetting dl = settings[2 * 6 + 4];
    CHECK(dl.label() == "DL");
    CHECK((dl.projector_ket() - product_ket(ket_d(), ket_l())).norm() < 1e-15);
}

TEST_CASE("predicted coincidences follow the Born rule for the Bell state") {
    const TwoQubitState bell =
        TwoQubitState::from_matrix(bell_phi_plus_ket() * bell_phi_plus_ket().adjoint());
    const double b = 1000.0;
    auto mu = [&](const char* pair) {
        MeasurementSetting s;
        s.signal_label = pair[0];
        s.idler_label = pair[1];
        return predict_coincidences(bell, s, b);
    };
    CHECK(mu("HH") == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(mu("HV") == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(mu("DD") == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(mu("DA") == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(mu("RL") == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(mu("RR") == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    MeasurementSetting s;
    CHECK_THROWS_AS((void)predict_coincidences(bell, s, -1.0), std::domain_error);
}

TEST_CASE("noiseless simulation returns rounded means and tags durations") {
    const TwoQubitState bell =
        TwoQubitState::from_matrix(bell_phi_plus_ket() * bell_phi_plus_ket().adjoint());
    const std::vector<CountRecord> records = simulate_counts(bell, 1000.0, 1, 7.5, true);
    REQUIRE(records.size() == 36);
    CHECK(records[0].coincidences == 500);   // HH
    CHECK(records[1].coincidences == 0);     // HV
    CHECK(records[35].coincidences == 0);    // RR
    for (const auto& rec : records) CHECK(rec.duration_s == 7.5);
}

TEST_CASE("count simulation is seed-deterministic and seed-sensitive") {
    const TwoQubitState bell =
        TwoQubitState::from_matrix(bell_phi_plus_ket() * bell_phi_plus_ket().adjoint());
    const auto a = simulate_counts(bell, 5000.0, 42);
    const auto b = simulate_counts(bell, 5000.0, 42);
    const auto c = simulate_counts(bell, 5000.0, 43);
    REQUIRE(a.size() == b.size());
    bool all_equal = true, any_diff = false;
    for (size_t k = 0; k < a.size(); ++k) {
        all_equal &= (a[k].coincidences == b[k].coincidences);
        any_diff |= (a[k].coincidences != c[k].coincidences);
    }
    CHECK(all_equal);
    CHECK(any_diff);
    CHECK_THROWS_AS((void)simulate_counts(bell, 0.0, 1), std::domain_error);
    CHECK_THROWS_AS((void)simulate_counts(bell, 100.0, 1, -1.0), std::domain_error);
}

TEST_CASE("counts survive a CSV round trip bit for bit") {
    const TwoQubitState state = dephased_pair_state(Complex(0.7, 0.1), 0.2);
    std::vector<CountRecord> records = simulate_counts(state, 12345.0, 9, 15.0);
    records[4].duration_s = 12.25;  // exercise a non-default duration
    const std::string csv = counts_to_csv(records);
    const std::vector<CountRecord> back = counts_from_csv(csv);
    REQUIRE(back.size() == records.size());
    for (size_t k = 0; k < records.size(); ++k) {
        CHECK(back[k].setting.label() == records[k].setting.label());
        CHECK(back[k].coincidences == records[k].coincidences);
        CHECK(back[k].duration_s == records[k].duration_s);
    }
}

TEST_CASE("counts CSV parsing rejects malformed input with line numbers") {
    const std::string header = "signal,idler,coincidences,duration_s\n";
    CHECK_THROWS_AS((void)counts_from_csv(""), ConfigError);
    CHECK_THROWS_AS((void)counts_from_csv("a,b,c\n"), ConfigError);
    CHECK_THROWS_AS((void)counts_from_csv(header), ConfigError);  // no data rows
    auto message_of = [](const std::string& text) {
        try {
            (void)counts_from_csv(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of(header + "H,Q,100,15\n").find("line 2") != std::string::npos);
    CHECK(message_of(header + "H,H,100,15\nH,V,12x,15\n").find("line 3") != std::string::npos);
    CHECK(message_of(header + "H,H,-5,15\n").find("line 2") != std::string::npos);
    CHECK(message_of(header + "H,H,100,15,9\n").find("too many fields") != std::string::npos);
    CHECK(message_of(header + "H,H,100\n").find("expected 4 fields") != std::string::npos);
}

TEST_CASE("linear inversion recovers the state from noiseless counts") {
    const TwoQubitState truth = dephased_pair_state(Complex(0.8, 0.0), 0.3);
    const std::vector<CountRecord> records = simulate_counts(truth, 1e8, 1, 15.0, true);
    const LinearInversionResult lin = linear_inversion(records);
    CHECK((lin.matrix - truth.matrix()).norm() < 1e-6);
    CHECK(lin.brightness == doctest::Approx(1e8).epsilon(1e-6));
    CHECK(std::abs(lin.matrix.trace() - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("linear inversion rejects incomplete measurement sets") {
    const TwoQubitState truth = dephased_pair_state(Complex(0.8, 0.0), 0.0);
    std::vector<CountRecord> records = simulate_counts(truth, 1e6, 1, 15.0, true);
    records.resize(10);
    CHECK_THROWS_AS((void)linear_inversion(records), NumericalError);
}

TEST_CASE("degenerate or invalid count data is rejected up front") {
    std::vector<CountRecord> records;
    for (const auto& s : settings_36()) {
        CountRecord rec;
        rec.setting = s;
        rec.coincidences = 0;
        records.push_back(rec);
    }
    CHECK_THROWS_AS((void)linear_inversion(records), NumericalError);
    records[0].coincidences = -1;
    CHECK_THROWS_AS((void)linear_inversion(records), std::domain_error);
    records[0].coincidences = 10;
    records[1].duration_s = 0.0;
    CHECK_THROWS_AS((void)linear_inversion(records), std::domain_error);
    CHECK_THROWS_AS((void)linear_inversion({}), std::domain_error);
}

TEST_CASE("likelihood fit recovers states from noiseless counts") {
    const TwoQubitState truth =
        dephased_pair_state(0.9 * std::exp(Complex(0.0, 0.2)), 0.5);
    const std::vector<CountRecord> records = simulate_counts(truth, 1e8, 1, 15.0, true);
    const TomographyResult result = mle_reconstruct(records);
    CHECK(result.converged);
    CHECK(result.iterations > 0);
    CHECK((result.state.matrix() - truth.matrix()).norm() < 2e-4);
    CHECK(result.brightness == doctest::Approx(1e8).epsilon(1e-4));
    CHECK(std::isfinite(result.neg_log_likelihood));
}

TEST_CASE("likelihood fit recovers random mixed states from noiseless counts") {
    rng::SplitMix64 gen(rng::derive_stream(2026, 5));
    for (int trial = 0; trial < 3; ++trial) {
        const TwoQubitState truth = ginibre_state(gen);
        const std::vector<CountRecord> records = simulate_counts(truth, 1e8, 1, 15.0, true);
        const TomographyResult result = mle_reconstruct(records);
        CHECK(result.converged);
        CHECK((result.state.matrix() - truth.matrix()).norm() < 5e-4);
    }
}

TEST_CASE("likelihood fit on Poisson data is accurate and bit reproducible") {
    const TwoQubitState bell =
        TwoQubitState::from_matrix(bell_phi_plus_ket() * bell_phi_plus_ket().adjoint());
    const std::vector<CountRecord> records = simulate_counts(bell, 1e5, 7);
    const TomographyResult a = mle_reconstruct(records);
    const TomographyResult b = mle_reconstruct(records);
    CHECK(a.converged);
    CHECK(fidelity_to_ket(a.state, bell_phi_plus_ket()) > 0.99);
    CHECK((a.state.matrix() - b.state.matrix()).norm() == 0.0);
    CHECK(a.neg_log_likelihood == b.neg_log_likelihood);
}

TEST_CASE("likelihood fit is consistent under duration rescaling of a record") {
    const TwoQubitState truth = dephased_pair_state(Complex(0.85, 0.0), 0.1);
    std::vector<CountRecord> records = simulate_counts(truth, 1e6, 1, 10.0, true);
    const TomographyResult base = mle_reconstruct(records);
    // Doubling both the acquisition time and the collected counts of one
    // setting describes the same state and rate.
    records[5].duration_s *= 2.0;
    records[5].coincidences *= 2;
    const TomographyResult scaled = mle_reconstruct(records);
    CHECK((base.state.matrix() - scaled.state.matrix()).norm() < 1e-3);
}

TEST_CASE("likelihood fit rejects invalid optimizer options") {
    const TwoQubitState truth = dephased_pair_state(Complex(0.8, 0.0), 0.0);
    const std::vector<CountRecord> records = simulate_counts(truth, 1e4, 1, 15.0, true);
    MleOptions options;
    options.max_iterations = 0;
    CHECK_THROWS_AS((void)mle_reconstruct(records, options), std::domain_error);
    options.max_iterations = 100;
    options.restarts = -1;
    CHECK_THROWS_AS((void)mle_reconstruct(records, options), std::domain_error);
}

TEST_CASE("bootstrap reports the three metrics with reproducible spreads") {
    const TwoQubitState truth = dephased_pair_state(Complex(0.9, 0.0), 0.0);
    const std::vector<CountRecord> records = simulate_counts(truth, 2000.0, 11);
    const std::vector<ErrorEstimate> errors = bootstrap_errors(records, 20, 11);
    REQUIRE(errors.size() == 3);
    CHECK(errors[0].metric == "tangle");
    CHECK(errors[1].metric == "linear_entropy");
    CHECK(errors[2].metric == "fidelity_phi_plus");
    for (const auto& err : errors) {
        CHECK(err.samples + err.skipped == 20);
        CHECK(err.samples >= 2);
        CHECK(err.stddev >= 0.0);
        CHECK(std::isfinite(err.mean));
    }
    CHECK(errors[0].stddev > 0.0);
    CHECK(errors[0].mean == doctest::Approx(0.81).epsilon(0.15));

    const std::vector<ErrorEstimate> again = bootstrap_errors(records, 20, 11);
    CHECK(errors[0].mean == again[0].mean);
    CHECK(errors[0].stddev == again[0].stddev);
    const std::vector<ErrorEstimate> other = bootstrap_errors(records, 20, 12);
    CHECK(errors[0].stddev != other[0].stddev);

    CHECK_THROWS_AS((void)bootstrap_errors(records, 1, 11), std::domain_error);
}
