#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pmfpair/rng.hpp"

using namespace pmfpair;

TEST_CASE("generator streams are reproducible from the seed") {
    rng::SplitMix64 a(42);
    rng::SplitMix64 b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    rng::SplitMix64 c(43);
    bool diverged = false;
    rng::SplitMix64 a2(42);
    for (int i = 0; i < 100; ++i) diverged |= (a2.next_u64() != c.next_u64());
    CHECK(diverged);
}

TEST_CASE("derived streams separate by tag and indices") {
    const std::uint64_t base = 7;
    CHECK(rng::derive_stream(base, 1) != rng::derive_stream(base, 2));
    CHECK(rng::derive_stream(base, 1, 0) != rng::derive_stream(base, 1, 1));
    CHECK(rng::derive_stream(base, 1, 2, 3) != rng::derive_stream(base, 1, 3, 2));
    CHECK(rng::derive_stream(base, 1, 2, 3, 4) == rng::derive_stream(base, 1, 2, 3, 4));
}

TEST_CASE("uniform samples stay in the half open unit interval") {
    rng::SplitMix64 gen(11);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = gen.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("normal samples have the right first two moments") {
    rng::SplitMix64 gen(12);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = gen.normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson sampling matches the target moments in both regimes") {
    for (double mean : {0.5, 4.0, 25.0, 4000.0}) {
        rng::SplitMix64 gen(rng::derive_stream(99, 1, static_cast<std::uint64_t>(mean * 10)));
        const int n = 100000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng::poisson(mean, gen));
            sum += k;
            sumsq += k * k;
        }
        const double est_mean = sum / n;
        const double est_var = sumsq / n - est_mean * est_mean;
        CHECK(est_mean == doctest::Approx(mean).epsilon(0.02));
        CHECK(est_var == doctest::Approx(mean).epsilon(0.05));
    }
}

TEST_CASE("poisson handles edge means") {
    rng::SplitMix64 gen(5);
    CHECK(rng::poisson(0.0, gen) == 0);
    CHECK_THROWS_AS((void)rng::poisson(-1.0, gen), std::domain_error);
    CHECK_THROWS_AS((void)rng::poisson(std::nan(""), gen), std::domain_error);
}

TEST_CASE("poisson draws are reproducible per stream") {
    rng::SplitMix64 a(rng::derive_stream(31, 1, 4));
    rng::SplitMix64 b(rng::derive_stream(31, 1, 4));
    for (int i = 0; i < 50; ++i) CHECK(rng::poisson(123.4, a) == rng::poisson(123.4, b));
}
