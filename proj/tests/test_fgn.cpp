#include <cmath>
#include <vector>

#include <doctest.h>

#include "hermest/fgn.hpp"

using hermest::fgn_autocovariance;
using hermest::FgnGenerator;
using hermest::RandomStream;

TEST_CASE("fGn autocovariance closed form") {
    // r(k) = 1/2 (|k+1|^(2H0) - 2|k|^(2H0) + |k-1|^(2H0))
    CHECK(fgn_autocovariance(0.8, 0) == 1.0);
    CHECK(std::abs(fgn_autocovariance(0.8, 1) - 0.51571656651039818) < 1e-15);
    CHECK(std::abs(fgn_autocovariance(0.8, 1) -
                   (std::pow(2.0, 1.6) / 2.0 - 1.0)) < 1e-15);
    // White noise at H0 = 1/2.
    CHECK(std::abs(fgn_autocovariance(0.5, 1)) < 1e-15);
    CHECK(std::abs(fgn_autocovariance(0.5, 5)) < 1e-15);
    // Long-range dependence: positive, slowly decaying lags for H0 > 1/2.
    double prev = fgn_autocovariance(0.9, 1);
    for (int k = 2; k <= 30; ++k) {
        const double cur = fgn_autocovariance(0.9, k);
        CHECK(cur > 0.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("partial sums of the autocovariance reproduce the self-similar variance") {
    // Var(X_1 + ... + X_m) = m^(2 H0) for fGn increments.
    for (double H0 : {0.6, 0.75, 0.9}) {
        for (std::size_t m : {1u, 2u, 7u, 32u, 64u}) {
            double var = 0;
            for (long long k = -(long long)m + 1; k < (long long)m; ++k)
                var += (double(m) - std::abs(double(k))) * fgn_autocovariance(H0, double(k));
            CHECK(std::abs(var - std::pow(double(m), 2 * H0)) < 1e-9 * var);
        }
    }
}

TEST_CASE("circulant embedding is well posed across the H0 range") {
    for (double H0 : {0.51, 0.6, 0.75, 0.9, 0.97}) {
        FgnGenerator gen(H0, 256);
        CHECK(gen.length() == 256);
        CHECK(gen.embedding_size() >= 512);
        CHECK((gen.embedding_size() & (gen.embedding_size() - 1)) == 0);
        CHECK(gen.min_eigenvalue() > -1e-9);
        CHECK_FALSE(gen.clip_warning());
    }
}

TEST_CASE("sampling is deterministic in the stream key") {
    FgnGenerator gen(0.7, 128);
    std::vector<double> a, b, c;
    RandomStream ra(2024, 5, 0), rb(2024, 5, 0), rc(2024, 6, 0);
    gen.sample(ra, a);
    gen.sample(rb, b);
    gen.sample(rc, c);
    REQUIRE(a.size() == 128);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("sampled autocovariance matches the target law") {
    const double H0 = 0.8;
    const std::size_t n = 64;
    FgnGenerator gen(H0, n);
    const int reps = 6000;
    std::vector<double> x;
    double r0 = 0, r1 = 0, r4 = 0, mean = 0;
    for (int rep = 0; rep < reps; ++rep) {
        RandomStream rs(555, std::uint32_t(rep), 0);
        gen.sample(rs, x);
        for (std::size_t i = 0; i < n; ++i) {
            mean += x[i];
            r0 += x[i] * x[i];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) r1 += x[i] * x[i + 1];
        for (std::size_t i = 0; i + 4 < n; ++i) r4 += x[i] * x[i + 4];
    }
    mean /= double(reps) * n;
    r0 /= double(reps) * n;
    r1 /= double(reps) * (n - 1);
    r4 /= double(reps) * (n - 4);
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(r0 - 1.0) < 0.02);
    CHECK(std::abs(r1 - fgn_autocovariance(H0, 1)) < 0.02);
    CHECK(std::abs(r4 - fgn_autocovariance(H0, 4)) < 0.02);
}

TEST_CASE("one-shot helper matches a generator draw on the same stream key") {
    std::vector<double> direct = hermest::generate_fgn(0.7, 96, 4242);
    REQUIRE(direct.size() == 96);
    FgnGenerator gen(0.7, 96);
    RandomStream rs(4242, 0, 0);
    std::vector<double> expected;
    gen.sample(rs, expected);
    CHECK(direct == expected);
}

TEST_CASE("generator rejects invalid arguments") {
    CHECK_THROWS(FgnGenerator(0.0, 16));
    CHECK_THROWS(FgnGenerator(1.0, 16));
    CHECK_THROWS(FgnGenerator(0.7, 0));
}
