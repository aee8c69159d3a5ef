#include <catch2/catch_amalgamated.hpp>

#include "ap3/zn_core.hpp"
#include "test_util.hpp"

using namespace ap3;

TEST_CASE("dft of the constant function concentrates at zero") {
    const auto spec = dft(GridFunction::constant(5, 1.0));
    REQUIRE(std::abs(spec.coeff[0] - std::complex<double>(5.0, 0.0)) < 1e-12);
    for (std::size_t a = 1; a < 5; ++a) REQUIRE(std::abs(spec.coeff[a]) < 1e-12);
}

TEST_CASE("dft of a point mass is flat") {
    ResidueSet s(12, {0});
    const auto spec = dft(s);
    for (std::size_t a = 0; a < 12; ++a)
        REQUIRE(std::abs(spec.coeff[a] - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("dft of {0,2} on Z_4 is (2,0,2,0)") {
    const auto spec = dft(ResidueSet(4, {0, 2}));
    const double expected[4] = {2.0, 0.0, 2.0, 0.0};
    for (std::size_t a = 0; a < 4; ++a)
        REQUIRE(std::abs(spec.coeff[a] - std::complex<double>(expected[a], 0.0)) < 1e-12);
}

TEST_CASE("dft matches the direct sum within 1e-9 per unit of N") {
    for (std::size_t n : {5u, 12u, 101u, 128u, 257u}) {
        Rng rng(2024, n);
        const auto f = oracle::random_grid(rng, n, 0.0, 1.0);
        const auto fast = dft(f);
        const auto slow = oracle::naive_dft(f.values(), +1);
        for (std::size_t a = 0; a < n; ++a)
            REQUIRE(std::abs(fast.coeff[a] - slow[a]) < 1e-9 * static_cast<double>(n));
    }
}

TEST_CASE("spectrum invariants: conjugate symmetry and zero coefficient") {
    Rng rng(7, 0);
    const auto f = oracle::random_grid(rng, 101, 0.0, 1.0);
    const auto spec = dft(f);
    long double sum = 0.0L;
    for (double v : f.values()) sum += v;
    REQUIRE(std::fabs(spec.coeff[0].real() - static_cast<double>(sum)) < 1e-9 * 101);
    REQUIRE(std::fabs(spec.coeff[0].imag()) < 1e-9 * 101);
    for (std::size_t a = 1; a < 101; ++a)
        REQUIRE(std::abs(spec.coeff[101 - a] - std::conj(spec.coeff[a])) < 1e-9);
}

TEST_CASE("idft inverts dft") {
    SECTION("delta spectrum gives the constant") {
        Spectrum spec{5, {{5, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}}};
        const auto f = idft(spec);
        for (std::size_t i = 0; i < 5; ++i) REQUIRE(std::fabs(f[i] - 1.0) < 1e-12);
    }
    SECTION("all-ones spectrum over Z_7 gives the point mass") {
        Spectrum spec{7, std::vector<std::complex<double>>(7, {1.0, 0.0})};
        const auto f = idft(spec);
        REQUIRE(std::fabs(f[0] - 1.0) < 1e-12);
        for (std::size_t i = 1; i < 7; ++i) REQUIRE(std::fabs(f[i]) < 1e-12);
    }
    SECTION("roundtrip on 100 random functions over Z_128") {
        for (int trial = 0; trial < 100; ++trial) {
            Rng rng(99, trial);
            const auto f = oracle::random_grid(rng, 128, 0.0, 1.0);
            const auto back = idft(dft(f));
            for (std::size_t i = 0; i < 128; ++i)
                REQUIRE(std::fabs(back[i] - f[i]) < 1e-9);
        }
    }
}

TEST_CASE("lambda3_direct on the worked examples") {
    REQUIRE(lambda3_direct(GridFunction::constant(17, 1.0)) == Catch::Approx(1.0));
    REQUIRE(lambda3_direct(ResidueSet(5, {0}).indicator()) == Catch::Approx(1.0 / 25.0));
    REQUIRE(lambda3_direct(ResidueSet(9, {0, 3, 6}).indicator()) ==
            Catch::Approx(1.0 / 9.0));
}

TEST_CASE("lambda3_spectral agrees with the direct sum") {
    REQUIRE(lambda3_spectral(GridFunction::constant(10, 1.0)) == Catch::Approx(1.0));
    REQUIRE(lambda3_spectral(ResidueSet(9, {0, 3, 6}).indicator()) ==
            Catch::Approx(1.0 / 9.0));
    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng(5150, trial);
        const auto f = oracle::random_grid(rng, 101, 0.0, 1.0);
        REQUIRE(std::fabs(lambda3_direct(f) - lambda3_spectral(f)) < 1e-9);
    }
}

TEST_CASE("spectral/direct equivalence across moduli") {
    for (std::size_t n = 3; n <= 512; n = n * 2 + 1) {
        Rng rng(31337, n);
        const auto f = oracle::random_grid(rng, n, 0.0, 1.0);
        REQUIRE(std::fabs(lambda3_direct(f) - lambda3_spectral(f)) < 1e-9);
    }
}

TEST_CASE("lambda3_exact on the worked examples") {
    REQUIRE(lambda3_exact(ResidueSet::full(11)) == Rational(1));
    REQUIRE(lambda3_exact(ResidueSet(9, {0, 3, 6})) == Rational(1, 9));
    REQUIRE(lambda3_exact(ResidueSet(9, {0, 3, 6}).complement()) == Rational(2, 9));
}

TEST_CASE("exact count matches the slow enumeration oracle") {
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(88, trial);
        const std::size_t n = rng.uniform_int(3, 60);
        const auto s = oracle::random_set(rng, n, rng.uniform_int(0, n));
        REQUIRE(lambda3_count(s) == oracle::count_3aps(s));
        REQUIRE(std::fabs(lambda3_exact(s).to_double() - lambda3_direct(s.indicator())) <
                1e-12);
    }
}

TEST_CASE("dilation leaves the exact count unchanged") {
    for (int trial = 0; trial < 30; ++trial) {
        Rng rng(17, trial);
        const std::size_t n = rng.uniform_int(3, 60);
        const auto s = oracle::random_set(rng, n, rng.uniform_int(1, n));
        std::uint64_t k = rng.uniform_int(1, n - 1);
        while (std::gcd(k, static_cast<std::uint64_t>(n)) != 1) k = rng.uniform_int(1, n - 1);
        REQUIRE(lambda3_count(s.dilate(k)) == lambda3_count(s));
    }
}

TEST_CASE("expectation and norms") {
    const auto c = GridFunction::constant(8, 0.4);
    REQUIRE(expectation(c) == Catch::Approx(0.4));
    REQUIRE(norm(c, 1.0) == Catch::Approx(0.4));
    REQUIRE(norm(c, 2.0) == Catch::Approx(0.4));

    const auto ind = ResidueSet(10, {1, 4, 9}).indicator();
    REQUIRE(expectation(ind) == Catch::Approx(0.3));
    REQUIRE(norm(ind, 2.0) * norm(ind, 2.0) == Catch::Approx(0.3));

    Rng rng(3, 0);
    const auto f = oracle::random_grid(rng, 64, 0.0, 1.0);
    long double ss = 0.0L;
    for (double v : f.values()) ss += v * v;
    REQUIRE(std::fabs(norm(f, 2.0) - std::sqrt(static_cast<double>(ss) / 64.0)) < 1e-12);

    REQUIRE_THROWS_AS(norm(c, 0.5), std::invalid_argument);
}

TEST_CASE("parseval identity") {
    for (int trial = 0; trial < 50; ++trial) {
        Rng rng(41, trial);
        const std::size_t n = rng.uniform_int(3, 512);
        const auto f = oracle::random_grid(rng, n, 0.0, 1.0);
        const auto spec = dft(f);
        long double lhs = 0.0L, rhs = 0.0L;
        for (const auto& cf : spec.coeff) lhs += std::norm(cf);
        for (double v : f.values()) rhs += v * v;
        rhs *= static_cast<long double>(n);
        REQUIRE(std::fabs(static_cast<double>(lhs - rhs)) <=
                1e-9 * static_cast<double>(rhs));
    }
}

TEST_CASE("grid function construction validates the declared range") {
    REQUIRE_THROWS_AS(GridFunction({0.5, 1.5}, Interval{0.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(GridFunction({0.5}, Interval{0.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(ResidueSet(5, {1, 1}), std::invalid_argument);
    REQUIRE_THROWS_AS(ResidueSet(5, {7}), std::invalid_argument);
}
