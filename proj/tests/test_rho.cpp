#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "ap3/rho.hpp"
#include "test_util.hpp"

using namespace ap3;

namespace {

// Brute-force minimum over all size-k subsets, plain combination walk.
std::uint64_t brute_min_count(std::size_t n, std::size_t k) {
    std::vector<std::uint32_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = static_cast<std::uint32_t>(i);
    std::uint64_t best = UINT64_MAX;
    while (true) {
        best = std::min(best, oracle::count_3aps(ResidueSet(n, comb)));
        // next combination
        std::size_t i = k;
        while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("full density forces the full set") {
    const auto res = rho_exact_sets(8, Rational(1));
    REQUIRE(res.exact_value == Rational(1));
    REQUIRE(res.set_witness->size() == 8);
}

TEST_CASE("rho2(2/3, 9) = 2/9 with a multiples-of-3 complement witness") {
    const auto res = rho_exact_sets(9, Rational(2, 3));
    REQUIRE(res.exact_value == Rational(2, 9));
    REQUIRE(res.set_witness->size() == 6);  // ceil(2/3 * 9)
    REQUIRE(lambda3_exact(*res.set_witness) == res.exact_value);
    REQUIRE(affine_equivalent(*res.set_witness, ResidueSet(9, {0, 3, 6}).complement()));
    REQUIRE(res.stats.nodes_visited == 84);
}

TEST_CASE("rho2(2/3, 7) = 17/49 by exhaustive enumeration") {
    const auto res = rho_exact_sets(7, Rational(2, 3));
    REQUIRE(res.exact_value ==
            Rational(static_cast<std::int64_t>(brute_min_count(7, 5)), 49));
    REQUIRE(res.exact_value == Rational(17, 49));
}

TEST_CASE("canonical pruning never changes the minimum") {
    for (std::size_t n : {7u, 9u, 11u}) {
        const auto plain = rho_exact_sets(n, Rational(2, 3));
        const auto pruned = rho_exact_sets(n, Rational(2, 3), 100000000ull, true);
        REQUIRE(plain.exact_value == pruned.exact_value);
    }
}

TEST_CASE("subset budget is enforced") {
    REQUIRE_THROWS_AS(rho_exact_sets(40, Rational(1, 2), 1000), std::invalid_argument);
}

TEST_CASE("gradient of a constant is 3c^2/N") {
    const auto g = lambda3_gradient(GridFunction::constant(10, 0.5));
    for (std::size_t m = 0; m < 10; ++m)
        REQUIRE(g[m] == Catch::Approx(3.0 * 0.25 / 10.0).margin(1e-12));
}

TEST_CASE("gradient of a point mass counts incident progressions") {
    const auto g = lambda3_gradient(ResidueSet(5, {0}).indicator());
    REQUIRE(g[0] == Catch::Approx(3.0 / 25.0).margin(1e-12));
    for (std::size_t m = 1; m < 5; ++m) REQUIRE(g[m] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
    const double step = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        Rng rng(64, trial);
        const auto f = oracle::random_grid(rng, 64, 0.05, 0.95);
        const auto grad = lambda3_gradient(f);
        for (std::size_t m = 0; m < 64; m += 7) {
            std::vector<double> up = f.values(), dn = f.values();
            up[m] += step;
            dn[m] -= step;
            const double fd = (oracle::lambda3_slow(GridFunction::from_values(up)) -
                               oracle::lambda3_slow(GridFunction::from_values(dn))) /
                              (2.0 * step);
            REQUIRE(std::fabs(grad[m] - fd) < 1e-6);
        }
    }
}

TEST_CASE("descent at full density returns the all-ones function") {
    const auto res = rho_descent(9, Rational(1), 2, 42);
    REQUIRE(res.value == Catch::Approx(1.0).margin(1e-9));
    for (double v : res.function_witness->values())
        REQUIRE(v == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("descent seeded from the exact witness never loses to it") {
    const auto exact = rho_exact_sets(9, Rational(2, 3));
    DescentOptions opt;
    opt.extra_starts.push_back(exact.set_witness->indicator());
    const auto res = rho_descent(9, Rational(2, 3), 2, 7, opt);
    REQUIRE(res.value <= exact.value + 1e-9);
    REQUIRE(expectation(*res.function_witness) >= 2.0 / 3.0 - 1e-12);
    REQUIRE(lambda3_spectral(*res.function_witness) == Catch::Approx(res.value).margin(1e-9));
}

TEST_CASE("descent value never exceeds the projected start") {
    Rng rng(12, 0);
    const auto start = oracle::random_grid(rng, 21, 0.0, 1.0);
    DescentOptions opt;
    opt.extra_starts.push_back(start);
    opt.auto_witness_budget = 0;
    const auto res = rho_descent(21, Rational(2, 3), 0, 3, opt);
    // Project the start the same way the solver does, then compare.
    std::vector<double> proj = start.values();
    ap3::detail::project_feasible(proj, 2.0 / 3.0);
    REQUIRE(res.value <=
            lambda3_spectral(GridFunction(proj, Interval{0.0, 1.0})) + 1e-12);
}

TEST_CASE("rounding is deterministic and respects indicators") {
    const auto full = round_to_set(GridFunction::constant(20, 1.0), Rational(1), 5);
    REQUIRE(full.size() == 20);

    const ResidueSet a(20, {1, 5, 7, 12, 13, 16, 18});
    const auto back = round_to_set(a.indicator(), Rational(7, 20), 5);
    REQUIRE(back == a);

    const auto again = round_to_set(GridFunction::constant(501, 2.0 / 3.0), Rational(2, 3), 9);
    const auto again2 = round_to_set(GridFunction::constant(501, 2.0 / 3.0), Rational(2, 3), 9);
    REQUIRE(again == again2);
    REQUIRE(again.size() >= (501 * 2 + 2) / 3);
}

TEST_CASE("rounding concentrates at moderate scale") {
    const auto f = GridFunction::constant(2003, 2.0 / 3.0);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = round_to_set(f, Rational(2, 3), seed);
        if (std::fabs(s.density() - 2.0 / 3.0) < 0.03) ++ok;
    }
    REQUIRE(ok >= 18);
}

TEST_CASE("affine symmetry of the exact count") {
    for (int trial = 0; trial < 20; ++trial) {
        Rng rng(31, trial);
        const std::size_t n = rng.uniform_int(5, 40);
        const auto s = oracle::random_set(rng, n, rng.uniform_int(1, n));
        std::uint64_t a = rng.uniform_int(1, n - 1);
        while (std::gcd(a, static_cast<std::uint64_t>(n)) != 1) a = rng.uniform_int(1, n - 1);
        const std::uint64_t b = rng.uniform_int(0, n - 1);
        std::vector<std::uint32_t> mapped;
        for (auto x : s.members())
            mapped.push_back(static_cast<std::uint32_t>((a * x + b) % n));
        REQUIRE(lambda3_count(ResidueSet(n, mapped)) == lambda3_count(s));
    }
}
