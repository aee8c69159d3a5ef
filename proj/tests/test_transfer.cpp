#include <catch2/catch_amalgamated.hpp>

#include "ap3/transfer.hpp"
#include "test_util.hpp"

using namespace ap3;

namespace {

GridFunction interval_density(std::size_t p, std::size_t len) {
    return oracle::interval_set(p, len).indicator();
}

}  // namespace

TEST_CASE("support extraction of a constant is the zero frequency") {
    const auto sup = extract_support(GridFunction::constant(101, 0.5), 0.3);
    REQUIRE(sup.set_b.members() == std::vector<std::uint32_t>{0});
    REQUIRE(sup.set_bprime.members() == std::vector<std::uint32_t>{0});
}

TEST_CASE("support extraction of a clipped cosine finds {0, 1, p-1}") {
    const std::size_t p = 101;
    std::vector<double> v(p);
    for (std::size_t n = 0; n < p; ++n)
        v[n] = 0.3 * (1.0 + std::cos(fft::detail::kTwoPi * static_cast<double>(n) /
                                     static_cast<double>(p)));
    const GridFunction f(std::move(v), Interval{0.0, 0.6});
    const auto sup = extract_support(f, 0.3);
    REQUIRE(sup.set_b.members() == std::vector<std::uint32_t>{0, 1, 100});
}

TEST_CASE("support thresholds match a direct scan") {
    Rng rng(404, 0);
    const auto f = oracle::random_grid(rng, 101, 0.0, 1.0);
    const double eps = 0.3;
    const auto sup = extract_support(f, eps);
    const auto spec = oracle::naive_dft(f.values(), +1);
    const double thr = eps * spec[0].real();
    for (std::size_t a = 0; a < 101; ++a) {
        if (std::abs(spec[a]) > thr + 1e-7) REQUIRE(sup.set_b.contains(a));
        if (std::abs(spec[a]) < thr - 1e-7) REQUIRE(!sup.set_b.contains(a));
    }
    // B inside B', 0 present, cardinality bound.
    for (auto b : sup.set_b.members()) REQUIRE(sup.set_bprime.contains(b));
    REQUIRE(sup.set_bprime.contains(0));
    REQUIRE(static_cast<double>(sup.set_bprime.size()) <= sup.m_bound);
}

TEST_CASE("support extraction rejects a zero function") {
    REQUIRE_THROWS_AS(extract_support(GridFunction::constant(11, 0.0), 0.3),
                      std::invalid_argument);
}

TEST_CASE("dilation search basics") {
    SECTION("singleton zero set") {
        const auto d = find_dilation(11, ResidueSet(11, {0}));
        REQUIRE(d.dilation == 1);
        REQUIRE(d.frequencies == std::vector<std::int64_t>{0});
    }
    SECTION("already-small frequencies keep s = 1") {
        const auto d = find_dilation(11, ResidueSet(11, {0, 1, 10}));
        REQUIRE(d.dilation == 1);
        REQUIRE(d.frequencies == std::vector<std::int64_t>{0, 1, -1});
    }
    SECTION("p=101, B'={0,37,64}: first valid dilation, revalidated directly") {
        const auto d = find_dilation(101, ResidueSet(101, {0, 37, 64}));
        REQUIRE(d.dilation == 4);
        REQUIRE(d.frequencies == std::vector<std::int64_t>{0, -16, 16});
        // Oracle: exhaustive first-success search with plain modular arithmetic.
        const double bound = std::pow(101.0, 1.0 - 1.0 / 3.0);
        std::uint32_t expected_s = 0;
        for (std::uint32_t s = 1; s < 101 && expected_s == 0; ++s) {
            const std::uint64_t sinv = mod_inverse(s, 101);
            bool ok = true;
            for (std::uint32_t b : {0u, 37u, 64u})
                ok = ok && std::fabs(static_cast<double>(
                               signed_residue(static_cast<std::int64_t>(sinv * b), 101))) <
                               bound;
            if (ok) expected_s = s;
        }
        REQUIRE(d.dilation == expected_s);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::uint32_t b = ResidueSet(101, {0, 37, 64}).members()[i];
            REQUIRE(mod_reduce(static_cast<std::int64_t>(d.dilation) * d.frequencies[i], 101) ==
                    b);
        }
    }
}

TEST_CASE("smoothing with a point mass is the identity") {
    Rng rng(77, 0);
    const auto f = oracle::random_grid(rng, 11, 0.0, 1.0);
    const auto w = build_weight(11, {1}, 0.3, true);  // degenerate => delta weight
    const auto h = smooth_and_dilate(f, w, 1);
    for (std::size_t n = 0; n < 11; ++n) REQUIRE(h[n] == Catch::Approx(f[n]).margin(1e-9));
}

TEST_CASE("smoothing with the uniform weight flattens to the mean") {
    Rng rng(78, 0);
    const auto f = oracle::random_grid(rng, 101, 0.0, 1.0);
    const auto w = build_weight(101, {}, 0.5);
    const auto h = smooth_and_dilate(f, w, 1);
    const double mean = expectation(f);
    for (std::size_t n = 0; n < 101; ++n) REQUIRE(h[n] == Catch::Approx(mean).margin(1e-9));
}

TEST_CASE("smoothing satisfies the dilated spectral identity") {
    Rng rng(79, 0);
    const auto f = oracle::random_grid(rng, 101, 0.0, 1.0);
    const auto sup = extract_support(f, 0.3);
    std::vector<std::uint32_t> targets;
    for (auto b : sup.set_b.members())
        if (b != 0) targets.push_back(b);
    const auto w = build_weight(101, targets, 0.3);
    const auto d = find_dilation(101, sup.set_bprime);
    const auto h = smooth_and_dilate(f, w, d.dilation);  // full scan asserted inside

    // Spot re-check against the quadratic-time oracle transform.
    const auto fh = oracle::naive_dft(f.values(), +1);
    const auto mh = oracle::naive_dft(w.weight.values(), +1);
    const auto hh = oracle::naive_dft(h.values(), +1);
    for (std::size_t a : {std::size_t{0}, std::size_t{1}, std::size_t{50}}) {
        const std::size_t sa = (a * d.dilation) % 101;
        REQUIRE(std::abs(hh[a] - mh[sa] * fh[sa]) < 1e-6);
    }
    REQUIRE(expectation(h) == Catch::Approx(expectation(f)).margin(1e-12));
}

TEST_CASE("sparse truncation reproduces a function it fully supports") {
    // h built from frequencies {0, +-2} only.
    const std::size_t p = 13;
    std::vector<double> v(p);
    for (std::size_t n = 0; n < p; ++n)
        v[n] = 0.5 + 0.25 * std::cos(fft::detail::kTwoPi * 2.0 * static_cast<double>(n) /
                                     static_cast<double>(p));
    const GridFunction h(std::move(v), Interval{0.0, 1.0});
    DilationResult dil;
    dil.dilation = 1;
    dil.frequencies = {0, 2, -2};
    const auto g = truncate_to_sparse(h, dil);
    for (std::size_t n = 0; n < p; ++n)
        REQUIRE(g.evaluate(static_cast<double>(n)) == Catch::Approx(h[n]).margin(1e-9));
    REQUIRE(g.mean() == Catch::Approx(expectation(h)).margin(1e-12));
}

TEST_CASE("constant functions stay constant at every real argument") {
    const auto f = GridFunction::constant(11, 0.6);
    DilationResult dil;
    dil.dilation = 1;
    dil.frequencies = {0};
    const auto g = truncate_to_sparse(f, dil);
    for (double alpha : {0.0, 0.5, 1.75, 10.2, 7.0}) {
        REQUIRE(g.evaluate(alpha) == Catch::Approx(0.6).margin(1e-12));
    }
    REQUIRE(g.lambda3(0) == Catch::Approx(0.6 * 0.6 * 0.6).margin(1e-12));
}

TEST_CASE("lift of a constant is exact") {
    SparseTrigPoly g;
    g.modulus_p = 11;
    g.terms = {{0, {11.0 * 0.4, 0.0}}};
    const auto lift = lift_to_target(g, 1361, 0.3);
    REQUIRE(lift.values.modulus() == 1361);
    for (std::size_t i = 0; i < 1361; ++i)
        REQUIRE(lift.values[i] == Catch::Approx(0.4).margin(1e-12));
    REQUIRE(lambda3_spectral(lift.values) == Catch::Approx(0.4 * 0.4 * 0.4).margin(1e-9));
}

TEST_CASE("lift preserves the sparse lambda3 for a single frequency pair") {
    SparseTrigPoly g;
    g.modulus_p = 11;
    g.terms = {{0, {11.0 * 0.5, 0.0}}, {1, {1.2, 0.4}}, {-1, {1.2, -0.4}}};
    const auto lift = lift_to_target(g, 1361, 0.3);
    REQUIRE(lambda3_spectral(lift.values) == Catch::Approx(g.lambda3(0)).margin(1e-9));
    REQUIRE(expectation(lift.values) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("lift enforces moduli preconditions") {
    SparseTrigPoly g;
    g.modulus_p = 11;
    g.terms = {{0, {5.0, 0.0}}};
    REQUIRE_THROWS_AS(lift_to_target(g, 101, 0.3), std::invalid_argument);  // r <= p^3
    REQUIRE_NOTHROW(lift_to_target(g, 101, 0.3, /*allow_small_r=*/true));
    REQUIRE_THROWS_AS(lift_to_target(g, 1362, 0.3), std::invalid_argument);  // composite

    SparseTrigPoly wide;
    wide.modulus_p = 11;
    wide.terms = {{0, {5.0, 0.0}}, {40, {1.0, 0.0}}, {-40, {1.0, 0.0}}};
    // 2*40 >= 101/2: wraparound over the target modulus.
    REQUIRE_THROWS_AS(lift_to_target(wide, 101, 0.3, true), std::runtime_error);
}

TEST_CASE("clip and rebalance") {
    SECTION("already feasible input is unchanged") {
        Rng rng(5, 0);
        const auto f = oracle::random_grid(rng, 97, 0.0, 1.0);
        const auto out = clip_and_rebalance(f, expectation(f));
        for (std::size_t n = 0; n < 97; ++n) REQUIRE(out[n] == f[n]);
    }
    SECTION("overshoot clips to one") {
        const GridFunction f(std::vector<double>(50, 1.02), Interval{-0.2, 1.2});
        const auto out = clip_and_rebalance(f, 1.0);
        for (std::size_t n = 0; n < 50; ++n) REQUIRE(out[n] == 1.0);
    }
    SECTION("rebalancing reassigns clipped ones in index order") {
        // Clipped mean 0.6 must come down to 0.5: the first entries drop.
        std::vector<double> v(10, 0.0);
        for (int i = 0; i < 6; ++i) v[i] = 1.2;
        const GridFunction f(std::move(v), Interval{-0.2, 1.3});
        const auto out = clip_and_rebalance(f, 0.5);
        REQUIRE(expectation(out) == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(out[0] == 0.0);  // first 1-entry reassigned
        REQUIRE(out[5] == 1.0);  // later ones untouched
    }
    SECTION("impossible rebalance throws") {
        const GridFunction f(std::vector<double>(10, 0.5), Interval{0.0, 1.0});
        REQUIRE_THROWS_AS(clip_and_rebalance(f, 0.9), std::runtime_error);
        REQUIRE_THROWS_AS(clip_and_rebalance(f, 2.0), std::invalid_argument);
    }
}

TEST_CASE("pipeline fixed point on constants") {
    const auto f = GridFunction::constant(11, 7.0 / 11.0);
    const auto tr = transfer_pipeline(f, 1361, 0.3);
    const double want = std::pow(7.0 / 11.0, 3.0);
    REQUIRE(tr.lambda_f == Catch::Approx(want).margin(1e-9));
    REQUIRE(tr.lambda_ell == Catch::Approx(want).margin(1e-9));
    for (std::size_t n = 0; n < 1361; ++n)
        REQUIRE(tr.final_fn[n] == Catch::Approx(7.0 / 11.0).margin(1e-9));
    REQUIRE(!tr.soft_violation);
}

TEST_CASE("pipeline structural audit on an interval input") {
    const auto f = interval_density(11, 7);
    const auto tr = transfer_pipeline(f, 1361, 0.3);

    const double mean = expectation(f);
    REQUIRE(tr.sparse.mean() == Catch::Approx(mean).margin(1e-9));
    REQUIRE(expectation(tr.lifted) == Catch::Approx(mean).margin(1e-9));
    REQUIRE(expectation(tr.final_fn) == Catch::Approx(mean).margin(1e-12));
    REQUIRE(tr.spectrum_scan_done);
    REQUIRE(std::fabs(tr.lambda_hr - tr.lambda_g_sparse) < 1e-9);
    for (double v : tr.final_fn.values()) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
    for (const auto& b : tr.bounds_report)
        if (b.hard) REQUIRE(b.holds);
}

TEST_CASE("pipeline at the second parameter set") {
    const auto f = interval_density(13, 9);
    const auto tr = transfer_pipeline(f, 2203, 0.25);
    REQUIRE(expectation(tr.final_fn) == Catch::Approx(9.0 / 13.0).margin(1e-12));
    REQUIRE(std::fabs(tr.lambda_hr - tr.lambda_g_sparse) < 1e-9);
    for (const auto& b : tr.bounds_report)
        if (b.hard) REQUIRE(b.holds);
}

TEST_CASE("pipeline rejects out-of-contract parameters") {
    const auto f = interval_density(11, 7);
    REQUIRE_THROWS_AS(transfer_pipeline(f, 1361, 0.4), std::invalid_argument);
    REQUIRE_THROWS_AS(transfer_pipeline(f, 1331, 0.3), std::invalid_argument);  // composite
    const auto g = interval_density(12, 7);
    REQUIRE_THROWS_AS(transfer_pipeline(g, 2203, 0.3), std::invalid_argument);  // p composite
}

TEST_CASE("sparse lambda3 matching modes diverge only under wraparound") {
    // Frequencies {0, +-3} on Z_11: -2*3 = -6 wraps to 5 mod 11, which is
    // absent, so integer and mod-p matching agree here...
    SparseTrigPoly g;
    g.modulus_p = 11;
    g.terms = {{0, {6.0, 0.0}}, {3, {1.0, 0.5}}, {-3, {1.0, -0.5}}};
    REQUIRE(g.lambda3(0) == Catch::Approx(g.lambda3(11)).margin(1e-12));

    // ...but adding +-5 creates the mod-11 pair (3 -> -6 = 5) that integer
    // matching does not see.
    g.terms.push_back({5, {2.0, 1.0}});
    g.terms.push_back({-5, {2.0, -1.0}});
    REQUIRE(std::fabs(g.lambda3(0) - g.lambda3(11)) > 1e-6);
}
