#pragma once

// Apparatus for the rho(2/3, N) oscillation experiments.
//
// For odd N the complement identity
//     Lambda3(A) + Lambda3(A') = 3 v^2 - 3 v + 1,   v = |A| / N,
// is exact in integer arithmetic, so minimizers of Lambda3 are complements
// of maximizers.  When 3 | N the multiples of 3 make the complement value
// (1-v)^2, giving rho(2/3, N) = 2/9; for primes p = 1 (mod 3) the sumset
// spread bound caps the complement term at 0.93/9 instead, forcing the
// minimum above 0.23.  Everything here stays in exact arithmetic except the
// transform-based convolution, whose rounding is verified entry by entry.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ap3/common.hpp"
#include "ap3/rational.hpp"
#include "ap3/rho.hpp"
#include "ap3/rng.hpp"
#include "ap3/types.hpp"
#include "ap3/zn_core.hpp"

namespace ap3 {

// Lambda3(A) + Lambda3(A') - (3 v^2 - 3 v + 1) as an exact rational; zero
// for every A when N is odd.
inline Rational complement_identity_residual(const ResidueSet& a) {
    const auto n = static_cast<std::int64_t>(a.modulus());
    require(n >= 3 && n % 2 == 1, "complement_identity_residual: modulus must be odd, >= 3");
    const auto k = static_cast<std::int64_t>(a.size());
    const auto count_a = static_cast<std::int64_t>(lambda3_count(a));
    const auto count_ac = static_cast<std::int64_t>(lambda3_count(a.complement()));
    // (count_a + count_ac)/N^2 - (3k^2 - 3kN + N^2)/N^2
    return Rational(count_a + count_ac - (3 * k * k - 3 * k * n + n * n), n * n);
}

struct ConvolutionCounts {
    std::uint64_t modulus = 0;
    ResidueSet source;
    std::vector<std::uint64_t> counts;  // r(n) = #{(s1,s2) in S x S : s1+s2 = n}
};

// Representation counts of the sumset S+S via transform-based convolution.
// Each value is rounded to the nearest integer; a residual of 0.5 or more
// anywhere is a hard error, so the returned counts are exact.
inline ConvolutionCounts sumset_counts(const ResidueSet& s) {
    const std::size_t p = s.modulus();
    auto spec = fft::transform_real(s.indicator().values(), +1);
    for (auto& c : spec) c *= c;
    const auto conv = fft::transform(std::move(spec), -1);

    ConvolutionCounts out;
    out.modulus = p;
    out.source = s;
    out.counts.resize(p);
    std::uint64_t total = 0;
    for (std::size_t n = 0; n < p; ++n) {
        const double v = conv[n].real() / static_cast<double>(p);
        const double rounded = std::round(v);
        ensure(std::fabs(v - rounded) < 0.5 && rounded >= 0.0,
               "sumset_counts: convolution rounding residual too large");
        out.counts[n] = static_cast<std::uint64_t>(rounded);
        total += out.counts[n];
    }
    ensure(total == static_cast<std::uint64_t>(s.size()) * s.size(),
           "sumset_counts: total mass != |S|^2");
    return out;
}

// T = 2*S; a dilation for odd moduli, so the progression count is unchanged.
inline ResidueSet doubling_set(const ResidueSet& s) {
    require(s.modulus() % 2 == 1, "doubling_set: modulus must be odd");
    return s.dilate(2);
}

struct SpreadReport {
    std::uint64_t lhs = 0;        // sum_{n in T} r(n), exact
    double rhs = 0.0;             // 0.93 |S| sqrt(|S| |T|)
    bool holds = false;
    double max_nonzero_coeff = 0.0;        // max_{a != 0} |S_hat(a)|
    double interval_extremal_value = 0.0;  // sin(pi |S|/p) / sin(pi/p)
};

// Checks sum_{n in T} r(n) < 0.93 |S| (|S| |T|)^{1/2} for |S| strictly
// between p/3 and 2p/5.  Also reports the largest nontrivial coefficient of
// S against the interval-extremal value.
inline SpreadReport spread_bound_check(const ResidueSet& s, const ResidueSet& t) {
    const std::uint64_t p = s.modulus();
    require(is_prime(p), "spread_bound_check: modulus must be prime");
    require(t.modulus() == p, "spread_bound_check: modulus mismatch");
    const auto size = static_cast<double>(s.size());
    require(3.0 * size > static_cast<double>(p) && 5.0 * size < 2.0 * static_cast<double>(p),
            "spread_bound_check: |S| outside (p/3, 2p/5)");

    const auto counts = sumset_counts(s);
    SpreadReport rep;
    for (std::uint32_t n : t.members()) rep.lhs += counts.counts[n];
    rep.rhs = 0.93 * size * std::sqrt(size * static_cast<double>(t.size()));
    rep.holds = static_cast<double>(rep.lhs) < rep.rhs;

    const Spectrum spec = dft(s);
    for (std::uint64_t a = 1; a < p; ++a)
        rep.max_nonzero_coeff = std::max(rep.max_nonzero_coeff, std::abs(spec.coeff[a]));
    const double pi = 3.14159265358979323846;
    rep.interval_extremal_value =
        std::sin(pi * size / static_cast<double>(p)) / std::sin(pi / static_cast<double>(p));
    return rep;
}

struct OscillationReport {
    std::uint64_t p = 0;
    ResidueSet set_a;              // |A| = (2p+1)/3
    std::uint64_t sum_over_t = 0;  // sum_{n in T} r(n), T = 2*(Z_p \ A)
    Rational lambda_t;             // = sum_over_t / p^2, exactly the count of T
    double spread_rhs_normalized = 0.0;  // 0.93 p^{-2} |S| (|S||T|)^{1/2}
    bool spread_holds = false;
    Rational lambda_a;             // via the complement identity
    bool above_023 = false;        // Lambda3(A) > 0.23
};

// The prime-case experiment: for p = 1 (mod 3) and |A| = (2p+1)/3 the
// complement S has |S| = (p-1)/3, and the progression count of T = 2*S
// equals sum_{n in T} r(n) exactly.  The supplied A is used as-is (the
// bound is uniform over admissible sets); absent one, a seeded random A of
// the right size is drawn.
inline OscillationReport oscillation_experiment(std::uint64_t p,
                                                std::optional<ResidueSet> a_opt = {},
                                                std::uint64_t seed = 0) {
    require(is_prime(p), "oscillation_experiment: p must be prime");
    require(p % 3 == 1, "oscillation_experiment: p must be 1 mod 3");
    const std::uint64_t size_a = (2 * p + 1) / 3;

    ResidueSet a;
    if (a_opt) {
        require(a_opt->modulus() == p, "oscillation_experiment: modulus mismatch");
        require(a_opt->size() == size_a,
                "oscillation_experiment: |A| must be (2p+1)/3 = " + std::to_string(size_a));
        a = *a_opt;
    } else {
        // Random |S| = (p-1)/3 complement, drawn without replacement.
        Rng rng(seed, 0x6f7363ull);
        std::vector<std::uint32_t> pool(p);
        for (std::uint64_t i = 0; i < p; ++i) pool[i] = static_cast<std::uint32_t>(i);
        const std::uint64_t size_s = (p - 1) / 3;
        for (std::uint64_t i = 0; i < size_s; ++i) {
            const auto j = rng.uniform_int(i, p - 1);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(size_s);
        a = ResidueSet(p, std::move(pool)).complement();
    }

    const ResidueSet s = a.complement();
    ensure(s.size() == (p - 1) / 3, "oscillation_experiment: |S| != (p-1)/3");
    const ResidueSet t = doubling_set(s);

    OscillationReport rep;
    rep.p = p;
    rep.set_a = a;
    const auto counts = sumset_counts(s);
    for (std::uint32_t n : t.members()) rep.sum_over_t += counts.counts[n];

    // Middle-term identity, both sides exact integers.
    const std::uint64_t count_t = lambda3_count(t);
    ensure(count_t == rep.sum_over_t,
           "oscillation_experiment: middle-term identity violated");
    const auto p2 = static_cast<std::int64_t>(p) * static_cast<std::int64_t>(p);
    rep.lambda_t = Rational(static_cast<std::int64_t>(count_t), p2);

    const auto sz_s = static_cast<double>(s.size());
    rep.spread_rhs_normalized = 0.93 * sz_s * std::sqrt(sz_s * static_cast<double>(t.size())) /
                                static_cast<double>(p2);
    rep.spread_holds = rep.lambda_t.to_double() < rep.spread_rhs_normalized;

    // Lambda3(A) = 3v^2 - 3v + 1 - Lambda3(S) with Lambda3(S) = Lambda3(T).
    const auto k = static_cast<std::int64_t>(a.size());
    const auto n64 = static_cast<std::int64_t>(p);
    rep.lambda_a = Rational(3 * k * k - 3 * k * n64 + n64 * n64, p2) - rep.lambda_t;
    rep.above_023 = rep.lambda_a > Rational(23, 100);
    return rep;
}

struct OscillationRow {
    std::uint64_t n = 0;
    std::string klass;  // "3|N", "prime 1 mod 3", "prime 2 mod 3", "composite"
    std::string mode;   // "exact" or "descent"
    double value = 0.0;
    std::string value_exact;  // rational rendering when exact
};

// One row per odd N: the best-known rho_2(upsilon, N) (exhaustive when the
// subset space fits the budget, otherwise a descent upper bound).
inline std::vector<OscillationRow> oscillation_table(std::uint64_t odd_max,
                                                     const Rational& upsilon,
                                                     std::uint64_t exact_budget,
                                                     std::uint64_t seed) {
    std::vector<OscillationRow> rows;
    for (std::uint64_t n = 5; n <= odd_max; n += 2) {
        OscillationRow row;
        row.n = n;
        if (n % 3 == 0)
            row.klass = "3|N";
        else if (is_prime(n))
            row.klass = n % 3 == 1 ? "prime 1 mod 3" : "prime 2 mod 3";
        else
            row.klass = "composite";

        const auto k = static_cast<std::uint64_t>(
            (static_cast<std::int64_t>(n) * upsilon.num() + upsilon.den() - 1) /
            upsilon.den());
        if (binomial_capped(n, k, exact_budget) <= exact_budget) {
            auto res = rho_exact_sets(n, upsilon, exact_budget);
            row.mode = "exact";
            row.value = res.value;
            row.value_exact = res.exact_value.to_string();
        } else {
            DescentOptions opt;
            if (n % 3 == 0 && upsilon == Rational(2, 3)) {
                // Best known witness for 3|N: the multiples-of-3 complement.
                std::vector<std::uint32_t> mult3;
                for (std::uint64_t x = 0; x < n; x += 3)
                    mult3.push_back(static_cast<std::uint32_t>(x));
                opt.extra_starts.push_back(
                    ResidueSet(n, std::move(mult3)).complement().indicator());
            }
            auto res = rho_descent(n, upsilon, 4, seed, opt);
            row.mode = "descent";
            row.value = res.value;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ap3
