#pragma once

// Randomized property suites behind `ap3 verify <suite>`.  Each suite checks
// one identity or bound family end to end; a thrown exception or a false
// check is a hard failure, while bounds that only hold asymptotically are
// tallied as soft flags.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ap3/kernels.hpp"
#include "ap3/oscillation.hpp"
#include "ap3/rng.hpp"
#include "ap3/spectra.hpp"
#include "ap3/transfer.hpp"
#include "ap3/types.hpp"
#include "ap3/zn_core.hpp"

namespace ap3::verify {

struct SuiteResult {
    std::string name;
    std::uint64_t trials = 0;
    std::uint64_t hard_failures = 0;
    std::uint64_t soft_flags = 0;
    std::vector<std::string> notes;

    bool passed() const { return hard_failures == 0; }
};

namespace detail {

inline GridFunction random_grid(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return GridFunction(std::move(v), Interval{lo, hi});
}

inline ResidueSet random_set(Rng& rng, std::size_t n, std::size_t size) {
    std::vector<std::uint32_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < size; ++i) {
        const auto j = rng.uniform_int(i, n - 1);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    return ResidueSet(n, std::move(pool));
}

inline void note_failure(SuiteResult& res, const std::string& what) {
    ++res.hard_failures;
    if (res.notes.size() < 16) res.notes.push_back(what);
}

}  // namespace detail

inline SuiteResult suite_parseval(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "parseval";
    res.trials = trials;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const std::size_t n = rng.uniform_int(3, 512);
        const auto f = detail::random_grid(rng, n, 0.0, 1.0);
        const Spectrum spec = dft(f);

        long double lhs = 0.0L, rhs = 0.0L;
        for (std::size_t a = 0; a < n; ++a) lhs += std::norm(spec.coeff[a]);
        for (double v : f.values()) rhs += v * v;
        rhs *= static_cast<long double>(n);
        if (std::fabs(static_cast<double>(lhs - rhs)) > 1e-9 * static_cast<double>(rhs))
            detail::note_failure(res, "parseval mismatch at N=" + std::to_string(n));

        const GridFunction back = idft(spec);
        for (std::size_t i = 0; i < n; ++i) {
            if (std::fabs(back[i] - f[i]) > 1e-9) {
                detail::note_failure(res, "roundtrip error at N=" + std::to_string(n));
                break;
            }
        }
    }
    return res;
}

inline SuiteResult suite_large_values(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "large-values";
    res.trials = trials;
    const double betas[] = {0.05, 0.1, 0.3};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const auto h = detail::random_grid(rng, 101, 0.0, 1.0);
        const double beta = betas[trial % 3];
        try {
            const auto rep = large_spectrum(h, beta);
            if (static_cast<double>(rep.large_set.size()) > rep.bound)
                detail::note_failure(res, "cardinality bound violated");
            // Monotonicity: a higher threshold keeps a subset.
            const auto rep2 = large_spectrum(h, std::min(0.9, beta * 2.0));
            for (auto a : rep2.large_set.members())
                if (!rep.large_set.contains(a)) {
                    detail::note_failure(res, "monotonicity violated");
                    break;
                }
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

inline SuiteResult suite_same_fourier(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "same-fourier";
    res.trials = trials;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const std::size_t n = trial % 2 == 0 ? 64 : 101;
        const auto f = detail::random_grid(rng, n, -2.0, 2.0);
        std::vector<double> g_vals = f.values();
        switch (trial % 4) {
            case 0:  // small pointwise perturbation
                for (auto& v : g_vals)
                    v = std::clamp(v + rng.uniform(-0.01, 0.01), -2.0, 2.0);
                break;
            case 1: {  // constant shift
                const double c = rng.uniform(-0.05, 0.05);
                for (auto& v : g_vals) v = std::clamp(v + c, -2.0, 2.0);
                break;
            }
            case 2: {  // flatten to the mean
                const double mean = expectation(f);
                for (auto& v : g_vals) v = mean;
                break;
            }
            default:  // independent draw
                for (auto& v : g_vals) v = rng.uniform(-2.0, 2.0);
                break;
        }
        const GridFunction g(std::move(g_vals), Interval{-2.0, 2.0});
        try {
            const auto rep = check_same_fourier_bound(f, g);
            if (!rep.bound_holds)
                detail::note_failure(res, "12*beta bound violated at N=" + std::to_string(n));
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

inline SuiteResult suite_flatten(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "flatten";
    res.trials = trials;
    const std::uint64_t primes[] = {101, 499};
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const std::uint64_t p = primes[trial % 2];
        const double eps = rng.uniform(0.3, 0.7);
        const auto t = static_cast<std::size_t>(rng.uniform_int(1, 3));
        std::vector<std::uint32_t> targets;
        while (targets.size() < t) {
            const auto b = static_cast<std::uint32_t>(rng.uniform_int(1, p - 1));
            bool dup = false;
            for (auto x : targets) dup |= x == b;
            if (!dup) targets.push_back(b);
        }
        try {
            const auto w = build_weight(p, targets, eps);
            if (!w.v_hat0_bound_holds) ++res.soft_flags;
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

inline SuiteResult suite_measure_prop(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "measure-prop";
    res.trials = trials;
    const std::uint64_t p = 101;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const double eps = rng.uniform(0.25, 1.0 / 3.0);
        GridFunction f;
        switch (trial % 3) {
            case 0:
                f = GridFunction::constant(p, rng.uniform(0.2, 0.9));
                break;
            case 1: {  // interval indicator
                const auto len = static_cast<std::size_t>(rng.uniform_int(20, 80));
                std::vector<double> v(p, 0.0);
                for (std::size_t i = 0; i < len; ++i) v[i] = 1.0;
                f = GridFunction(std::move(v), Interval{0.0, 1.0});
                break;
            }
            default: {  // clipped cosine
                const double amp = rng.uniform(0.2, 0.5);
                std::vector<double> v(p);
                for (std::size_t i = 0; i < p; ++i)
                    v[i] = std::clamp(
                        0.5 + amp * std::cos(fft::detail::kTwoPi * double(i) / double(p)),
                        0.0, 1.0);
                f = GridFunction(std::move(v), Interval{0.0, 1.0});
                break;
            }
        }
        try {
            const auto support = extract_support(f, eps);
            std::vector<std::uint32_t> targets;
            for (auto b : support.set_b.members())
                if (b != 0) targets.push_back(b);
            const auto w = build_weight(p, targets, eps, true);
            const auto dil = find_dilation(p, support.set_bprime);
            const auto h = smooth_and_dilate(f, w, dil.dilation);
            const auto g = truncate_to_sparse(h, dil);

            double max_dev = 0.0;
            for (std::uint64_t n = 0; n < p; ++n)
                max_dev = std::max(max_dev,
                                   std::fabs(g.evaluate(double(n)) - h[n]));
            if (max_dev >= eps + 1e-9)
                detail::note_failure(res, "integer deviation bound violated");
            if (std::fabs(g.mean() - expectation(f)) > 1e-9)
                detail::note_failure(res, "mean not preserved");
            if (std::fabs(g.lambda3(p) - lambda3_spectral(f)) >= 25.0 * eps)
                ++res.soft_flags;
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

inline SuiteResult suite_spread(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "spread";
    res.trials = trials;
    const std::uint64_t p = 10007;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const auto size = static_cast<std::size_t>(0.35 * static_cast<double>(p));
        const auto s = detail::random_set(rng, p, size);
        try {
            const auto rep = spread_bound_check(s, doubling_set(s));
            if (!rep.holds) detail::note_failure(res, "spread bound violated");
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

inline SuiteResult suite_complement(std::uint64_t trials, std::uint64_t seed) {
    SuiteResult res;
    res.name = "complement";
    res.trials = trials;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng(seed, trial);
        const std::size_t n = 2 * rng.uniform_int(1, 499) + 1;  // odd, 3..999
        const auto size = static_cast<std::size_t>(rng.uniform_int(0, n));
        const auto a = detail::random_set(rng, n, size);
        try {
            if (!complement_identity_residual(a).is_zero())
                detail::note_failure(res, "nonzero residual at N=" + std::to_string(n));
        } catch (const std::exception& e) {
            detail::note_failure(res, e.what());
        }
    }
    return res;
}

using SuiteFn = std::function<SuiteResult(std::uint64_t, std::uint64_t)>;

inline const std::map<std::string, std::pair<SuiteFn, std::uint64_t>>& suites() {
    // name -> (runner, default trial count)
    static const std::map<std::string, std::pair<SuiteFn, std::uint64_t>> table = {
        {"parseval", {suite_parseval, 200}},
        {"large-values", {suite_large_values, 200}},
        {"same-fourier", {suite_same_fourier, 100}},
        {"flatten", {suite_flatten, 10}},
        {"measure-prop", {suite_measure_prop, 10}},
        {"spread", {suite_spread, 20}},
        {"complement", {suite_complement, 200}},
    };
    return table;
}

}  // namespace ap3::verify
