#pragma once

// Estimates of rho(upsilon, N) = min Lambda3 over densities at least upsilon.
//
// Two modes:
//   * exact_sets        -- exhaustive minimum of the exact progression count
//                          over all subsets of size ceil(upsilon*N).  Superset
//                          monotonicity (adding an element never removes a
//                          progression) justifies fixing the minimal size.
//   * descent_functions -- projected gradient descent over
//                          {f in [0,1]^N : E(f) = upsilon}; an upper bound on
//                          the functional minimum, never claimed optimal.
// Plus the randomized functions-to-sets rounding that connects them.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ap3/common.hpp"
#include "ap3/rational.hpp"
#include "ap3/rng.hpp"
#include "ap3/types.hpp"
#include "ap3/zn_core.hpp"

namespace ap3 {

struct SearchStats {
    std::uint64_t nodes_visited = 0;
    std::uint64_t iterations = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    bool converged = true;
};

struct RhoResult {
    std::size_t modulus = 0;
    Rational upsilon;
    std::string mode;          // "exact_sets" or "descent_functions"
    Rational exact_value;      // valid in exact_sets mode
    double value = 0.0;        // float value (both modes)
    std::optional<ResidueSet> set_witness;
    std::optional<GridFunction> function_witness;
    SearchStats stats;
};

namespace detail {

// Incremental progression counter: for each element e, the list of (n,d)
// triples through e, stored as the two companion positions.  Adding e to a
// set completes exactly the triples through e whose companions are present.
class ApCounter {
public:
    explicit ApCounter(std::size_t n) : n_(n), companions_(n) {
        for (std::size_t nn = 0; nn < n; ++nn) {
            for (std::size_t d = 0; d < n; ++d) {
                const std::uint32_t pos[3] = {
                    static_cast<std::uint32_t>(nn),
                    static_cast<std::uint32_t>((nn + d) % n),
                    static_cast<std::uint32_t>((nn + 2 * d) % n)};
                for (int i = 0; i < 3; ++i) {
                    bool seen = false;
                    for (int j = 0; j < i; ++j) seen |= pos[j] == pos[i];
                    if (seen) continue;  // count each (n,d) once per element
                    companions_[pos[i]].push_back(
                        {pos[(i + 1) % 3], pos[(i + 2) % 3]});
                }
            }
        }
    }

    std::uint64_t add(std::vector<std::uint8_t>& mem, std::uint32_t e) const {
        mem[e] = 1;
        std::uint64_t delta = 0;
        for (const auto& [u, v] : companions_[e]) delta += mem[u] & mem[v];
        return delta;
    }

    void remove(std::vector<std::uint8_t>& mem, std::uint32_t e) const { mem[e] = 0; }

    std::size_t modulus() const { return n_; }

private:
    std::size_t n_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> companions_;
};

// Least bitmask in the affine orbit {a*S + b : gcd(a,N)=1}.
inline std::uint64_t canonical_affine_mask(std::uint64_t mask, std::size_t n) {
    const std::uint64_t all = ~0ull >> (64 - n);
    std::uint64_t found = mask;
    for (std::uint64_t a = 1; a < n; ++a) {
        if (std::gcd(a, static_cast<std::uint64_t>(n)) != 1) continue;
        std::uint64_t dilated = 0;
        for (std::size_t x = 0; x < n; ++x)
            if (mask >> x & 1) dilated |= 1ull << ((a * x) % n);
        found = std::min(found, dilated);
        for (std::uint64_t b = 1; b < n; ++b) {
            const std::uint64_t rot = ((dilated << b) | (dilated >> (n - b))) & all;
            found = std::min(found, rot);
        }
    }
    return found;
}

inline bool affine_equivalent(const ResidueSet& a, const ResidueSet& b) {
    require(a.modulus() == b.modulus() && a.modulus() <= 63,
            "affine_equivalent: moduli must agree and be <= 63");
    std::uint64_t ma = 0, mb = 0;
    for (auto x : a.members()) ma |= 1ull << x;
    for (auto x : b.members()) mb |= 1ull << x;
    return canonical_affine_mask(ma, a.modulus()) == canonical_affine_mask(mb, b.modulus());
}

}  // namespace detail

inline bool affine_equivalent(const ResidueSet& a, const ResidueSet& b) {
    return detail::affine_equivalent(a, b);
}

// Exhaustive minimum over all subsets of size ceil(upsilon*N), enumerated in
// lexicographic member order (ties keep the first witness).  Enumeration and
// counting are incremental; the optional canonical pruning restricts the
// candidates to affine-canonical masks without changing the minimum.
inline RhoResult rho_exact_sets(std::size_t n, const Rational& upsilon,
                                std::uint64_t budget = 100000000ull,
                                bool canonical_prune = false) {
    require(n >= 2, "rho_exact_sets: need N >= 2");
    require(!canonical_prune || n <= 63,
            "rho_exact_sets: canonical pruning needs N <= 63");
    require(upsilon > Rational(0) && upsilon <= Rational(1),
            "rho_exact_sets: upsilon must lie in (0,1]");
    const auto k = static_cast<std::size_t>(
        (static_cast<std::int64_t>(n) * upsilon.num() + upsilon.den() - 1) / upsilon.den());
    require(k >= 1 && k <= n, "rho_exact_sets: empty target size");
    const std::uint64_t count = binomial_capped(n, k, budget);
    require(count <= budget,
            "rho_exact_sets: subset budget exceeded; use descent mode instead");

    const auto t0 = std::chrono::steady_clock::now();
    detail::ApCounter counter(n);
    std::vector<std::uint8_t> mem(n, 0);
    std::vector<std::uint32_t> chosen;
    chosen.reserve(k);

    std::uint64_t best_count = UINT64_MAX;
    std::vector<std::uint32_t> best_set;
    std::uint64_t nodes = 0;
    std::uint64_t mask = 0;

    auto recurse = [&](auto&& self, std::size_t start, std::size_t remaining,
                       std::uint64_t acc) -> void {
        if (remaining == 0) {
            ++nodes;
            if (canonical_prune &&
                detail::canonical_affine_mask(mask, n) != mask)
                return;
            if (acc < best_count) {
                best_count = acc;
                best_set = chosen;
            }
            return;
        }
        for (std::size_t e = start; e + remaining <= n; ++e) {
            const auto eu = static_cast<std::uint32_t>(e);
            const std::uint64_t delta = counter.add(mem, eu);
            chosen.push_back(eu);
            if (canonical_prune) mask |= 1ull << e;
            self(self, e + 1, remaining - 1, acc + delta);
            if (canonical_prune) mask &= ~(1ull << e);
            chosen.pop_back();
            counter.remove(mem, eu);
        }
    };
    recurse(recurse, 0, k, 0);
    ensure(best_count != UINT64_MAX, "rho_exact_sets: enumeration found nothing");

    RhoResult res;
    res.modulus = n;
    res.upsilon = upsilon;
    res.mode = "exact_sets";
    res.exact_value = Rational(static_cast<std::int64_t>(best_count),
                               static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n));
    res.value = res.exact_value.to_double();
    res.set_witness = ResidueSet(n, best_set);
    res.stats.nodes_visited = nodes;
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// Gradient of Lambda3 at f: N^{-2} (2 A(m) + (f*f)(2m)) where
// A(m) = sum_j f(j) f(2j - m), computed with three transforms.
inline GridFunction lambda3_gradient(const GridFunction& f) {
    const std::size_t n = f.modulus();
    const Spectrum spec = dft(f);

    std::vector<std::complex<double>> ga(n), gb(n);
    for (std::size_t a = 0; a < n; ++a) {
        ga[a] = spec.coeff[(2 * a) % n] * std::conj(spec.coeff[a]);
        gb[a] = spec.coeff[a] * spec.coeff[a];
    }
    auto corr = fft::transform(std::move(ga), -1);   // n * A(m)
    auto conv = fft::transform(std::move(gb), -1);   // n * (f*f)(m)

    const double scale = 1.0 / (static_cast<double>(n) * n * n);
    std::vector<double> grad(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double a_term = corr[m].real();
        const double b_term = conv[(2 * m) % n].real();
        grad[m] = scale * (2.0 * a_term + b_term);
    }
    return GridFunction::from_values(std::move(grad));
}

namespace detail {

// Dykstra-style projection onto {x in [0,1]^N : mean(x) = target}; finishes
// with an exact mean shift plus hard clamp so the residuals stay below 1e-12.
inline void project_feasible(std::vector<double>& x, double target) {
    const std::size_t n = x.size();
    std::vector<double> p_inc(n, 0.0), q_inc(n, 0.0);
    for (int iter = 0; iter < 500; ++iter) {
        double violation = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = x[i] + p_inc[i];
            const double b = std::clamp(y, 0.0, 1.0);
            p_inc[i] = y - b;
            x[i] = b;
        }
        long double mean = 0.0L;
        for (std::size_t i = 0; i < n; ++i) mean += x[i] + q_inc[i];
        mean /= static_cast<long double>(n);
        const double shift = target - static_cast<double>(mean);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = x[i] + q_inc[i];
            q_inc[i] = -shift;
            x[i] = y + shift;
            violation = std::max(violation, std::max(0.0, x[i] - 1.0));
            violation = std::max(violation, std::max(0.0, -x[i]));
        }
        if (violation < 1e-13) break;
    }
    long double mean = 0.0L;
    for (double v : x) mean += v;
    const double shift = target - static_cast<double>(mean / static_cast<long double>(n));
    for (double& v : x) v = std::clamp(v + shift, 0.0, 1.0);
}

inline double lambda3_of_values(const std::vector<double>& vals) {
    return lambda3_spectral(GridFunction(vals, Interval{0.0, 1.0}));
}

}  // namespace detail

struct DescentOptions {
    int max_iterations = 10000;
    double armijo_c = 1e-4;
    double min_step = 1e-12;
    std::vector<GridFunction> extra_starts;
    // Seed one restart from the exact set witness when the subset space is
    // at most this large (0 disables).
    std::uint64_t auto_witness_budget = 100000;
};

inline RhoResult rho_descent(std::size_t n, const Rational& upsilon, int restarts,
                             std::uint64_t seed, const DescentOptions& opt = {}) {
    require(n >= 3, "rho_descent: need N >= 3");
    require(upsilon > Rational(0) && upsilon <= Rational(1),
            "rho_descent: upsilon must lie in (0,1]");
    const double target = upsilon.to_double();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::vector<double>> starts;
    for (const auto& g : opt.extra_starts) {
        require(g.modulus() == n, "rho_descent: start has wrong modulus");
        starts.push_back(g.values());
    }
    if (n <= 63 && opt.auto_witness_budget > 0) {
        const auto k = static_cast<std::size_t>(
            (static_cast<std::int64_t>(n) * upsilon.num() + upsilon.den() - 1) /
            upsilon.den());
        if (k >= 1 && k <= n &&
            binomial_capped(n, k, opt.auto_witness_budget) <= opt.auto_witness_budget) {
            auto exact = rho_exact_sets(n, upsilon, opt.auto_witness_budget);
            starts.push_back(exact.set_witness->indicator().values());
        }
    }
    for (int rstart = 0; rstart < restarts; ++rstart) {
        Rng rng(seed, static_cast<std::uint64_t>(rstart) + 1);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform();
        starts.push_back(std::move(x));
    }

    struct StartOutcome {
        double value = 2.0;
        std::vector<double> point;
        std::uint64_t iterations = 0;
        bool converged = false;
    };
    auto run_from = [&](std::vector<double> x) {
        StartOutcome out;
        detail::project_feasible(x, target);
        double fx = detail::lambda3_of_values(x);
        for (int iter = 0; iter < opt.max_iterations; ++iter) {
            ++out.iterations;
            const GridFunction xf(x, Interval{0.0, 1.0});
            const auto grad = lambda3_gradient(xf).values();
            double step = 1.0;
            bool accepted = false;
            bool stalled = false;
            while (step >= opt.min_step) {
                std::vector<double> cand(n);
                for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] - step * grad[i];
                detail::project_feasible(cand, target);
                double inner = 0.0;
                for (std::size_t i = 0; i < n; ++i) inner += grad[i] * (cand[i] - x[i]);
                const double fc = detail::lambda3_of_values(cand);
                if (fc <= fx + opt.armijo_c * inner && fc <= fx) {
                    stalled = std::fabs(fx - fc) < 1e-14;
                    x = std::move(cand);
                    fx = fc;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted || stalled) {
                out.converged = true;  // no usable descent direction remains
                break;
            }
        }
        out.value = fx;
        out.point = std::move(x);
        return out;
    };

    std::vector<StartOutcome> outcomes(starts.size());
    const int workers = std::max(1, std::min<int>(max_threads(),
                                                  static_cast<int>(starts.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < starts.size(); ++i)
            outcomes[i] = run_from(std::move(starts[i]));
    } else {
        std::atomic<std::size_t> next(0);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < starts.size();
                     i = next.fetch_add(1))
                    outcomes[i] = run_from(std::move(starts[i]));
            });
        }
        for (auto& th : pool) th.join();
    }

    double best_val = 2.0;
    std::vector<double> best_x;
    std::uint64_t total_iters = 0;
    bool converged_all = true;
    for (const auto& out : outcomes) {
        total_iters += out.iterations;
        converged_all = converged_all && out.converged;
        if (out.value < best_val) {
            best_val = out.value;
            best_x = out.point;
        }
    }

    RhoResult res;
    res.modulus = n;
    res.upsilon = upsilon;
    res.mode = "descent_functions";
    res.value = best_val;
    res.function_witness = GridFunction(best_x, Interval{0.0, 1.0});
    res.stats.iterations = total_iters;
    res.stats.seed = seed;
    res.stats.converged = converged_all;
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// Functions-to-sets rounding: include n with probability f(n) (seeded,
// counter-based, order-independent), then top up with the smallest missing
// indices until the size reaches ceil(upsilon*N).
inline ResidueSet round_to_set(const GridFunction& f, const Rational& upsilon,
                               std::uint64_t seed) {
    const std::size_t n = f.modulus();
    require(f.declared_range().within(Interval{0.0, 1.0}),
            "round_to_set: f must map into [0,1]");
    const auto need = static_cast<std::size_t>(
        (static_cast<std::int64_t>(n) * upsilon.num() + upsilon.den() - 1) / upsilon.den());
    require(expectation(f) >= upsilon.to_double() - 1e-12,
            "round_to_set: mean of f below upsilon");

    std::vector<std::uint32_t> members;
    std::vector<std::uint8_t> in(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed, 0x726f756e64ull ^ (static_cast<std::uint64_t>(i) << 1));
        if (rng.uniform() < f[i]) {
            members.push_back(static_cast<std::uint32_t>(i));
            in[i] = 1;
        }
    }
    for (std::size_t i = 0; i < n && members.size() < need; ++i) {
        if (!in[i]) {
            members.push_back(static_cast<std::uint32_t>(i));
            in[i] = 1;
        }
    }
    return ResidueSet(n, std::move(members));
}

}  // namespace ap3
