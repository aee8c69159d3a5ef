#pragma once

// Smoothing-weight construction on Z_p.
//
// For targets b_1..b_t and 0 < eps < 1, build Fejer-type factors y_i whose
// transforms are squared geometric sums over the window |j| <= L with
// L = floor(eps*p/10), take their pointwise product v, and normalize to a
// weight mu with unit mass.  The weight then satisfies
//   (1) mu_hat(0) = 1,
//   (2) |mu_hat(b_i) - 1| < eps^2 for every target,
//   (3) sum_a |mu_hat(a)| <= (6/eps)^t,
// all of which are asserted at construction time.  In the time domain each
// y_i is a triangular bump in the dilated coordinate: y_i(n) is nonzero only
// when the signed residue of b_i * n has magnitude at most 2L.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ap3/common.hpp"
#include "ap3/types.hpp"
#include "ap3/zn_core.hpp"

namespace ap3 {

struct WeightConstruction {
    std::uint64_t prime_modulus = 0;
    double epsilon = 0.0;
    std::vector<std::uint32_t> targets;   // b_1..b_t, distinct nonzero residues
    std::int64_t window_halfwidth = 0;    // L
    std::vector<std::uint64_t> inverses;  // c_i = b_i^{-1} mod p
    std::vector<GridFunction> kernel_factors;  // the y_i
    GridFunction product;                 // v = y_1 ... y_t
    GridFunction weight;                  // mu = v / sum(v)
    Spectrum weight_spectrum;             // mu_hat

    // Audit quantities.
    double v_hat0 = 0.0;            // sum_n v(n)
    double v_hat0_lower_bound = 0.0;  // (eps/6)^t * p
    bool v_hat0_bound_holds = false;
    double spectral_l1_mass = 0.0;  // sum_a |mu_hat(a)|
    double spectral_l1_bound = 0.0;  // (6/eps)^t
    bool degenerate_window = false;  // L = 0 fallback (eps*p < 10)
};

// Transform of one Fejer-type factor: coeff(a) = (2L+1)^{-1} D(a)^2 with
// D(a) the symmetric geometric sum over |j| <= L at frequency a*c.  All
// coefficients are nonnegative reals and coeff(0) = 2L+1.
inline Spectrum fejer_sq_spectrum(std::uint64_t p, std::uint64_t c, std::int64_t half_width) {
    require(half_width >= 0, "fejer_sq_spectrum: negative window");
    const std::uint64_t width = 2 * static_cast<std::uint64_t>(half_width) + 1;
    require(width <= p, "fejer_sq_spectrum: window wider than the modulus");
    require(c == 0 || std::gcd(c % p, p) == 1,
            "fejer_sq_spectrum: c must be 0 or invertible mod p");

    std::vector<std::complex<double>> coeff(p);
    const double pi = 3.14159265358979323846;
    for (std::uint64_t a = 0; a < p; ++a) {
        const std::uint64_t k = mul_mod(a, c % p, p);
        double dirichlet;
        if (k == 0) {
            dirichlet = static_cast<double>(width);
        } else {
            const double theta = pi * static_cast<double>(k) / static_cast<double>(p);
            dirichlet = std::sin(static_cast<double>(width) * theta) / std::sin(theta);
        }
        coeff[a] = dirichlet * dirichlet / static_cast<double>(width);
    }
    return Spectrum{static_cast<std::size_t>(p), std::move(coeff)};
}

namespace detail {

inline GridFunction clamp_to_unit(std::vector<double> vals, double tol) {
    for (double& v : vals) {
        ensure(v > -tol && v < 1.0 + tol, "kernel factor escaped [0,1]");
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
    }
    return GridFunction(std::move(vals), Interval{0.0, 1.0});
}

}  // namespace detail

// Builds the full weight construction.  Requires eps*p >= 10 (so L >= 1);
// the degenerate L = 0 window (point-mass weight) is allowed only when
// explicitly requested, for pipelines running at very small p.
inline WeightConstruction build_weight(std::uint64_t p,
                                       std::vector<std::uint32_t> targets,
                                       double eps,
                                       bool allow_degenerate_window = false) {
    require(is_prime(p), "build_weight: modulus must be prime");
    require(eps > 0.0 && eps < 1.0, "build_weight: eps must lie in (0,1)");
    const auto t = targets.size();

    WeightConstruction w;
    w.prime_modulus = p;
    w.epsilon = eps;
    w.targets = std::move(targets);
    w.window_halfwidth =
        static_cast<std::int64_t>(std::floor(eps * static_cast<double>(p) / 10.0));
    if (w.window_halfwidth < 1 && t > 0) {
        require(allow_degenerate_window,
                "build_weight: modulus too small for window (eps*p < 10)");
        w.window_halfwidth = 0;
        w.degenerate_window = true;
    }

    for (std::size_t i = 0; i < t; ++i) {
        const std::uint32_t b = w.targets[i];
        require(b != 0 && b < p, "build_weight: targets must be nonzero residues");
        for (std::size_t j = i + 1; j < t; ++j)
            require(w.targets[j] != b, "build_weight: duplicate target");
        w.inverses.push_back(mod_inverse(b, p));
    }

    std::vector<double> v(p, 1.0);
    for (std::size_t i = 0; i < t; ++i) {
        Spectrum yhat = fejer_sq_spectrum(p, w.inverses[i], w.window_halfwidth);
        for (const auto& cf : yhat.coeff)
            ensure(cf.real() >= 0.0, "build_weight: negative kernel coefficient");
        GridFunction y = detail::clamp_to_unit(idft(yhat).values(), 1e-9);
        ensure(std::fabs(y[0] - 1.0) < 1e-9, "build_weight: y(0) != 1");
        for (std::uint64_t n = 0; n < p; ++n) v[n] *= y[n];
        w.kernel_factors.push_back(std::move(y));
    }

    long double v_sum = 0.0L;
    for (double x : v) v_sum += x;
    w.v_hat0 = static_cast<double>(v_sum);
    w.v_hat0_lower_bound =
        std::pow(eps / 6.0, static_cast<double>(t)) * static_cast<double>(p);
    w.v_hat0_bound_holds = w.v_hat0 > w.v_hat0_lower_bound;
    ensure(w.v_hat0 > 0.0, "build_weight: zero total mass");

    std::vector<double> mu(p);
    for (std::uint64_t n = 0; n < p; ++n) mu[n] = v[n] / w.v_hat0;
    w.product = GridFunction(std::move(v), Interval{0.0, 1.0});
    w.weight = GridFunction(std::move(mu), Interval{0.0, 1.0});
    w.weight_spectrum = dft(w.weight);

    // Support fact: v(n) != 0 forces every b_i*n into the window [-2L, 2L].
    for (std::uint64_t n = 0; n < p; ++n) {
        if (std::fabs(w.product[n]) <= 1e-12) continue;
        for (std::size_t i = 0; i < t; ++i) {
            const auto j = signed_residue(
                static_cast<std::int64_t>(mul_mod(w.targets[i], n, p)), p);
            ensure(std::llabs(j) <= 2 * w.window_halfwidth,
                   "build_weight: kernel support escaped the window");
        }
    }

    // The three weight properties.
    ensure(std::fabs(w.weight_spectrum.coeff[0].real() - 1.0) < 1e-12 &&
               std::fabs(w.weight_spectrum.coeff[0].imag()) < 1e-12,
           "build_weight: mu_hat(0) != 1");
    const double eps2 = eps * eps;
    for (std::uint32_t b : w.targets) {
        const auto mh = w.weight_spectrum.coeff[b];
        ensure(std::fabs(mh.imag()) < 1e-9, "build_weight: mu_hat(b) not real");
        ensure(std::fabs(mh.real() - 1.0) < eps2,
               "build_weight: |mu_hat(b)-1| >= eps^2 at target " + std::to_string(b));
    }
    long double l1 = 0.0L;
    for (const auto& cf : w.weight_spectrum.coeff) l1 += std::abs(cf);
    w.spectral_l1_mass = static_cast<double>(l1);
    w.spectral_l1_bound = std::pow(6.0 / eps, static_cast<double>(t));
    ensure(w.spectral_l1_mass <= w.spectral_l1_bound + 1e-9,
           "build_weight: spectral l1 mass exceeds (6/eps)^t");
    return w;
}

}  // namespace ap3
