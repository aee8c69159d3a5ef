#pragma once

// Fourier analysis on Z_N and the three-term-progression density evaluators.
//
// Lambda3(f) = E_{n,d} f(n) f(n+d) f(n+2d) counts progressions including the
// trivial ones (d = 0).  Two float evaluators are provided -- the direct
// O(N^2) sum and the spectral identity N^{-3} sum_a F(a)^2 F(-2a) -- plus an
// exact integer counter for sets.  The spectral and direct routes must agree
// to 1e-9; a larger gap indicates a transform bug and throws.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "ap3/common.hpp"
#include "ap3/fft.hpp"
#include "ap3/rational.hpp"
#include "ap3/types.hpp"

namespace ap3 {

inline Spectrum dft(const GridFunction& f) {
    return Spectrum{f.modulus(), fft::transform_real(f.values(), +1)};
}

inline Spectrum dft(const ResidueSet& s) { return dft(s.indicator()); }

inline GridFunction idft(const Spectrum& spec) {
    auto vals = fft::transform(spec.coeff, -1);
    const double inv_n = 1.0 / static_cast<double>(spec.modulus);
    std::vector<double> out(spec.modulus);
    for (std::size_t n = 0; n < spec.modulus; ++n) out[n] = vals[n].real() * inv_n;
    return GridFunction::from_values(std::move(out));
}

inline double expectation(const GridFunction& f) {
    long double acc = 0.0L;
    for (double v : f.values()) acc += v;
    return static_cast<double>(acc / static_cast<long double>(f.modulus()));
}

// ||f||_t with the uniform probability measure on Z_N; t >= 1.
inline double norm(const GridFunction& f, double t) {
    require(t >= 1.0, "norm: order must be >= 1");
    long double acc = 0.0L;
    for (double v : f.values()) acc += std::pow(std::fabs(v), static_cast<long double>(t));
    return static_cast<double>(
        std::pow(acc / static_cast<long double>(f.modulus()), 1.0L / t));
}

inline double lambda3_direct(const GridFunction& f) {
    const auto& v = f.values();
    const std::size_t n_mod = f.modulus();
    long double total = 0.0L;
    for (std::size_t n = 0; n < n_mod; ++n) {
        const double fn = v[n];
        if (fn == 0.0) continue;
        double acc = 0.0;
        std::size_t i1 = n, i2 = n;
        for (std::size_t d = 0; d < n_mod; ++d) {
            acc += v[i1] * v[i2];
            if (++i1 == n_mod) i1 = 0;
            i2 += 2;
            if (i2 >= n_mod) i2 -= n_mod;
        }
        total += fn * acc;
    }
    const long double nn = static_cast<long double>(n_mod);
    return static_cast<double>(total / (nn * nn));
}

// Spectral evaluation N^{-3} sum_a F(a)^2 F(-2a).  The imaginary residue of
// the sum must vanish (the summand set is closed under conjugation).
inline double lambda3_spectral(const GridFunction& f, const Tolerances& tol = {}) {
    const Spectrum spec = dft(f);
    const std::size_t n = f.modulus();
    std::complex<long double> acc(0.0L, 0.0L);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t neg2a = (2 * (n - a)) % n;
        const std::complex<long double> fa(spec.coeff[a].real(), spec.coeff[a].imag());
        const std::complex<long double> fb(spec.coeff[neg2a].real(), spec.coeff[neg2a].imag());
        acc += fa * fa * fb;
    }
    const long double n3 = static_cast<long double>(n) * n * n;
    const double real_part = static_cast<double>(acc.real() / n3);
    const double imag_part = static_cast<double>(acc.imag() / n3);
    ensure(std::fabs(imag_part) < tol.transform,
           "lambda3_spectral: imaginary residue " + std::to_string(imag_part) +
               " exceeds tolerance (transform bug?)");
    return real_part;
}

// Exact progression count over all N^2 pairs (n, d), in integer arithmetic.
inline std::uint64_t lambda3_count(const ResidueSet& s) {
    const std::size_t n_mod = s.modulus();
    const auto mem = s.membership();
    std::uint64_t count = 0;
    for (std::uint32_t n : s.members()) {
        std::size_t i1 = n, i2 = n;
        std::uint64_t acc = 0;
        for (std::size_t d = 0; d < n_mod; ++d) {
            acc += static_cast<std::uint64_t>(mem[i1] & mem[i2]);
            if (++i1 == n_mod) i1 = 0;
            i2 += 2;
            if (i2 >= n_mod) i2 -= n_mod;
        }
        count += acc;
    }
    return count;
}

inline Rational lambda3_exact(const ResidueSet& s) {
    const auto n = static_cast<std::int64_t>(s.modulus());
    return Rational(static_cast<std::int64_t>(lambda3_count(s)), n * n);
}

}  // namespace ap3
