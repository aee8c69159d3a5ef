#pragma once

// Discrete Fourier transforms on Z_N for arbitrary N.
//
// Sign convention used throughout the library:
//     forward   F(a) = sum_n x(n) e^{+2 pi i a n / N}
//     inverse   x(n) = N^{-1} sum_a F(a) e^{-2 pi i a n / N}
// Power-of-two sizes run through an iterative radix-2 transform; every other
// size goes through Bluestein's chirp-z reduction to a power-of-two cyclic
// convolution.  Chirp phases are built from n^2 mod 2N in integer arithmetic
// so they stay exact for large n.

#include <complex>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ap3/common.hpp"

namespace ap3::fft {

using cplx = std::complex<double>;

namespace detail {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Pow2Tables {
    std::size_t size = 0;
    std::vector<std::uint32_t> bitrev;
    std::vector<cplx> roots;  // roots[j] = e^{+2 pi i j / size}, j < size/2
};

inline std::shared_ptr<const Pow2Tables> pow2_tables(std::size_t m) {
    thread_local std::unordered_map<std::size_t, std::shared_ptr<const Pow2Tables>> cache;
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    auto t = std::make_shared<Pow2Tables>();
    t->size = m;
    t->bitrev.resize(m);
    std::uint32_t bits = 0;
    while ((std::size_t{1} << bits) < m) ++bits;
    for (std::size_t i = 0; i < m; ++i) {
        std::uint32_t r = 0;
        for (std::uint32_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b)) r |= 1u << (bits - 1 - b);
        t->bitrev[i] = r;
    }
    t->roots.resize(m / 2);
    for (std::size_t j = 0; j < m / 2; ++j) {
        double ang = kTwoPi * static_cast<double>(j) / static_cast<double>(m);
        t->roots[j] = cplx(std::cos(ang), std::sin(ang));
    }
    cache.emplace(m, t);
    return t;
}

// In-place radix-2; sign +1 uses e^{+2 pi i}, sign -1 its conjugate.
inline void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t m = a.size();
    if (m <= 1) return;
    auto tables = pow2_tables(m);
    const auto& rev = tables->bitrev;
    for (std::size_t i = 0; i < m; ++i)
        if (i < rev[i]) std::swap(a[i], a[rev[i]]);
    for (std::size_t len = 2; len <= m; len <<= 1) {
        std::size_t stride = m / len;
        for (std::size_t blk = 0; blk < m; blk += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx w = tables->roots[j * stride];
                if (sign < 0) w = std::conj(w);
                cplx u = a[blk + j];
                cplx v = a[blk + j + len / 2] * w;
                a[blk + j] = u + v;
                a[blk + j + len / 2] = u - v;
            }
        }
    }
}

struct BluesteinPlan {
    std::size_t n = 0;
    std::size_t m = 0;              // padded power of two, >= 2n-1
    std::vector<cplx> chirp;        // chirp[k] = e^{+pi i k^2 / n}
    std::vector<cplx> kernel_fft;   // FFT (sign +1) of the conjugate-chirp kernel
};

inline std::shared_ptr<const BluesteinPlan> bluestein_plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::shared_ptr<const BluesteinPlan>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto p = std::make_shared<BluesteinPlan>();
    p->n = n;
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    p->m = m;
    p->chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        double ang = kTwoPi / 2.0 * static_cast<double>(k2) / static_cast<double>(n);
        p->chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> kernel(m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx v = std::conj(p->chirp[k]);
        kernel[k] = v;
        if (k > 0) kernel[m - k] = v;
    }
    fft_pow2(kernel, +1);
    p->kernel_fft = std::move(kernel);
    cache.emplace(n, p);
    return p;
}

// Arbitrary-size transform with sign +1 via Bluestein.
inline std::vector<cplx> bluestein_plus(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    auto plan = bluestein_plan(n);
    std::vector<cplx> buf(plan->m, cplx(0, 0));
    for (std::size_t k = 0; k < n; ++k) buf[k] = x[k] * plan->chirp[k];
    fft_pow2(buf, +1);
    for (std::size_t k = 0; k < plan->m; ++k) buf[k] *= plan->kernel_fft[k];
    fft_pow2(buf, -1);
    double inv_m = 1.0 / static_cast<double>(plan->m);
    std::vector<cplx> out(n);
    for (std::size_t a = 0; a < n; ++a) out[a] = buf[a] * inv_m * plan->chirp[a];
    return out;
}

}  // namespace detail

// Forward/backward transform of arbitrary size; sign must be +1 or -1.
// No normalization is applied (the caller divides by N for the inverse).
inline std::vector<cplx> transform(std::vector<cplx> x, int sign) {
    require(sign == 1 || sign == -1, "fft::transform: sign must be +1 or -1");
    if (x.size() <= 1) return x;
    if (detail::is_pow2(x.size())) {
        detail::fft_pow2(x, sign);
        return x;
    }
    if (sign == 1) return detail::bluestein_plus(x);
    for (auto& v : x) v = std::conj(v);
    auto y = detail::bluestein_plus(x);
    for (auto& v : y) v = std::conj(v);
    return y;
}

inline std::vector<cplx> transform_real(const std::vector<double>& x, int sign) {
    std::vector<cplx> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = cplx(x[i], 0.0);
    return transform(std::move(c), sign);
}

}  // namespace ap3::fft
