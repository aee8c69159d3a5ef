#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ap3 {

inline constexpr const char* kVersion = "0.1.0";

// Numerical tolerances used by the identity checks.  The defaults match the
// library-wide contract: 1e-9 absolute for transform identities, 1e-12 for
// rational/float cross-checks.
struct Tolerances {
    double transform = 1e-9;
    double cross_check = 1e-12;
};

// Worker cap for the few parallel sweeps (descent restarts); 1 = serial.
// Results are merged in index order, so the count never changes output.
inline int& max_threads() {
    static int value = 1;
    return value;
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

// Internal consistency failure (a cross-check between two computation paths
// disagreed); distinct from bad input.
inline void ensure(bool cond, const std::string& what) {
    if (!cond) throw std::runtime_error(what);
}

// ---- modular arithmetic helpers ------------------------------------------

inline std::uint64_t mod_reduce(std::int64_t x, std::uint64_t n) {
    std::int64_t m = static_cast<std::int64_t>(n);
    std::int64_t r = x % m;
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

// Representative of x mod n in (-n/2, n/2].
inline std::int64_t signed_residue(std::int64_t x, std::uint64_t n) {
    std::int64_t r = static_cast<std::int64_t>(mod_reduce(x, n));
    std::int64_t m = static_cast<std::int64_t>(n);
    return 2 * r > m ? r - m : r;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % n);
}

// Extended Euclid; throws if gcd(a, n) != 1.
inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t n) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(n);
    std::int64_t new_r = static_cast<std::int64_t>(a % n);
    while (new_r != 0) {
        std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    require(r == 1, "mod_inverse: argument not invertible mod " + std::to_string(n));
    if (t < 0) t += static_cast<std::int64_t>(n);
    return static_cast<std::uint64_t>(t);
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull}) {
        if (n == d) return true;
        if (n % d == 0) return false;
    }
    for (std::uint64_t d = 29; d * d <= n; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

// C(n, k) capped at `cap` (returns cap+1 on overflow past the cap).
inline std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(acc);
}

}  // namespace ap3
