#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ap3/common.hpp"

namespace ap3 {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool within(const Interval& outer, double tol = 0.0) const {
        return lo >= outer.lo - tol && hi <= outer.hi + tol;
    }
};

// A map Z_N -> R together with the closed interval its values are promised
// to lie in.  The promise is checked on construction.
class GridFunction {
public:
    // Inert placeholder (modulus 0) so result structs can default-construct;
    // every value-carrying constructor validates the invariants.
    GridFunction() : range_{0.0, 0.0} {}

    GridFunction(std::vector<double> values, Interval declared_range)
        : values_(std::move(values)), range_(declared_range) {
        require(values_.size() >= 2, "GridFunction: modulus must be >= 2");
        require(range_.lo <= range_.hi, "GridFunction: empty declared range");
        for (double v : values_)
            require(range_.contains(v), "GridFunction: value outside declared range");
    }

    static GridFunction constant(std::size_t n, double c) {
        return GridFunction(std::vector<double>(n, c), Interval{c, c});
    }

    // Declared range computed from the actual values.
    static GridFunction from_values(std::vector<double> values) {
        auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        Interval r{*lo, *hi};
        return GridFunction(std::move(values), r);
    }

    std::size_t modulus() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t n) const { return values_[n]; }
    const Interval& declared_range() const { return range_; }

private:
    std::vector<double> values_;
    Interval range_;
};

// Fourier coefficients of a function on Z_N, indexed by a in {0,...,N-1}.
struct Spectrum {
    std::size_t modulus = 0;
    std::vector<std::complex<double>> coeff;

    const std::complex<double>& operator[](std::size_t a) const { return coeff[a]; }
    // Coefficient at a signed frequency, reduced mod N.
    const std::complex<double>& at_signed(std::int64_t a) const {
        return coeff[mod_reduce(a, modulus)];
    }
};

// A subset of Z_N held as a sorted list of distinct residues.
class ResidueSet {
public:
    ResidueSet() : modulus_(0) {}  // inert placeholder, as for GridFunction

    ResidueSet(std::size_t modulus, std::vector<std::uint32_t> members)
        : modulus_(modulus), members_(std::move(members)) {
        require(modulus_ >= 1, "ResidueSet: modulus must be positive");
        std::sort(members_.begin(), members_.end());
        for (std::size_t i = 0; i < members_.size(); ++i) {
            require(members_[i] < modulus_, "ResidueSet: member out of range");
            require(i == 0 || members_[i] != members_[i - 1], "ResidueSet: duplicate member");
        }
    }

    static ResidueSet full(std::size_t n) {
        std::vector<std::uint32_t> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<std::uint32_t>(i);
        return ResidueSet(n, std::move(m));
    }

    static ResidueSet empty(std::size_t n) { return ResidueSet(n, {}); }

    std::size_t modulus() const { return modulus_; }
    const std::vector<std::uint32_t>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    double density() const {
        return static_cast<double>(members_.size()) / static_cast<double>(modulus_);
    }

    std::vector<std::uint8_t> membership() const {
        std::vector<std::uint8_t> m(modulus_, 0);
        for (auto x : members_) m[x] = 1;
        return m;
    }

    bool contains(std::uint64_t x) const {
        return std::binary_search(members_.begin(), members_.end(),
                                  static_cast<std::uint32_t>(x % modulus_));
    }

    ResidueSet complement() const {
        auto mem = membership();
        std::vector<std::uint32_t> out;
        out.reserve(modulus_ - members_.size());
        for (std::size_t i = 0; i < modulus_; ++i)
            if (!mem[i]) out.push_back(static_cast<std::uint32_t>(i));
        return ResidueSet(modulus_, std::move(out));
    }

    // The dilate k*S = {k s : s in S}; requires gcd(k, N) = 1 so that the map
    // is a permutation of Z_N.
    ResidueSet dilate(std::uint64_t k) const {
        require(std::gcd(k % modulus_, modulus_) == 1,
                "ResidueSet::dilate: dilation factor not invertible");
        std::vector<std::uint32_t> out;
        out.reserve(members_.size());
        for (auto x : members_)
            out.push_back(static_cast<std::uint32_t>(mul_mod(k % modulus_, x, modulus_)));
        return ResidueSet(modulus_, std::move(out));
    }

    GridFunction indicator() const {
        std::vector<double> v(modulus_, 0.0);
        for (auto x : members_) v[x] = 1.0;
        return GridFunction(std::move(v), Interval{0.0, 1.0});
    }

    friend bool operator==(const ResidueSet& a, const ResidueSet& b) {
        return a.modulus_ == b.modulus_ && a.members_ == b.members_;
    }

private:
    std::size_t modulus_;
    std::vector<std::uint32_t> members_;
};

}  // namespace ap3
