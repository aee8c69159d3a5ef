#pragma once

// Large-spectrum extraction and the Fourier-uniform stability bound for
// Lambda3: functions into [-2,2] whose transforms differ by less than beta*N
// in sup norm have Lambda3 values within 12*beta of each other.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ap3/common.hpp"
#include "ap3/types.hpp"
#include "ap3/zn_core.hpp"

namespace ap3 {

struct LargeSpectrumReport {
    double threshold_beta = 0.0;
    ResidueSet large_set;   // frequencies a with |F(a)| >= beta * F(0)
    double bound = 0.0;     // Parseval cardinality bound (beta F(0))^{-2} N^2
};

// Frequencies where the transform of h : Z_N -> [0,1] is at least beta*F(0)
// in magnitude.  The Parseval bound |set| <= (beta F(0))^{-2} N^2 is checked
// before returning.
inline LargeSpectrumReport large_spectrum(const GridFunction& h, double beta) {
    require(beta > 0.0 && beta < 1.0, "large_spectrum: beta must lie in (0,1)");
    require(h.declared_range().within(Interval{0.0, 1.0}),
            "large_spectrum: function must map into [0,1]");
    const Spectrum spec = dft(h);
    const double mass = spec.coeff[0].real();
    require(mass > 0.0, "large_spectrum: degenerate function (zero mass)");

    const double cut = beta * mass;
    std::vector<std::uint32_t> members;
    for (std::size_t a = 0; a < h.modulus(); ++a)
        if (std::abs(spec.coeff[a]) >= cut) members.push_back(static_cast<std::uint32_t>(a));

    const double n = static_cast<double>(h.modulus());
    const double bound = (n * n) / (cut * cut);
    LargeSpectrumReport rep{beta, ResidueSet(h.modulus(), std::move(members)), bound};
    ensure(static_cast<double>(rep.large_set.size()) <= bound,
           "large_spectrum: cardinality bound violated");
    return rep;
}

// max_a |F(a) - G(a)| -- the raw maximum over coefficients, not the
// expectation-normalized norm.
inline double fourier_distance(const GridFunction& f, const GridFunction& g) {
    require(f.modulus() == g.modulus(), "fourier_distance: modulus mismatch");
    const Spectrum sf = dft(f), sg = dft(g);
    double best = 0.0;
    for (std::size_t a = 0; a < f.modulus(); ++a)
        best = std::max(best, std::abs(sf.coeff[a] - sg.coeff[a]));
    return best;
}

struct SameFourierReport {
    double beta = 0.0;        // fourier_distance / N
    double lambda_gap = 0.0;  // |Lambda3(f) - Lambda3(g)|
    bool bound_holds = false;
};

// Checks |Lambda3(f) - Lambda3(g)| < 12 beta for f, g into [-2,2], where
// beta*N is the sup distance of the transforms.  beta = 0 means identical
// transforms; the strict inequality is then read as gap = 0.
inline SameFourierReport check_same_fourier_bound(const GridFunction& f,
                                                  const GridFunction& g) {
    require(f.modulus() == g.modulus(), "check_same_fourier_bound: modulus mismatch");
    const Interval box{-2.0, 2.0};
    require(f.declared_range().within(box) && g.declared_range().within(box),
            "check_same_fourier_bound: declared range must lie within [-2,2]");

    SameFourierReport rep;
    rep.beta = fourier_distance(f, g) / static_cast<double>(f.modulus());
    rep.lambda_gap = std::fabs(lambda3_direct(f) - lambda3_direct(g));
    rep.bound_holds = rep.beta == 0.0 ? rep.lambda_gap == 0.0
                                      : rep.lambda_gap < 12.0 * rep.beta;
    return rep;
}

}  // namespace ap3
