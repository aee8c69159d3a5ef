#pragma once

// JSON schemas for the domain types and reports.  nlohmann::json keeps keys
// sorted, and doubles render shortest-roundtrip, so identical values always
// serialize to identical bytes -- the determinism contract of the CLI.

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "ap3/kernels.hpp"
#include "ap3/oscillation.hpp"
#include "ap3/rational.hpp"
#include "ap3/rho.hpp"
#include "ap3/spectra.hpp"
#include "ap3/transfer.hpp"
#include "ap3/types.hpp"

namespace ap3::io {

using json = nlohmann::json;

inline json to_json(const Rational& r) {
    return json{{"num", r.num()}, {"den", r.den()}, {"decimal", r.to_decimal()}};
}

inline json to_json(const GridFunction& f) {
    return json{{"modulus", f.modulus()},
                {"values", f.values()},
                {"declared_range", {f.declared_range().lo, f.declared_range().hi}}};
}

inline json to_json(const ResidueSet& s) {
    return json{{"modulus", s.modulus()}, {"members", s.members()}};
}

inline json to_json(const Spectrum& s) {
    std::vector<double> re(s.modulus), im(s.modulus);
    for (std::size_t a = 0; a < s.modulus; ++a) {
        re[a] = s.coeff[a].real();
        im[a] = s.coeff[a].imag();
    }
    return json{{"modulus", s.modulus}, {"real", re}, {"imag", im}};
}

inline GridFunction grid_function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("modulus") || !j.contains("values"))
        throw std::invalid_argument("grid function JSON needs {modulus, values}");
    std::vector<double> vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != j.at("modulus").get<std::size_t>())
        throw std::invalid_argument("grid function JSON: values length != modulus");
    if (j.contains("declared_range")) {
        auto r = j.at("declared_range").get<std::vector<double>>();
        if (r.size() != 2) throw std::invalid_argument("declared_range must be [lo, hi]");
        return GridFunction(std::move(vals), Interval{r[0], r[1]});
    }
    return GridFunction::from_values(std::move(vals));
}

inline ResidueSet residue_set_from_json(const json& j) {
    if (!j.is_object() || !j.contains("modulus") || !j.contains("members"))
        throw std::invalid_argument("residue set JSON needs {modulus, members}");
    return ResidueSet(j.at("modulus").get<std::size_t>(),
                      j.at("members").get<std::vector<std::uint32_t>>());
}

inline json to_json(const LargeSpectrumReport& rep) {
    return json{{"threshold_beta", rep.threshold_beta},
                {"large_set", to_json(rep.large_set)},
                {"bound", rep.bound},
                {"cardinality", rep.large_set.size()}};
}

inline json to_json(const SameFourierReport& rep) {
    return json{{"beta", rep.beta},
                {"lambda_gap", rep.lambda_gap},
                {"bound", 12.0 * rep.beta},
                {"bound_holds", rep.bound_holds}};
}

inline json to_json(const WeightConstruction& w) {
    json factors = json::array();
    for (const auto& y : w.kernel_factors) factors.push_back(to_json(dft(y)));
    return json{{"prime_modulus", w.prime_modulus},
                {"epsilon", w.epsilon},
                {"targets", w.targets},
                {"window_halfwidth", w.window_halfwidth},
                {"inverses", w.inverses},
                {"kernel_factor_spectra", factors},
                {"product", to_json(w.product)},
                {"weight", to_json(w.weight)},
                {"weight_spectrum", to_json(w.weight_spectrum)},
                {"v_hat0", w.v_hat0},
                {"v_hat0_lower_bound", w.v_hat0_lower_bound},
                {"v_hat0_bound_holds", w.v_hat0_bound_holds},
                {"spectral_l1_mass", w.spectral_l1_mass},
                {"spectral_l1_bound", w.spectral_l1_bound},
                {"degenerate_window", w.degenerate_window}};
}

inline json to_json(const SpectralSupport& s) {
    return json{{"prime_modulus", s.prime_modulus},
                {"epsilon", s.epsilon},
                {"set_b", to_json(s.set_b)},
                {"set_bprime", to_json(s.set_bprime)},
                {"threshold_b", s.threshold_b},
                {"threshold_bprime", s.threshold_bprime},
                {"m_bound", s.m_bound}};
}

inline json to_json(const SparseTrigPoly& g) {
    json terms = json::array();
    for (const auto& [c, coeff] : g.terms)
        terms.push_back(json{{"frequency", c}, {"re", coeff.real()}, {"im", coeff.imag()}});
    return json{{"modulus_p", g.modulus_p}, {"terms", terms}};
}

inline json to_json(const StageBound& b) {
    return json{{"name", b.name},
                {"value", b.value},
                {"bound", b.bound},
                {"holds", b.holds},
                {"hard", b.hard}};
}

inline json to_json(const TransferResult& tr) {
    json bounds = json::array();
    for (const auto& b : tr.bounds_report) bounds.push_back(to_json(b));
    return json{{"source_modulus", tr.source_modulus},
                {"target_modulus", tr.target_modulus},
                {"epsilon", tr.epsilon},
                {"support", to_json(tr.support)},
                {"dilation", tr.dilation.dilation},
                {"frequencies", tr.dilation.frequencies},
                {"weight", to_json(tr.weight)},
                {"sparse", to_json(tr.sparse)},
                {"final_fn", to_json(tr.final_fn)},
                {"lambda_f", tr.lambda_f},
                {"lambda_g_sparse", tr.lambda_g_sparse},
                {"lambda_g_modp", tr.lambda_g_modp},
                {"lambda_h", tr.lambda_h},
                {"lambda_hr", tr.lambda_hr},
                {"lambda_ell", tr.lambda_ell},
                {"bounds_report", bounds},
                {"spectrum_scan_done", tr.spectrum_scan_done},
                {"soft_violation", tr.soft_violation}};
}

inline json to_json(const SearchStats& s) {
    return json{{"nodes_visited", s.nodes_visited},
                {"iterations", s.iterations},
                {"wall_seconds", s.wall_seconds},
                {"seed", s.seed},
                {"converged", s.converged}};
}

inline json to_json(const RhoResult& r) {
    json j{{"modulus", r.modulus},
           {"upsilon", to_json(r.upsilon)},
           {"mode", r.mode},
           {"value", r.value},
           {"search_stats", to_json(r.stats)}};
    if (r.mode == "exact_sets") j["exact_value"] = to_json(r.exact_value);
    if (r.set_witness) j["witness"] = to_json(*r.set_witness);
    if (r.function_witness) j["witness"] = to_json(*r.function_witness);
    // Wall time varies run to run; the determinism contract excludes it.
    j["search_stats"].erase("wall_seconds");
    return j;
}

inline json to_json(const ConvolutionCounts& c) {
    return json{{"modulus", c.modulus},
                {"source", to_json(c.source)},
                {"counts", c.counts}};
}

inline json to_json(const SpreadReport& rep) {
    return json{{"lhs", rep.lhs},
                {"rhs", rep.rhs},
                {"holds", rep.holds},
                {"max_nonzero_coeff", rep.max_nonzero_coeff},
                {"interval_extremal_value", rep.interval_extremal_value}};
}

inline json to_json(const OscillationReport& rep) {
    return json{{"p", rep.p},
                {"set_a", to_json(rep.set_a)},
                {"sum_over_t", rep.sum_over_t},
                {"lambda_t", to_json(rep.lambda_t)},
                {"spread_rhs_normalized", rep.spread_rhs_normalized},
                {"spread_holds", rep.spread_holds},
                {"lambda_a", to_json(rep.lambda_a)},
                {"above_023", rep.above_023}};
}

}  // namespace ap3::io
