// ap3 -- progression-density toolkit for Z_N.
//
// Subcommands: lambda3, rho, transfer, oscillate, kernel, verify, cache.
// Exit codes: 0 pass, 1 hard failure, 2 usage/parse error, 3 soft-bound
// flag, 4 internal cross-check failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ap3/cache.hpp"
#include "ap3/common.hpp"
#include "ap3/io.hpp"
#include "ap3/kernels.hpp"
#include "ap3/oscillation.hpp"
#include "ap3/rho.hpp"
#include "ap3/transfer.hpp"
#include "ap3/verify.hpp"
#include "ap3/zn_core.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    bool json_out = false;
    double tol = 1e-9;
};

constexpr int kExitPass = 0;
constexpr int kExitHardFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSoftFlag = 3;
constexpr int kExitCrossCheck = 4;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    json j;
    in >> j;
    return j;
}

ap3::Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return ap3::Rational(std::stoll(text), 1);
        return ap3::Rational(std::stoll(text.substr(0, slash)),
                             std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational: " + text);
    }
}

void emit(const GlobalOpts& g, const json& result, const std::string& human) {
    if (g.json_out)
        std::cout << result.dump() << "\n";
    else
        std::cout << human;
}

int cmd_lambda3(const GlobalOpts& g, const std::string& input, bool exact,
                bool nontrivial) {
    const json j = load_json_file(input);
    json result;
    std::ostringstream human;

    if (j.contains("members")) {
        const auto s = ap3::io::residue_set_from_json(j);
        const auto lam = ap3::lambda3_exact(s);
        const double direct = ap3::lambda3_direct(s.indicator());
        const double spectral = ap3::lambda3_spectral(s.indicator());
        const double residual = std::fabs(direct - spectral);
        const double exact_gap = std::fabs(lam.to_double() - direct);

        result["lambda3"] = ap3::io::to_json(lam);
        result["cross_check_residual"] = residual;
        if (exact)
            human << "lambda3 = " << lam.to_string() << " (" << lam.to_decimal() << ")\n";
        else
            human << "lambda3 = " << lam.to_decimal() << "\n";
        if (nontrivial) {
            const ap3::Rational nt = lam - ap3::Rational(static_cast<std::int64_t>(s.size()),
                                                         static_cast<std::int64_t>(s.modulus()) *
                                                             static_cast<std::int64_t>(s.modulus()));
            result["lambda3_nontrivial"] = ap3::io::to_json(nt);
            human << "nontrivial-only = " << nt.to_string() << "\n";
        }
        human << "cross-check residual = " << residual << "\n";
        emit(g, result, human.str());
        if (residual >= g.tol || exact_gap >= 1e-12) return kExitCrossCheck;
        return kExitPass;
    }

    const auto f = ap3::io::grid_function_from_json(j);
    const double direct = ap3::lambda3_direct(f);
    const double spectral = ap3::lambda3_spectral(f);
    const double residual = std::fabs(direct - spectral);
    result["lambda3"] = direct;
    result["cross_check_residual"] = residual;
    human << "lambda3 = " << direct << "\n";
    if (nontrivial) {
        long double cubes = 0.0L;
        for (double v : f.values()) cubes += static_cast<long double>(v) * v * v;
        const double nt = direct - static_cast<double>(cubes) /
                                       (static_cast<double>(f.modulus()) * f.modulus());
        result["lambda3_nontrivial"] = nt;
        human << "nontrivial-only = " << nt << "\n";
    }
    human << "cross-check residual = " << residual << "\n";
    emit(g, result, human.str());
    return residual < g.tol ? kExitPass : kExitCrossCheck;
}

int cmd_rho(const GlobalOpts& g, std::size_t n, const std::string& upsilon_text,
            const std::string& mode, int restarts, std::uint64_t budget, bool canonical) {
    const auto upsilon = parse_rational(upsilon_text);
    json params{{"command", "rho"},      {"N", n},
                {"upsilon", upsilon_text}, {"mode", mode},
                {"restarts", restarts},  {"budget", budget},
                {"canonical", canonical}, {"seed", g.seed}};

    ap3::RhoResult res;
    if (mode == "exact") {
        res = ap3::rho_exact_sets(n, upsilon, budget, canonical);
    } else if (mode == "descent") {
        res = ap3::rho_descent(n, upsilon, restarts, g.seed);
    } else {
        throw std::invalid_argument("rho: mode must be exact or descent");
    }
    const json result = ap3::io::to_json(res);
    const std::string hash = ap3::cache::append_record("rho", params, g.seed, result);

    std::ostringstream human;
    human << "rho(" << upsilon.to_string() << ", " << n << ") [" << res.mode
          << "] = " << res.value;
    if (res.mode == "exact_sets") human << " = " << res.exact_value.to_string();
    human << "\ncached as " << hash << "\n";
    emit(g, result, human.str());
    return kExitPass;
}

int cmd_transfer(const GlobalOpts& g, std::uint64_t p, std::uint64_t r, double eps,
                 const std::string& input, bool allow_small_r) {
    const json j = load_json_file(input);
    const auto f = ap3::io::grid_function_from_json(j);
    ap3::require(f.modulus() == p, "transfer: --p does not match the input modulus");

    json params{{"command", "transfer"}, {"p", p},   {"r", r},
                {"eps", eps},            {"input", j}, {"allow_small_r", allow_small_r}};
    const auto tr = ap3::transfer_pipeline(f, r, eps, allow_small_r);
    const json result = ap3::io::to_json(tr);
    const std::string hash = ap3::cache::append_record("transfer", params, g.seed, result);

    std::ostringstream human;
    human << "transfer " << p << " -> " << r << " at eps=" << eps << "\n"
          << "  lambda(f) = " << tr.lambda_f << ", lambda(ell) = " << tr.lambda_ell << "\n";
    for (const auto& b : tr.bounds_report)
        human << "  [" << (b.holds ? "ok" : "FLAG") << "] " << b.name << " = " << b.value
              << " vs " << b.bound << (b.hard ? " (hard)" : " (soft)") << "\n";
    human << "cached as " << hash << "\n";
    emit(g, result, human.str());
    return tr.soft_violation ? kExitSoftFlag : kExitPass;
}

int cmd_kernel(const GlobalOpts& g, std::uint64_t p, double eps,
               const std::string& targets_text, const std::string& dump_path) {
    std::vector<std::uint32_t> targets;
    std::stringstream ss(targets_text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) targets.push_back(static_cast<std::uint32_t>(std::stoul(item)));

    json params{{"command", "kernel"}, {"p", p}, {"eps", eps}, {"targets", targets}};
    const auto w = ap3::build_weight(p, targets, eps);
    const json result = ap3::io::to_json(w);
    ap3::cache::append_record("kernel", params, g.seed, result);
    if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        out << result.dump(2) << "\n";
    }

    std::ostringstream human;
    human << "weight on Z_" << p << " (eps=" << eps << ", t=" << targets.size()
          << ", L=" << w.window_halfwidth << ")\n"
          << "  mu_hat(0)           = " << w.weight_spectrum.coeff[0].real() << "\n";
    for (auto b : targets)
        human << "  mu_hat(" << b << ")  = " << w.weight_spectrum.coeff[b].real()
              << "  (|.-1| < " << eps * eps << ")\n";
    human << "  sum |mu_hat|        = " << w.spectral_l1_mass << " <= "
          << w.spectral_l1_bound << "\n";
    emit(g, result, human.str());
    return kExitPass;
}

int cmd_oscillate(const GlobalOpts& g, std::uint64_t p, const std::string& input,
                  bool table, std::uint64_t odd_max, const std::string& upsilon_text,
                  std::uint64_t budget, bool csv) {
    if (table) {
        const auto rows = ap3::oscillation_table(odd_max, parse_rational(upsilon_text),
                                                 budget, g.seed);
        json result = json::array();
        std::ostringstream human;
        if (csv) human << "N,class,mode,value,value_exact\n";
        for (const auto& row : rows) {
            result.push_back(json{{"N", row.n},
                                  {"class", row.klass},
                                  {"mode", row.mode},
                                  {"value", row.value},
                                  {"value_exact", row.value_exact}});
            if (csv)
                human << row.n << "," << row.klass << "," << row.mode << "," << row.value
                      << "," << row.value_exact << "\n";
            else
                human << "N=" << row.n << " [" << row.klass << "] " << row.mode << " "
                      << row.value << (row.value_exact.empty() ? "" : " = " + row.value_exact)
                      << "\n";
        }
        json params{{"command", "oscillate-table"}, {"odd_max", odd_max},
                    {"upsilon", upsilon_text},      {"budget", budget},
                    {"seed", g.seed}};
        ap3::cache::append_record("oscillate", params, g.seed, result);
        emit(g, result, human.str());
        return kExitPass;
    }

    std::optional<ap3::ResidueSet> a;
    json input_json;
    if (!input.empty()) {
        input_json = load_json_file(input);
        a = ap3::io::residue_set_from_json(input_json);
    }
    json params{{"command", "oscillate"}, {"p", p}, {"seed", g.seed}, {"input", input_json}};
    const auto rep = ap3::oscillation_experiment(p, a, g.seed);
    const json result = ap3::io::to_json(rep);
    ap3::cache::append_record("oscillate", params, g.seed, result);

    std::ostringstream human;
    human << "p = " << p << " (1 mod 3), |A| = " << rep.set_a.size() << "\n"
          << "  sum_{n in T} r(n)   = " << rep.sum_over_t << "\n"
          << "  lambda3(T)          = " << rep.lambda_t.to_string() << " = "
          << rep.lambda_t.to_decimal() << "\n"
          << "  spread bound        = " << rep.spread_rhs_normalized
          << (rep.spread_holds ? "  (holds)" : "  (EXCEEDED)") << "\n"
          << "  lambda3(A)          = " << rep.lambda_a.to_decimal()
          << (rep.above_023 ? "  > 0.23" : "  <= 0.23") << "\n";
    emit(g, result, human.str());
    return kExitPass;
}

int cmd_verify(const GlobalOpts& g, const std::string& suite, std::uint64_t trials_opt) {
    std::vector<std::string> names;
    if (suite == "all") {
        for (const auto& [name, entry] : ap3::verify::suites()) names.push_back(name);
    } else {
        ap3::require(ap3::verify::suites().count(suite) == 1,
                     "verify: unknown suite '" + suite + "'");
        names.push_back(suite);
    }

    json summary = json::array();
    std::uint64_t hard = 0, soft = 0;
    std::ostringstream human;
    for (const auto& name : names) {
        const auto& [fn, default_trials] = ap3::verify::suites().at(name);
        const std::uint64_t trials = trials_opt > 0 ? trials_opt : default_trials;
        const auto res = fn(trials, g.seed);
        hard += res.hard_failures;
        soft += res.soft_flags;
        summary.push_back(json{{"suite", res.name},
                               {"trials", res.trials},
                               {"hard_failures", res.hard_failures},
                               {"soft_flags", res.soft_flags},
                               {"notes", res.notes}});
        human << (res.passed() ? "[pass] " : "[FAIL] ") << res.name << ": " << res.trials
              << " trials, " << res.hard_failures << " hard failures, " << res.soft_flags
              << " soft flags\n";
        for (const auto& note : res.notes) human << "    " << note << "\n";
    }
    json params{{"command", "verify"}, {"suite", suite},
                {"trials", trials_opt}, {"seed", g.seed}};
    const std::string hash = ap3::cache::append_record("verify", params, g.seed, summary);
    std::filesystem::create_directories(ap3::cache::cache_dir());
    std::ofstream out(ap3::cache::cache_dir() + "/verify_" + suite + "_" + hash + ".json");
    out << summary.dump(2) << "\n";

    emit(g, summary, human.str());
    if (hard > 0) return kExitHardFail;
    return soft > 0 ? kExitSoftFlag : kExitPass;
}

int cmd_cache(const GlobalOpts& g, const std::string& action, const std::string& hash) {
    if (action == "clear") {
        ap3::cache::clear();
        emit(g, json{{"cleared", true}}, "cache cleared\n");
        return kExitPass;
    }
    if (action == "list") {
        const auto records = ap3::cache::list_records();
        json result = json::array();
        std::ostringstream human;
        for (const auto& rec : records) {
            result.push_back(json{{"command", rec.value("command", "")},
                                  {"param_hash", rec.value("param_hash", "")},
                                  {"timestamp", rec.value("timestamp", "")}});
            human << rec.value("param_hash", "") << "  " << rec.value("command", "")
                  << "  " << rec.value("timestamp", "") << "\n";
        }
        emit(g, result, human.str());
        return kExitPass;
    }
    if (action == "show") {
        const auto rec = ap3::cache::find_record(hash);
        if (!rec) {
            std::cerr << "cache: no record with hash " << hash << "\n";
            return kExitUsage;
        }
        std::cout << rec->dump(2) << "\n";
        return kExitPass;
    }
    std::cerr << "cache: action must be list, clear, or show\n";
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"three-term progression density toolkit on Z_N"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master 64-bit seed");
    app.add_option("--threads", g.threads, "worker cap for parallel sweeps")
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", g.json_out, "machine-readable output on stdout");
    app.add_option("--tol", g.tol, "transform-identity tolerance");

    // lambda3
    auto* sc_lambda3 = app.add_subcommand("lambda3", "evaluate the progression density");
    std::string l3_input;
    bool l3_exact = false, l3_nontrivial = false;
    sc_lambda3->add_option("--input", l3_input, "GridFunction or ResidueSet JSON")
        ->required();
    sc_lambda3->add_flag("--exact", l3_exact, "print the exact rational (set input)");
    sc_lambda3->add_flag("--nontrivial", l3_nontrivial,
                         "also print the density excluding d = 0");

    // rho
    auto* sc_rho = app.add_subcommand("rho", "minimize the progression density");
    std::size_t rho_n = 9;
    std::string rho_upsilon = "2/3", rho_mode = "exact";
    int rho_restarts = 8;
    std::uint64_t rho_budget = 100000000ull;
    bool rho_canonical = false;
    sc_rho->add_option("--N", rho_n, "modulus")->required();
    sc_rho->add_option("--upsilon", rho_upsilon, "density as a rational, e.g. 2/3")
        ->required();
    sc_rho->add_option("--mode", rho_mode, "exact | descent")->required();
    sc_rho->add_option("--restarts", rho_restarts, "descent restarts");
    sc_rho->add_option("--budget", rho_budget, "subset budget for exact mode");
    sc_rho->add_flag("--canonical", rho_canonical, "prune to affine-canonical subsets");

    // transfer
    auto* sc_transfer = app.add_subcommand("transfer", "run the density-transfer pipeline");
    std::uint64_t tr_p = 11, tr_r = 1361;
    double tr_eps = 0.3;
    std::string tr_input;
    bool tr_allow_small_r = false;
    sc_transfer->add_option("--p", tr_p, "source prime")->required();
    sc_transfer->add_option("--r", tr_r, "target prime (> p^3)")->required();
    sc_transfer->add_option("--eps", tr_eps, "accuracy parameter")->required();
    sc_transfer->add_option("--input", tr_input, "GridFunction JSON on Z_p")->required();
    sc_transfer->add_flag("--allow-small-r", tr_allow_small_r, "waive the r > p^3 check");

    // oscillate
    auto* sc_osc = app.add_subcommand("oscillate", "prime-case oscillation experiments");
    std::uint64_t osc_p = 103, osc_odd_max = 35, osc_budget = 1000000ull;
    std::string osc_input, osc_upsilon = "2/3";
    bool osc_table = false, osc_csv = false;
    sc_osc->add_option("--p", osc_p, "prime = 1 mod 3");
    sc_osc->add_option("--input", osc_input, "optional ResidueSet JSON for A");
    sc_osc->add_flag("--table", osc_table, "emit a table over odd N");
    sc_osc->add_option("--odd-max", osc_odd_max, "largest odd N for the table");
    sc_osc->add_option("--upsilon", osc_upsilon, "table density (rational)");
    sc_osc->add_option("--budget", osc_budget, "exact-mode subset budget for the table");
    sc_osc->add_flag("--csv", osc_csv, "CSV table output");

    // kernel
    auto* sc_kernel = app.add_subcommand("kernel", "build a smoothing weight");
    std::uint64_t kr_p = 101;
    double kr_eps = 0.6;
    std::string kr_targets = "1", kr_dump;
    sc_kernel->add_option("--p", kr_p, "prime modulus")->required();
    sc_kernel->add_option("--eps", kr_eps, "accuracy parameter")->required();
    sc_kernel->add_option("--targets", kr_targets, "comma-separated nonzero residues")
        ->required();
    sc_kernel->add_option("--dump-kernel", kr_dump, "write the full construction JSON");

    // verify
    auto* sc_verify = app.add_subcommand("verify", "run a property suite");
    std::string vf_suite;
    std::uint64_t vf_trials = 0;
    sc_verify
        ->add_option("--suite,suite", vf_suite,
                     "parseval | large-values | same-fourier | flatten | measure-prop | "
                     "spread | complement | all")
        ->required();
    sc_verify->add_option("--trials", vf_trials, "trial count (0 = suite default)");

    // cache
    auto* sc_cache = app.add_subcommand("cache", "inspect the result cache");
    std::string ca_action, ca_hash;
    sc_cache->add_option("--action,action", ca_action, "list | clear | show")->required();
    sc_cache->add_option("--hash,hash", ca_hash, "record hash for show");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    ap3::max_threads() = g.threads;
    try {
        if (sc_lambda3->parsed()) return cmd_lambda3(g, l3_input, l3_exact, l3_nontrivial);
        if (sc_rho->parsed())
            return cmd_rho(g, rho_n, rho_upsilon, rho_mode, rho_restarts, rho_budget,
                           rho_canonical);
        if (sc_transfer->parsed())
            return cmd_transfer(g, tr_p, tr_r, tr_eps, tr_input, tr_allow_small_r);
        if (sc_osc->parsed())
            return cmd_oscillate(g, osc_p, osc_input, osc_table, osc_odd_max, osc_upsilon,
                                 osc_budget, osc_csv);
        if (sc_kernel->parsed()) return cmd_kernel(g, kr_p, kr_eps, kr_targets, kr_dump);
        if (sc_verify->parsed()) return cmd_verify(g, vf_suite, vf_trials);
        if (sc_cache->parsed()) return cmd_cache(g, ca_action, ca_hash);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "cross-check failure: " << e.what() << "\n";
        return kExitCrossCheck;
    }
    return kExitUsage;
}
