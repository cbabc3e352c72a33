#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qbailey/bailey.hpp"
#include "qbailey/identities.hpp"
#include "qbailey/sweep.hpp"

using namespace qbailey;

namespace {

void print_series(const LaurentSeries& s, bool as_json) {
    if (as_json) {
        std::cout << s.to_json() << "\n";
        return;
    }
    std::cout << "exponent_num,denom,coefficient\n";
    for (size_t j = 0; j < s.coeffs().size(); ++j) {
        if (s.coeffs()[j] == 0) continue;
        std::cout << (s.lo() + static_cast<long>(j)) << "," << s.denom() << ","
                  << s.coeffs()[j].get_str() << "\n";
    }
}

std::map<std::string, std::string> keyvals(const std::vector<std::string>& args) {
    std::map<std::string, std::string> kv;
    for (const auto& a : args) {
        size_t eq = a.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("eval: expected key=value, got '" + a + "'");
        kv[a.substr(0, eq)] = a.substr(eq + 1);
    }
    return kv;
}

long get_long(const std::map<std::string, std::string>& kv, const std::string& key,
              std::optional<long> fallback = std::nullopt) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (fallback) return *fallback;
        throw std::invalid_argument("eval: missing parameter '" + key + "'");
    }
    return std::stol(it->second);
}

Partition get_partition(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end() || it->second.empty()) return Partition{};
    std::vector<long> parts;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) parts.push_back(std::stol(item));
    return Partition(parts);
}

int run_eval(const std::string& name, const std::vector<std::string>& rest, bool as_json) {
    auto kv = keyvals(rest);
    long order = get_long(kv, "order", 20);
    if (name == "gauss-binom") {
        print_series(gauss_binom(get_long(kv, "top"), get_long(kv, "bottom")), as_json);
    } else if (name == "gauss-binom-primed") {
        print_series(gauss_binom_primed(get_long(kv, "top"), get_long(kv, "bottom")), as_json);
    } else if (name == "pochhammer") {
        SeriesContext ctx{1, order + 1};
        std::optional<long> len;
        if (kv.count("len")) len = get_long(kv, "len");
        PochhammerSpec spec{Rat(get_long(kv, "c", 1L)), Rat(get_long(kv, "step", 1L)), len,
                            get_long(kv, "negated", 0L) != 0};
        print_series(pochhammer(spec, ctx), as_json);
    } else if (name == "residue-product") {
        SeriesContext ctx{1, order + 1};
        ResidueCondition cond;
        cond.modulus = get_long(kv, "mod");
        std::stringstream ss(kv.count("exclude") ? kv.at("exclude") : "");
        std::string item;
        while (std::getline(ss, item, ';'))
            if (!item.empty()) cond.excluded.push_back(std::stol(item));
        print_series(residue_product({cond}, ctx), as_json);
    } else if (name == "limit-shifted-factorial") {
        print_series(limit_shifted_factorial(get_long(kv, "n")), as_json);
    } else if (name == "hl-delta" || name == "hl-gamma") {
        long N = get_long(kv, "N");
        SeriesContext ctx{2 * N, (order + 2) * 2 * N};
        HLParams p{get_long(kv, "M"),
                   SigmaContext(N, get_long(kv, "l", 0L), get_partition(kv, "lambda"),
                                static_cast<int>(get_long(kv, "sigma", 0L)))};
        long L = get_long(kv, "L"), k = get_long(kv, "k", 0L);
        print_series(name == "hl-delta" ? hl_Delta(p, L, k, ctx).truncated(order * 2 * N)
                                        : hl_Gamma(p, L, k, ctx).truncated(order * 2 * N),
                     as_json);
    } else if (name == "string-function") {
        long N = get_long(kv, "N");
        long D = 4 * N * (N + 2);
        SeriesContext ctx{D, (order + 1) * D};
        print_series(string_function({N, get_long(kv, "l"), get_long(kv, "m")}, ctx), as_json);
    } else if (name == "ag-sum" || name == "ag-product") {
        SeriesContext ctx{1, order + 1};
        long k = get_long(kv, "k"), i = get_long(kv, "i"), delta = get_long(kv, "delta", 1L);
        print_series(name == "ag-sum" ? ag_bressoud_sum(k, i, delta, ctx)
                                      : ag_bressoud_product(k, i, delta, ctx),
                     as_json);
    } else if (name == "gg-sum" || name == "gg-product") {
        SeriesContext ctx{1, order + 1};
        long k = get_long(kv, "k"), i = get_long(kv, "i");
        GGVariant v = kv.count("variant") && kv.at("variant") == "N2b" ? GGVariant::N2b
                                                                       : GGVariant::N2a;
        print_series(name == "gg-sum" ? gg_sum(k, i, v, ctx) : gg_product(k, i, v, ctx),
                     as_json);
    } else if (name == "thm44-lhs" || name == "thm44-rhs") {
        long N = get_long(kv, "N");
        SeriesContext ctx{2 * N, (order + 2) * 2 * N};
        IdentityCell cell(N, get_long(kv, "delta"), get_long(kv, "k"), get_long(kv, "i"),
                          get_partition(kv, "lambda"),
                          static_cast<int>(get_long(kv, "sigma", 0L)));
        print_series(name == "thm44-lhs" ? thm44_lhs(cell, ctx).truncated(order * 2 * N)
                                         : thm44_rhs(cell, ctx).truncated(order * 2 * N),
                     as_json);
    } else {
        std::cerr << "eval: unknown series name '" << name << "'\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact q-series engine for Bailey-pair hierarchies"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a verification sweep from a config file");
    std::string config_path;
    run->add_option("config", config_path, "sweep config file")->required();

    auto* eval = app.add_subcommand("eval", "print one named series as a coefficient table");
    std::string eval_name;
    std::vector<std::string> eval_args;
    bool eval_json = false;
    eval->add_option("name", eval_name, "series name")->required();
    eval->add_option("params", eval_args, "key=value parameters");
    eval->add_flag("--json", eval_json, "emit the JSON envelope instead of CSV");

    auto* audit = app.add_subcommand("audit-transforms", "randomized Bailey-pair transform audit");
    long cases = 200;
    unsigned long seed = 1;
    long order_units = 20;
    int workers = 1;
    audit->add_option("--cases", cases, "cases per transform");
    audit->add_option("--seed", seed, "rng seed (recorded in reports)");
    audit->add_option("--order", order_units, "truncation order in q-units");
    audit->add_option("--workers", workers, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            SweepConfig cfg = SweepConfig::parse_file(config_path);
            SweepResult res = run_sweep(cfg);
            if (!cfg.out.empty()) {
                std::ofstream out(cfg.out);
                if (!out) {
                    std::cerr << "cannot open output path " << cfg.out << "\n";
                    return 2;
                }
                write_reports(res, out);
            } else {
                write_reports(res, std::cout);
            }
            std::cerr << "cells: " << res.reports.size() << "  pass: " << res.passed
                      << "  fail: " << res.failed << "  skipped: " << res.skipped
                      << "  unverified-bound: " << res.unverified << "  error: " << res.errored
                      << "\n";
            return res.exit_code();
        }
        if (eval->parsed()) return run_eval(eval_name, eval_args, eval_json);
        if (audit->parsed()) {
            SweepConfig cfg;
            cfg.target = "transforms-audit";
            cfg.cases = cases;
            cfg.seed = seed;
            cfg.order_units = order_units;
            cfg.workers = workers;
            SweepResult res = run_sweep(cfg);
            write_reports(res, std::cout);
            std::cerr << "cells: " << res.reports.size() << "  pass: " << res.passed
                      << "  fail: " << res.failed << "\n";
            return res.exit_code();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
