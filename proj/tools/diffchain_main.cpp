#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "diffchain/capacity.hpp"
#include "diffchain/chain.hpp"
#include "diffchain/convergence.hpp"
#include "diffchain/diffkernel.hpp"
#include "diffchain/emit.hpp"
#include "diffchain/errors.hpp"

namespace {

using namespace diffchain;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCostGuard = 3;

void write_sink(const std::string& out_path, const std::string& payload) {
    if (out_path.empty() || out_path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream ofs(out_path, std::ios::binary);
    if (!ofs) {
        throw std::runtime_error("cannot open output file: " + out_path);
    }
    ofs << payload;
}

std::vector<std::uint64_t> parse_m_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            throw spec_parse_error(text, 0, "empty entry in m list");
        }
        out.push_back(std::stoull(item));
    }
    if (out.empty()) {
        throw spec_parse_error(text, 0, "empty m list");
    }
    return out;
}

int run_caps(const RunConfig& cfg, std::string& payload) {
    IndexSetSpec spec = parse_index_set(cfg.set);
    std::ostringstream os;
    if (cfg.format == "json") {
        emit_caps_json(os, cfg, spec);
    } else {
        emit_caps_csv(os, cfg, spec);
    }
    payload = os.str();
    return kExitOk;
}

int run_dist(const RunConfig& cfg, std::string& payload) {
    ChainSpec chain = parse_chain(cfg.chain);
    if (cfg.k > cfg.k_max) {
        throw cost_guard_error("dist: k exceeds k_max (override with --k-max)");
    }
    MarginalResult exact = exact_marginal({chain, cfg.n, cfg.k});
    MarginalResult brute;
    if (cfg.brute) {
        brute = brute_force_marginal({chain, cfg.n, cfg.k});
    }
    std::ostringstream os;
    if (cfg.format == "json") {
        emit_dist_json(os, cfg, exact, cfg.brute ? &brute : nullptr);
    } else {
        emit_dist_csv(os, cfg, exact, cfg.brute ? &brute : nullptr);
    }
    payload = os.str();
    return kExitOk;
}

int run_converge(const RunConfig& cfg, std::string& payload) {
    ChainSpec chain = parse_chain(cfg.chain);
    IndexSetSpec set = parse_index_set(cfg.set);
    TheoremThresholds thresholds;
    thresholds.k_max = cfg.k_max;
    thresholds.type_tolerance = cfg.tol;
    TheoremVerdict verdict = theorem_report(chain, set, cfg.n, thresholds);
    if (verdict.flavor_warning) {
        std::cerr << "warning: capacity flavor of the set does not match the chain type\n";
    }
    std::ostringstream os;
    if (cfg.format == "json") {
        emit_verdict_json(os, cfg, verdict);
    } else {
        emit_verdict_csv(os, cfg, verdict);
    }
    payload = os.str();
    return kExitOk;
}

int run_simulate(const RunConfig& cfg, std::string& payload) {
    ChainSpec chain = parse_chain(cfg.chain);
    MonteCarloReport report =
        monte_carlo_check(chain, cfg.k, cfg.n, cfg.paths, cfg.seed, cfg.k_max);
    std::ostringstream os;
    if (cfg.format == "json") {
        emit_mc_json(os, cfg, report);
    } else {
        emit_mc_csv(os, cfg, report);
    }
    payload = os.str();
    return kExitOk;
}

int run_density(const RunConfig& cfg, std::string& payload) {
    IndexSetSpec set = parse_index_set(cfg.set);
    auto samples = density_trend(set, std::span<const std::uint64_t>(cfg.m_list));
    std::ostringstream os;
    if (cfg.format == "json") {
        emit_density_json(os, cfg, samples);
    } else {
        emit_density_csv(os, cfg, samples);
    }
    payload = os.str();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffchain: higher-order absolute differences of two-state Markov chains,\n"
                 "discrete capacities over index sets, and convergence experiments"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_path = "-";
    std::string m_list_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--out", out_path, "Output path ('-' for stdout)")
            ->capture_default_str();
    };

    CLI::App* caps = app.add_subcommand("caps", "Capacities C and c of an index set");
    caps->add_option("--set", cfg.set, "Index set spec")->required();
    caps->add_flag("--members", cfg.members, "Include the per-member (k, nu, b) table");
    add_common(caps);

    CLI::App* dist = app.add_subcommand("dist", "Exact law of the k-th difference at offset n");
    dist->add_option("--chain", cfg.chain, "Chain spec, e.g. s=0.3,p=0.8,q1=0.5")->required();
    dist->add_option("--n", cfg.n, "Time offset")->capture_default_str();
    dist->add_option("--k", cfg.k, "Difference order")->required();
    dist->add_option("--k-max", cfg.k_max, "Cost guard on k")->capture_default_str();
    dist->add_flag("--brute", cfg.brute, "Cross-check against the brute-force oracle (k <= 22)");
    add_common(dist);

    CLI::App* converge = app.add_subcommand(
        "converge", "Deviation sweep along an index set, rate fit and verdict");
    converge->add_option("--chain", cfg.chain, "Chain spec")->required();
    converge->add_option("--set", cfg.set, "Index set spec")->required();
    converge->add_option("--n", cfg.n, "Time offset")->capture_default_str();
    converge->add_option("--k-max", cfg.k_max, "Cost guard on k")->capture_default_str();
    converge->add_option("--tol", cfg.tol, "Equality tolerance for type classification")
        ->capture_default_str();
    add_common(converge);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check against the exact law");
    simulate->add_option("--chain", cfg.chain, "Chain spec")->required();
    simulate->add_option("--k", cfg.k, "Difference order")->required();
    simulate->add_option("--n", cfg.n, "Time offset")->capture_default_str();
    simulate->add_option("--paths", cfg.paths, "Number of simulated windows (>= 1000)")
        ->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    simulate->add_option("--k-max", cfg.k_max, "Cost guard on k")->capture_default_str();
    add_common(simulate);

    CLI::App* density = app.add_subcommand("density", "Natural-density samples of an index set");
    density->add_option("--set", cfg.set, "Index set spec")->required();
    density->add_option("--m-list", m_list_text, "Comma-separated m values, increasing")
        ->required();
    add_common(density);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        if (!m_list_text.empty()) {
            cfg.m_list = parse_m_list(m_list_text);
        }
        std::string payload;
        int rc = kExitOk;
        if (cfg.subcommand == "caps") {
            rc = run_caps(cfg, payload);
        } else if (cfg.subcommand == "dist") {
            rc = run_dist(cfg, payload);
        } else if (cfg.subcommand == "converge") {
            rc = run_converge(cfg, payload);
        } else if (cfg.subcommand == "simulate") {
            rc = run_simulate(cfg, payload);
        } else if (cfg.subcommand == "density") {
            rc = run_density(cfg, payload);
        }
        write_sink(out_path, payload);
        return rc;
    } catch (const cost_guard_error& e) {
        std::cerr << "cost guard: " << e.what() << "\n";
        return kExitCostGuard;
    } catch (const spec_parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
