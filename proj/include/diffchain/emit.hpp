#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "diffchain/capacity.hpp"
#include "diffchain/convergence.hpp"

#include <nlohmann/json_fwd.hpp>

namespace diffchain {

// Everything needed to reproduce a CLI run. Serialized into every output
// (CSV header comment / JSON "config" object) so outputs are self-describing;
// the output destination itself is deliberately not part of the config.
struct RunConfig {
    std::string subcommand;
    std::string chain;
    std::string set;
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::uint64_t k_max = 1ull << 20;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 1;
    bool brute = false;
    bool members = false;
    double tol = 0.0;
    std::string format = "csv";
    std::vector<std::uint64_t> m_list;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    // Argv (without the program name) that reproduces this run.
    std::vector<std::string> to_argv() const;
};

// Canonical float formatting for CSV ("%.17g": round-trips doubles exactly).
std::string format_double(double v);

void emit_series_csv(std::ostream& os, const RunConfig& cfg, const DeviationSeries& series);
nlohmann::json series_to_json(const DeviationSeries& series);

void emit_verdict_json(std::ostream& os, const RunConfig& cfg, const TheoremVerdict& verdict);
void emit_verdict_csv(std::ostream& os, const RunConfig& cfg, const TheoremVerdict& verdict);

void emit_caps_csv(std::ostream& os, const RunConfig& cfg, const IndexSetSpec& spec);
void emit_caps_json(std::ostream& os, const RunConfig& cfg, const IndexSetSpec& spec);

void emit_dist_csv(std::ostream& os, const RunConfig& cfg, const MarginalResult& exact,
                   const MarginalResult* brute);
void emit_dist_json(std::ostream& os, const RunConfig& cfg, const MarginalResult& exact,
                    const MarginalResult* brute);

void emit_mc_csv(std::ostream& os, const RunConfig& cfg, const MonteCarloReport& report);
void emit_mc_json(std::ostream& os, const RunConfig& cfg, const MonteCarloReport& report);

void emit_density_csv(std::ostream& os, const RunConfig& cfg,
                      const std::vector<DensitySample>& samples);
void emit_density_json(std::ostream& os, const RunConfig& cfg,
                       const std::vector<DensitySample>& samples);

} // namespace diffchain
