#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffchain/capacity.hpp"
#include "diffchain/chain.hpp"
#include "diffchain/diffkernel.hpp"

namespace diffchain {

struct DeviationRecord {
    std::uint64_t k = 0;
    int nu_k = 0;
    int b_k = 0;
    double deviation = 0.0;
    std::optional<double> log_abs_deviation;
    bool underflow = false;
};

struct DeviationSeries {
    ChainSpec chain;
    std::uint64_t n = 0;
    std::string set_spec; // serialized IndexSetSpec, for metadata
    std::vector<DeviationRecord> records;
};

struct SweepOptions {
    std::uint64_t k_max = 1ull << 20;
};

// One exact_marginal per member of e, in increasing k. Deterministic and
// independent of the thread count: records are written by index and each
// entry is a pure function of its query. Throws cost_guard_error if any k
// exceeds opts.k_max.
DeviationSeries sweep(const ChainSpec& spec, const IndexSetSpec& e, std::uint64_t n,
                      const SweepOptions& opts = {});

// Deviations along {2^m : 0 <= m <= m_max}, a capacity-starved control set
// (nu = 0 from m >= 1, b constant 1): no convergence is expected along it for
// type-I chains, which is the contrast the reports use.
DeviationSeries control_sweep(const ChainSpec& spec, std::uint64_t n, int m_max);

struct RateFit {
    double delta_estimate = 0.0; // exp(slope) of the log|deviation| regression
    double intercept = 0.0;
    double goodness = 0.0; // coefficient of determination
    std::size_t points_used = 0;
    bool insufficient = false; // fewer than 3 usable points
};

// Least-squares line on (k, log|deviation|) over non-underflow records.
RateFit fit_rate(const DeviationSeries& series);

struct MonteCarloReport {
    std::uint64_t k = 0;
    std::uint64_t n = 0;
    std::uint64_t paths = 0;
    std::uint64_t seed = 0;
    std::uint64_t ones = 0;
    double empirical_one_frequency = 0.0;
    double exact_probability_one = 0.0;
    double z_score = 0.0; // 0 when P(1-P) = 0 and the frequency matches exactly
    std::string generator;
};

// Simulates `paths` windows (fixed-size blocks, per-block generator streams;
// the aggregation is an integer sum, so the result is identical under any
// thread count) and compares the empirical one-frequency with the exact law.
MonteCarloReport monte_carlo_check(const ChainSpec& spec, std::uint64_t k, std::uint64_t n,
                                   std::uint64_t paths, std::uint64_t seed,
                                   std::uint64_t k_max = 1ull << 20);

struct TheoremThresholds {
    double final_abs_deviation = 1e-6;
    double control_factor = 10.0;
    int control_m_max = 14;
    std::uint64_t k_max = 1ull << 20;
    double type_tolerance = 0.0;
};

// Finite-prefix verdict: thresholds met on the computed window, never a claim
// about the limit itself.
struct TheoremVerdict {
    ChainType chain_type = ChainType::TypeI;
    std::string verdict; // converging(type-I) | converging(type-II) |
                         // non-convergent-control | inconclusive
    bool flavor_warning = false; // set's capacity flavor does not match the chain type
    double final_abs_deviation = 0.0;
    std::optional<double> final_log_abs_deviation;
    std::size_t monotone_from_index = 0; // start of the maximal strictly-decreasing suffix
    RateFit fit;
    std::optional<double> control_min_log_abs_deviation;
    double control_min_abs_deviation = 0.0;
    // control_min / final deviation >= control_factor, compared in log space
    // so an underflowed final still counts.
    bool control_contrast_met = false;
    DeviationSeries series;
    DeviationSeries control;
};

TheoremVerdict theorem_report(const ChainSpec& spec, const IndexSetSpec& e, std::uint64_t n,
                              const TheoremThresholds& thresholds = {});

// Worker count for sweeps and Monte Carlo blocks; bounded by the
// DIFFCHAIN_THREADS environment variable when set.
int recommended_threads();

} // namespace diffchain
