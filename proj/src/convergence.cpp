#include "diffchain/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "diffchain/bitkernel.hpp"
#include "diffchain/errors.hpp"
#include "diffchain/rng.hpp"

namespace diffchain {

namespace {

constexpr std::uint64_t kMonteCarloBlock = 4096;

double effective_log_abs(const DeviationRecord& r) {
    if (r.log_abs_deviation) {
        return *r.log_abs_deviation;
    }
    if (r.deviation != 0.0) {
        return std::log(std::fabs(r.deviation));
    }
    return -std::numeric_limits<double>::infinity();
}

// Finite heuristic for "this statistic diverges along the set": the minimum
// over the second half of the enumeration exceeds the minimum over the first.
bool looks_divergent(const std::vector<int>& vals) {
    if (vals.size() < 2) {
        return false;
    }
    const std::size_t half = vals.size() / 2;
    const int min_first = *std::min_element(vals.begin(), vals.begin() + half);
    const int min_second = *std::min_element(vals.begin() + half, vals.end());
    return min_second > min_first;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int threads = recommended_threads();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

int recommended_threads() {
    if (const char* env = std::getenv("DIFFCHAIN_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) {
            return static_cast<int>(std::min<long>(v, 64));
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) {
        hw = 1;
    }
    return static_cast<int>(std::min(hw, 8u));
}

DeviationSeries sweep(const ChainSpec& spec, const IndexSetSpec& e, std::uint64_t n,
                      const SweepOptions& opts) {
    auto members = e.enumerate();
    for (auto k : members) {
        if (k > opts.k_max) {
            throw cost_guard_error("sweep: set member " + std::to_string(k) +
                                   " exceeds k_max = " + std::to_string(opts.k_max));
        }
    }
    DeviationSeries series;
    series.chain = spec;
    series.n = n;
    series.set_spec = e.to_string();
    series.records.resize(members.size());

    parallel_for(members.size(), [&](std::size_t i) {
        const std::uint64_t k = members[i];
        MarginalResult r = exact_marginal({spec, n, k});
        DeviationRecord rec;
        rec.k = k;
        rec.nu_k = nu_of(k);
        rec.b_k = b_of(k);
        rec.deviation = r.signed_deviation;
        rec.log_abs_deviation = r.log_abs_deviation;
        rec.underflow = r.underflow;
        series.records[i] = rec;
    });
    return series;
}

DeviationSeries control_sweep(const ChainSpec& spec, std::uint64_t n, int m_max) {
    if (m_max < 0 || m_max > 62) {
        throw std::invalid_argument("control_sweep: m_max must be in [0, 62]");
    }
    std::vector<std::uint64_t> powers;
    powers.reserve(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m) {
        powers.push_back(1ull << m);
    }
    SweepOptions opts;
    opts.k_max = std::max(opts.k_max, 1ull << m_max);
    return sweep(spec, IndexSetSpec::explicit_list(std::move(powers)), n, opts);
}

RateFit fit_rate(const DeviationSeries& series) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& rec : series.records) {
        if (rec.underflow || !rec.log_abs_deviation) {
            continue;
        }
        const double y = *rec.log_abs_deviation;
        if (!std::isfinite(y)) {
            continue;
        }
        pts.emplace_back(static_cast<double>(rec.k), y);
    }

    RateFit fit;
    fit.points_used = pts.size();
    if (pts.size() < 3) {
        fit.insufficient = true;
        return fit;
    }

    long double sx = 0, sy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
    }
    const long double n = static_cast<long double>(pts.size());
    const long double mx = sx / n;
    const long double my = sy / n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    const long double slope = sxy / sxx;
    const long double intercept = my - slope * mx;
    long double ss_res = 0;
    for (auto [x, y] : pts) {
        const long double r = y - (intercept + slope * x);
        ss_res += r * r;
    }
    fit.delta_estimate = static_cast<double>(std::exp(slope));
    fit.intercept = static_cast<double>(intercept);
    if (syy <= 0.0L) {
        fit.goodness = ss_res <= 1e-20L ? 1.0 : 0.0;
    } else {
        fit.goodness = static_cast<double>(1.0L - ss_res / syy);
    }
    return fit;
}

MonteCarloReport monte_carlo_check(const ChainSpec& spec, std::uint64_t k, std::uint64_t n,
                                   std::uint64_t paths, std::uint64_t seed,
                                   std::uint64_t k_max) {
    if (paths < 1000) {
        throw std::invalid_argument("monte_carlo_check: need paths >= 1000");
    }
    if (k > k_max) {
        throw cost_guard_error("monte_carlo_check: k exceeds k_max");
    }

    const MarginalResult exact = exact_marginal({spec, n, k});
    const auto start = marginal_at(spec, n);
    const std::uint64_t blocks = (paths + kMonteCarloBlock - 1) / kMonteCarloBlock;
    std::vector<std::uint64_t> block_ones(blocks, 0);

    parallel_for(blocks, [&](std::size_t bi) {
        const std::uint64_t lo = bi * kMonteCarloBlock;
        const std::uint64_t hi = std::min(paths, lo + kMonteCarloBlock);
        std::mt19937_64 eng(derive_stream_seed(seed, bi));
        std::uint64_t ones = 0;
        for (std::uint64_t t = lo; t < hi; ++t) {
            std::uint8_t state = uniform_unit(eng) < start[1] ? 1 : 0;
            std::uint8_t acc = state; // position 0 is always masked
            for (std::uint64_t i = 1; i <= k; ++i) {
                const double stay = state == 0 ? spec.s : spec.p;
                state = uniform_unit(eng) < stay ? state : static_cast<std::uint8_t>(1 - state);
                if ((i & ~k) == 0) {
                    acc ^= state;
                }
            }
            ones += acc;
        }
        block_ones[bi] = ones;
    });

    std::uint64_t ones = 0;
    for (auto v : block_ones) {
        ones += v;
    }

    MonteCarloReport report;
    report.k = k;
    report.n = n;
    report.paths = paths;
    report.seed = seed;
    report.ones = ones;
    report.generator = kGeneratorId;
    report.empirical_one_frequency = static_cast<double>(ones) / static_cast<double>(paths);
    report.exact_probability_one = exact.probability_one;
    const double p1 = exact.probability_one;
    const double var = p1 * (1.0 - p1);
    if (var == 0.0) {
        report.z_score = report.empirical_one_frequency == p1
                             ? 0.0
                             : std::numeric_limits<double>::infinity();
    } else {
        report.z_score = (report.empirical_one_frequency - p1) *
                         std::sqrt(static_cast<double>(paths)) / std::sqrt(var);
    }
    return report;
}

TheoremVerdict theorem_report(const ChainSpec& spec, const IndexSetSpec& e, std::uint64_t n,
                              const TheoremThresholds& thresholds) {
    TheoremVerdict v;
    v.chain_type = classify_type(spec, thresholds.type_tolerance);

    SweepOptions opts;
    opts.k_max = thresholds.k_max;
    v.series = sweep(spec, e, n, opts);
    v.fit = fit_rate(v.series);

    if (v.series.records.empty()) {
        v.verdict = "inconclusive";
        return v;
    }

    const auto& last = v.series.records.back();
    v.final_abs_deviation = last.underflow ? 0.0 : std::fabs(last.deviation);
    v.final_log_abs_deviation = last.log_abs_deviation;

    // Start of the maximal strictly-decreasing suffix of log|deviation|.
    std::size_t j = v.series.records.size() - 1;
    while (j > 0 && effective_log_abs(v.series.records[j - 1]) >
                        effective_log_abs(v.series.records[j])) {
        --j;
    }
    v.monotone_from_index = j;

    // Capacity flavor: type I wants nu to grow along the set, type II wants b.
    std::vector<int> relevant;
    relevant.reserve(v.series.records.size());
    for (const auto& rec : v.series.records) {
        relevant.push_back(v.chain_type == ChainType::TypeI ? rec.nu_k : rec.b_k);
    }
    v.flavor_warning = !looks_divergent(relevant);

    v.control = control_sweep(spec, n, thresholds.control_m_max);
    double control_min_log = std::numeric_limits<double>::infinity();
    double control_min_abs = std::numeric_limits<double>::infinity();
    for (const auto& rec : v.control.records) {
        control_min_log = std::min(control_min_log, effective_log_abs(rec));
        control_min_abs = std::min(control_min_abs, rec.underflow ? 0.0 : std::fabs(rec.deviation));
    }
    if (std::isfinite(control_min_log)) {
        v.control_min_log_abs_deviation = control_min_log;
    }
    v.control_min_abs_deviation = control_min_abs;

    const bool converged = v.final_abs_deviation <= thresholds.final_abs_deviation;
    if (converged && !v.flavor_warning) {
        v.verdict = v.chain_type == ChainType::TypeI ? "converging(type-I)" : "converging(type-II)";
    } else if (!converged && v.flavor_warning) {
        v.verdict = "non-convergent-control";
    } else {
        v.verdict = "inconclusive";
    }
    return v;
}

} // namespace diffchain
