#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "diffchain/convergence.hpp"
#include "diffchain/errors.hpp"

using namespace diffchain;

namespace {

DeviationSeries synthetic_series(const std::vector<std::pair<std::uint64_t, double>>& devs) {
    DeviationSeries s;
    s.chain = ChainSpec::make(0.3, 0.8);
    s.set_spec = "synthetic";
    for (auto [k, dev] : devs) {
        DeviationRecord rec;
        rec.k = k;
        rec.deviation = dev;
        rec.log_abs_deviation = std::log(std::fabs(dev));
        rec.underflow = false;
        s.records.push_back(rec);
    }
    return s;
}

} // namespace

TEST_CASE("sweep singleton equals exact_marginal") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.25);
    auto series = sweep(chain, IndexSetSpec::explicit_list({9}), 2);
    REQUIRE(series.records.size() == 1);
    auto direct = exact_marginal({chain, 2, 9});
    CHECK(series.records[0].deviation == direct.signed_deviation);
    CHECK(series.records[0].k == 9);
    CHECK(series.records[0].nu_k == 1);
    CHECK(series.records[0].b_k == 2);
}

TEST_CASE("sweep respects the k_max guard") {
    auto chain = ChainSpec::make(0.3, 0.8);
    SweepOptions opts;
    opts.k_max = 100;
    CHECK_THROWS_AS(sweep(chain, IndexSetSpec::explicit_list({50, 200}), 0, opts),
                    cost_guard_error);
}

TEST_CASE("iid mersenne sweep matches the closed form") {
    auto iid = iid_spec(0.3);
    auto series = sweep(iid, parse_index_set("mersenne:mmax=10"), 0);
    REQUIRE(series.records.size() == 10);
    for (const auto& rec : series.records) {
        const int m = nu_of(rec.k); // k = 2^m - 1
        const double expected_log = std::exp2(static_cast<double>(m)) * std::log(0.4);
        if (!rec.underflow) {
            CHECK(std::fabs(rec.deviation - std::exp(expected_log)) <=
                  1e-12 * std::exp(expected_log));
        }
        REQUIRE(rec.log_abs_deviation.has_value());
        CHECK(*rec.log_abs_deviation == doctest::Approx(expected_log).epsilon(1e-9));
    }
}

TEST_CASE("type-I mersenne sweep decays monotonically") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.25);
    auto series = sweep(chain, parse_index_set("mersenne:mmax=12"), 0);
    REQUIRE(series.records.size() == 12);
    for (std::size_t i = 3; i < series.records.size(); ++i) {
        REQUIRE(series.records[i].log_abs_deviation.has_value());
        CHECK(*series.records[i].log_abs_deviation < *series.records[i - 1].log_abs_deviation);
    }
}

TEST_CASE("fit_rate on exact log-linear input") {
    std::vector<std::pair<std::uint64_t, double>> devs;
    for (std::uint64_t k = 1; k <= 10; ++k) {
        devs.emplace_back(k, 0.5 * std::pow(0.4, static_cast<double>(k)));
    }
    auto fit = fit_rate(synthetic_series(devs));
    CHECK_FALSE(fit.insufficient);
    CHECK(fit.points_used == 10);
    CHECK(std::fabs(fit.delta_estimate - 0.4) <= 1e-10);
    CHECK(fit.goodness >= 1.0 - 1e-12);
    CHECK(fit.intercept == doctest::Approx(std::log(0.5)).epsilon(1e-9));
}

TEST_CASE("fit_rate with multiplicative noise stays near the true rate") {
    std::mt19937_64 eng(4242);
    std::uniform_real_distribution<double> noise(-0.1, 0.1);
    std::vector<std::pair<std::uint64_t, double>> devs;
    for (std::uint64_t k = 1; k <= 10; ++k) {
        devs.emplace_back(k, 0.5 * std::pow(0.4, static_cast<double>(k)) * (1.0 + noise(eng)));
    }
    auto fit = fit_rate(synthetic_series(devs));
    CHECK_FALSE(fit.insufficient);
    CHECK(std::fabs(fit.delta_estimate - 0.4) <= 0.05);
}

TEST_CASE("fit_rate marks short series insufficient") {
    std::vector<std::pair<std::uint64_t, double>> devs{{1, 0.5}, {3, 0.1}};
    auto fit = fit_rate(synthetic_series(devs));
    CHECK(fit.insufficient);
    CHECK(fit.points_used == 2);

    DeviationSeries all_under;
    all_under.chain = ChainSpec::make(0.3, 0.8);
    for (std::uint64_t k : {5ull, 9ull, 17ull}) {
        DeviationRecord rec;
        rec.k = k;
        rec.underflow = true;
        all_under.records.push_back(rec);
    }
    CHECK(fit_rate(all_under).insufficient);
}

TEST_CASE("control sweep") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.25);
    auto series = control_sweep(chain, 0, 10);
    REQUIRE(series.records.size() == 11); // k = 1, 2, 4, ..., 2^10
    CHECK(series.records[0].k == 1);
    auto direct = exact_marginal({chain, 0, 1});
    CHECK(series.records[0].deviation == direct.signed_deviation);
    for (std::size_t i = 1; i < series.records.size(); ++i) {
        CHECK(series.records[i].nu_k == 0);
        CHECK(series.records[i].b_k == 1);
    }

    // along powers of two the i.i.d. deviation is pinned at (1-2q)^2
    auto iid = iid_spec(0.3);
    auto iid_series = control_sweep(iid, 0, 10);
    for (std::size_t i = 1; i < iid_series.records.size(); ++i) {
        CHECK(std::fabs(iid_series.records[i].deviation - 0.16) <= 1e-12);
    }
}

TEST_CASE("monte carlo check") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.5);
    auto a = monte_carlo_check(chain, 3, 2, 100000, 777);
    auto b = monte_carlo_check(chain, 3, 2, 100000, 777);
    CHECK(a.empirical_one_frequency == b.empirical_one_frequency);
    CHECK(std::fabs(a.z_score) <= 4.0);
    CHECK(a.generator == std::string("mt19937_64/splitmix64-streams"));

    // degenerate exact law: z pinned to 0 on an exact match
    auto start0 = ChainSpec::make(0.3, 0.8, 0.0);
    auto z0 = monte_carlo_check(start0, 0, 0, 10000, 5);
    CHECK(z0.exact_probability_one == 0.0);
    CHECK(z0.empirical_one_frequency == 0.0);
    CHECK(z0.z_score == 0.0);

    CHECK_THROWS_AS(monte_carlo_check(chain, 3, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_check(chain, 1ull << 30, 0, 10000, 1), cost_guard_error);
}

TEST_CASE("monte carlo is independent of the thread count") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.5);
    setenv("DIFFCHAIN_THREADS", "1", 1);
    auto single = monte_carlo_check(chain, 4, 1, 50000, 99);
    setenv("DIFFCHAIN_THREADS", "4", 1);
    auto quad = monte_carlo_check(chain, 4, 1, 50000, 99);
    unsetenv("DIFFCHAIN_THREADS");
    CHECK(single.ones == quad.ones);
}

TEST_CASE("sweep is independent of the thread count") {
    auto chain = ChainSpec::make(0.3, 0.8, 0.25);
    auto e = parse_index_set("mersenne:mmax=10");
    setenv("DIFFCHAIN_THREADS", "1", 1);
    auto single = sweep(chain, e, 0);
    setenv("DIFFCHAIN_THREADS", "4", 1);
    auto quad = sweep(chain, e, 0);
    unsetenv("DIFFCHAIN_THREADS");
    REQUIRE(single.records.size() == quad.records.size());
    for (std::size_t i = 0; i < single.records.size(); ++i) {
        CHECK(single.records[i].deviation == quad.records[i].deviation);
        CHECK(single.records[i].log_abs_deviation == quad.records[i].log_abs_deviation);
    }
}

TEST_CASE("theorem_report verdicts") {
    TheoremThresholds thresholds; // final 1e-6, control factor 10, m_max 14

    SUBCASE("type I along mersenne numbers") {
        auto chain = ChainSpec::make(0.3, 0.8, 0.25);
        auto v = theorem_report(chain, parse_index_set("mersenne:mmax=20"), 0, thresholds);
        CHECK(v.chain_type == ChainType::TypeI);
        CHECK_FALSE(v.flavor_warning);
        CHECK(v.verdict == "converging(type-I)");
        CHECK(v.final_abs_deviation < 1e-6);
    }
    SUBCASE("type II along a small-b family") {
        auto iid = iid_spec(0.3);
        auto v = theorem_report(iid, parse_index_set("b:p=2..10,s=log2"), 0, thresholds);
        CHECK(v.chain_type == ChainType::TypeII);
        CHECK_FALSE(v.flavor_warning);
        CHECK(v.verdict == "converging(type-II)");
    }
    SUBCASE("type I along the powers-of-two control set") {
        auto chain = ChainSpec::make(0.3, 0.8, 0.25);
        auto v = theorem_report(chain, parse_index_set("pred:range=1..16384,b==1"), 0, thresholds);
        CHECK(v.flavor_warning);
        CHECK(v.verdict == "non-convergent-control");
    }
    SUBCASE("flavor mismatch warns") {
        auto chain = ChainSpec::make(0.3, 0.8, 0.25); // type I wants nu growth
        auto v = theorem_report(chain, parse_index_set("b:p=2..10,s=log2"), 0, thresholds);
        CHECK(v.flavor_warning);
    }
}
