#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "diffchain/bitkernel.hpp"
#include "diffchain/diffkernel.hpp"
#include "diffchain/errors.hpp"

using namespace diffchain;

namespace {

ChainSpec random_chain(std::mt19937_64& eng) {
    std::uniform_real_distribution<double> sp(0.05, 0.95);
    std::uniform_real_distribution<double> q(0.0, 1.0);
    return ChainSpec::make(sp(eng), sp(eng), q(eng));
}

} // namespace

TEST_CASE("difference_step") {
    std::vector<std::uint8_t> in{0, 1, 1, 0};
    CHECK(difference_step(in) == std::vector<std::uint8_t>{1, 0, 1});

    std::vector<std::uint8_t> constant(16, 1);
    auto zeros = difference_step(constant);
    CHECK(zeros == std::vector<std::uint8_t>(15, 0));

    std::vector<std::uint8_t> pair{0, 1};
    CHECK(difference_step(pair) == std::vector<std::uint8_t>{1});

    std::vector<std::uint8_t> single{1};
    CHECK_THROWS_AS(difference_step(single), std::invalid_argument);
}

TEST_CASE("difference_k basics") {
    std::vector<std::uint8_t> in{1, 0, 0, 1};
    CHECK(difference_k(in, 0) == in);
    CHECK(difference_k(in, 2) == std::vector<std::uint8_t>{1, 1});
    CHECK(difference_k_iterated(in, 2) == std::vector<std::uint8_t>{1, 1});
    CHECK_THROWS_AS(difference_k(in, 4), std::invalid_argument);
}

TEST_CASE("iterated and masked routes agree on random inputs") {
    std::mt19937_64 eng(99);
    for (int trial = 0; trial < 400; ++trial) {
        const std::uint64_t k = eng() % 65;
        const std::size_t len = k + 1 + eng() % 64;
        std::vector<std::uint8_t> bits(len);
        for (auto& b : bits) {
            b = static_cast<std::uint8_t>(eng() & 1);
        }
        CHECK(difference_k_iterated(bits, k) == difference_k_masked(bits, k));
    }
}

TEST_CASE("exact_marginal on i.i.d. chains") {
    auto iid = iid_spec(0.3);
    for (std::uint64_t n : {0ull, 3ull}) {
        auto r1 = exact_marginal({iid, n, 1});
        CHECK(r1.probability_one == doctest::Approx(0.42).epsilon(1e-13));
        // row 7 is all ones: the XOR runs over 8 independent bits
        auto r7 = exact_marginal({iid, n, 7});
        CHECK(r7.probability_one ==
              doctest::Approx((1.0 - std::pow(0.4, 8)) / 2.0).epsilon(1e-13));
    }

    auto start = ChainSpec::make(0.3, 0.8, 0.7);
    auto r0 = exact_marginal({start, 0, 0});
    CHECK(r0.probability_one == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(r0.signed_deviation == doctest::Approx(1 - 2 * 0.7).epsilon(1e-15));
}

TEST_CASE("brute force marginal hand cases") {
    auto start0 = ChainSpec::make(0.3, 0.8, 0.0);
    auto r = brute_force_marginal({start0, 0, 1});
    CHECK(r.probability_one == doctest::Approx(0.7).epsilon(1e-15));

    auto start1 = ChainSpec::make(0.999, 0.001, 1.0);
    auto r2 = brute_force_marginal({start1, 0, 1});
    CHECK(r2.probability_one == doctest::Approx(0.999).epsilon(1e-15));

    CHECK_THROWS_AS(brute_force_marginal({start0, 0, 23}), cost_guard_error);
}

TEST_CASE("oracle equivalence on random queries") {
    std::mt19937_64 eng(20240812);
    for (int trial = 0; trial < 120; ++trial) {
        auto chain = random_chain(eng);
        const std::uint64_t n = eng() % 9;
        const std::uint64_t k = eng() % 13;
        auto exact = exact_marginal({chain, n, k});
        auto brute = brute_force_marginal({chain, n, k});
        CHECK(std::fabs(exact.probability_one - brute.probability_one) <= 1e-12);
        CHECK(std::fabs(exact.signed_deviation - brute.signed_deviation) <= 1e-12);
    }
}

TEST_CASE("result invariants") {
    std::mt19937_64 eng(555);
    for (int trial = 0; trial < 200; ++trial) {
        auto chain = random_chain(eng);
        auto r = exact_marginal({chain, eng() % 4, eng() % 40});
        CHECK(r.probability_one >= 0.0);
        CHECK(r.probability_one <= 1.0);
        CHECK(std::fabs((1.0 - 2.0 * r.probability_one) - r.signed_deviation) <= 0x1.0p-50);
    }
}

TEST_CASE("symmetric chains reduce to i.i.d. increments one order down") {
    for (double s : {0.2, 0.37, 0.8}) {
        auto sym = ChainSpec::make(s, s, 0.25);
        auto incr = iid_spec(1.0 - s);
        for (std::uint64_t n : {0ull, 2ull}) {
            for (std::uint64_t k = 1; k <= 12; ++k) {
                auto a = exact_marginal({sym, n, k});
                auto b = exact_marginal({incr, n, k - 1});
                CHECK(std::fabs(a.probability_one - b.probability_one) <= 1e-12);
            }
        }
    }
}

TEST_CASE("underflow marker and log extension") {
    auto iid = iid_spec(0.3);
    const std::uint64_t k = (1ull << 11) - 1; // beta = 2^11, |e| = 0.4^2048
    auto r = exact_marginal({iid, 0, k});
    CHECK(r.underflow);
    CHECK(r.signed_deviation == 0.0);
    CHECK(r.probability_one == 0.5);
    REQUIRE(r.log_abs_deviation.has_value());
    const double expected = 2048.0 * std::log(0.4);
    CHECK(*r.log_abs_deviation == doctest::Approx(expected).epsilon(1e-9));

    auto closed = closed_form_log_abs_deviation(iid, 0, k);
    REQUIRE(closed.has_value());
    CHECK(*closed == doctest::Approx(*r.log_abs_deviation).epsilon(1e-9));
}

TEST_CASE("closed-form log deviations") {
    // identical rows, non-stationary start at n = 0
    auto chain = ChainSpec::make(0.7, 0.3, 0.9);
    auto closed = closed_form_log_abs_deviation(chain, 0, 5);
    REQUIRE(closed.has_value());
    auto exact = exact_marginal({chain, 0, 5});
    CHECK(*closed == doctest::Approx(std::log(std::fabs(exact.signed_deviation))).epsilon(1e-12));

    // symmetric chain
    auto sym = ChainSpec::make(0.3, 0.3, 0.1);
    auto closed_sym = closed_form_log_abs_deviation(sym, 4, 6);
    REQUIRE(closed_sym.has_value());
    auto exact_sym = exact_marginal({sym, 4, 6});
    CHECK(*closed_sym ==
          doctest::Approx(std::log(std::fabs(exact_sym.signed_deviation))).epsilon(1e-12));

    // fair coin: deviation is exactly zero, no finite log
    CHECK_FALSE(closed_form_log_abs_deviation(iid_spec(0.5), 0, 3).has_value());
    // type I: no closed form
    CHECK_FALSE(closed_form_log_abs_deviation(ChainSpec::make(0.3, 0.8), 0, 3).has_value());
}
