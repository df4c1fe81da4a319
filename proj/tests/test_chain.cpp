#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "diffchain/chain.hpp"
#include "diffchain/errors.hpp"

using namespace diffchain;

TEST_CASE("classify_type") {
    CHECK(classify_type(ChainSpec::make(0.3, 0.8)) == ChainType::TypeI);
    CHECK(classify_type(ChainSpec::make(0.3, 0.7)) == ChainType::TypeII); // s = 1-p
    CHECK(classify_type(ChainSpec::make(0.4, 0.4)) == ChainType::TypeII); // s = p

    // nonzero tolerance widens the type-II bands
    CHECK(classify_type(ChainSpec::make(0.40, 0.401), 0.0) == ChainType::TypeI);
    CHECK(classify_type(ChainSpec::make(0.40, 0.401), 0.01) == ChainType::TypeII);
    CHECK_THROWS_AS(classify_type(ChainSpec::make(0.3, 0.8), -1.0), std::invalid_argument);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(ChainSpec::make(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ChainSpec::make(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(ChainSpec::make(0.5, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ChainSpec::make(0.5, 0.5, 1.5), std::invalid_argument);
    auto degenerate_start = ChainSpec::make(0.5, 0.5, 1.0); // degenerate start law is fine
    CHECK(degenerate_start.q0 == 0.0);
}

TEST_CASE("iid_spec") {
    auto spec = iid_spec(0.3);
    CHECK(spec.s == doctest::Approx(0.7));
    CHECK(spec.p == doctest::Approx(0.3));
    CHECK(spec.q1 == doctest::Approx(0.3));
    CHECK(classify_type(spec) == ChainType::TypeII);
    CHECK(classify_type(iid_spec(0.5)) == ChainType::TypeII);

    CHECK_THROWS_AS(iid_spec(0.0), std::invalid_argument);
    CHECK_THROWS_AS(iid_spec(1.0), std::invalid_argument);
}

TEST_CASE("marginal_at") {
    auto spec = ChainSpec::make(0.3, 0.8, 0.0); // start at state 0
    auto d0 = marginal_at(spec, 0);
    CHECK(d0[0] == 1.0);
    CHECK(d0[1] == 0.0);
    auto d1 = marginal_at(spec, 1);
    CHECK(d1[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d1[1] == doctest::Approx(0.7).epsilon(1e-15));

    auto sym = ChainSpec::make(0.6, 0.6, 0.5);
    for (std::uint64_t n : {1ull, 10ull, 1000ull}) {
        auto d = marginal_at(sym, n);
        CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-15));
    }

    // components stay a distribution over long horizons
    for (std::uint64_t n : {100ull, 10000ull}) {
        auto d = marginal_at(ChainSpec::make(0.3, 0.8, 0.25), n);
        CHECK(std::fabs(d[0] + d[1] - 1.0) <= 1e-14);
        CHECK(d[0] >= 0.0);
        CHECK(d[1] >= 0.0);
    }

    // one extra application of the transition row reproduces the next marginal
    auto spec2 = ChainSpec::make(0.42, 0.17, 0.9);
    for (std::uint64_t n : {0ull, 7ull, 999ull}) {
        auto d = marginal_at(spec2, n);
        auto e = marginal_at(spec2, n + 1);
        double e0 = d[0] * spec2.s + d[1] * (1 - spec2.p);
        double e1 = d[0] * (1 - spec2.s) + d[1] * spec2.p;
        CHECK(std::fabs(e[0] - e0) <= 1e-14);
        CHECK(std::fabs(e[1] - e1) <= 1e-14);
    }
}

TEST_CASE("sample_path determinism and length") {
    auto spec = ChainSpec::make(0.3, 0.8, 0.5);
    auto a = sample_path(spec, 1000, 42);
    auto b = sample_path(spec, 1000, 42);
    CHECK(a == b);
    CHECK(a.size() == 1000);
    CHECK(sample_path(spec, 1000, 43) != a);
    CHECK_THROWS_AS(sample_path(spec, 0, 1), std::invalid_argument);
}

TEST_CASE("sticky chain stays near zero") {
    auto spec = ChainSpec::make(0.999, 0.001, 0.0);
    auto path = sample_path(spec, 1000, 7);
    std::size_t zeros = 0;
    for (auto bit : path) {
        zeros += bit == 0;
    }
    CHECK(static_cast<double>(zeros) / static_cast<double>(path.size()) >= 0.99);
}

TEST_CASE("empirical transition frequencies within 4 sigma") {
    auto spec = ChainSpec::make(0.3, 0.8, 0.5);
    auto path = sample_path(spec, 200000, 12345);
    std::uint64_t from0 = 0, stay0 = 0, from1 = 0, stay1 = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (path[i - 1] == 0) {
            ++from0;
            stay0 += path[i] == 0;
        } else {
            ++from1;
            stay1 += path[i] == 1;
        }
    }
    const double s_hat = static_cast<double>(stay0) / static_cast<double>(from0);
    const double p_hat = static_cast<double>(stay1) / static_cast<double>(from1);
    const double s_sigma = std::sqrt(0.3 * 0.7 / static_cast<double>(from0));
    const double p_sigma = std::sqrt(0.8 * 0.2 / static_cast<double>(from1));
    CHECK(std::fabs(s_hat - 0.3) <= 4 * s_sigma);
    CHECK(std::fabs(p_hat - 0.8) <= 4 * p_sigma);
}

TEST_CASE("empirical one-frequency at fixed n within 4 sigma of the marginal") {
    auto spec = ChainSpec::make(0.3, 0.8, 1.0);
    const std::uint64_t n = 3;
    const double exact = marginal_at(spec, n)[1];
    std::uint64_t ones = 0;
    const std::size_t paths = 100000;
    for (std::size_t i = 0; i < paths; ++i) {
        ones += sample_path(spec, n + 1, 50000 + i)[n];
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(paths);
    const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(paths));
    CHECK(std::fabs(freq - exact) <= 4 * sigma);
}

TEST_CASE("chain parser") {
    auto spec = parse_chain("s=0.3,p=0.8,q1=0.5");
    CHECK(spec.s == 0.3);
    CHECK(spec.p == 0.8);
    CHECK(spec.q1 == 0.5);

    auto defaulted = parse_chain("s=0.7,p=0.3");
    CHECK(defaulted.q1 == 0.5);

    // serialization round-trips bit-exactly
    auto spec2 = parse_chain(spec.to_string());
    CHECK(spec2.s == spec.s);
    CHECK(spec2.p == spec.p);
    CHECK(spec2.q1 == spec.q1);

    CHECK_THROWS_AS(parse_chain("s=0.3"), spec_parse_error);
    CHECK_THROWS_AS(parse_chain("p=0.8,s=0.3"), spec_parse_error);
    CHECK_THROWS_AS(parse_chain("s=1.5,p=0.8"), spec_parse_error);
    CHECK_THROWS_AS(parse_chain("s=0.3,p=0.8,q1=2"), spec_parse_error);
    CHECK_THROWS_AS(parse_chain("s=0.3,p=0.8,q1=0.5,x=1"), spec_parse_error);
}
