#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace diffchain {

// Two-state time-homogeneous Markov chain. s and p are the self-transition
// probabilities pi(0,0) and pi(1,1); the transition matrix is
//   [ s    1-s ]
//   [ 1-p  p   ]
// with 0 < s, p < 1 strictly (deterministic boundary chains are excluded).
struct ChainSpec {
    double s = 0.5;
    double p = 0.5;
    double q0 = 0.5; // initial distribution; q0 + q1 = 1 by construction
    double q1 = 0.5;

    // Validates and builds a spec; q0 is derived as 1 - q1.
    static ChainSpec make(double s, double p, double q1 = 0.5);

    std::string to_string() const; // "s=...,p=...,q1=..." (round-trips exactly)
};

enum class ChainType { TypeI, TypeII };

const char* to_string(ChainType t);

// Type II iff |s - p| <= tol or |s - (1-p)| <= tol; else type I. The default
// tolerance is 0: the user states the chain and the tool must not silently
// reclassify it, but a nonzero tolerance is available because the type-II
// conditions have measure zero under floating input.
ChainType classify_type(const ChainSpec& spec, double eq_tolerance = 0.0);

// The i.i.d. Bernoulli(q) sequence realized as a chain with identical rows
// (s = 1-q, p = q, initial law (1-q, q)). Always type II. Rejects q in {0,1}.
ChainSpec iid_spec(double q);

// Law of the chain at time n: n-fold application of the transition matrix to
// the initial distribution. Iterative on purpose: O(n) and free of the
// cancellation the spectral form suffers near s + p = 1.
std::array<double, 2> marginal_at(const ChainSpec& spec, std::uint64_t n);

// Deterministic path sampling; see kGeneratorId in rng.hpp for the scheme.
std::vector<std::uint8_t> sample_path(const ChainSpec& spec, std::size_t length,
                                      std::uint64_t seed);

// Chain mini-language: "s=0.3,p=0.8,q1=0.5" (q1 optional, default 0.5).
ChainSpec parse_chain(const std::string& text);

namespace detail {
// Extended-precision marginal used by the transfer pass.
std::array<long double, 2> marginal_at_ld(const ChainSpec& spec, std::uint64_t n);
} // namespace detail

} // namespace diffchain
