#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace diffchain {

// Digit-level combinatorics of natural numbers and the mod-2 Pascal triangle.
//
// Conventions (run-length form, under which the closed identities hold):
//   b(k)    binary digit sum of k
//   nu(k)   length of the run of trailing one-bits of k (0 for even k)
//   beta(k) number of odd entries in row k of Pascal's triangle, = 2^b(k)
//   mu(k)   length of the initial all-ones run of that row, = 2^nu(k)

// Bits of k, least significant first; the last element is always 1.
// Rejects k == 0 (no normalized expansion exists).
std::vector<std::uint8_t> binary_expansion(std::uint64_t k);

int b_of(std::uint64_t k);  // popcount; rejects k == 0
int nu_of(std::uint64_t k); // trailing-ones run length; rejects k == 0

// Parity of binomial(k, i): 1 iff i is a bitwise submask of k. Rejects i > k.
bool pascal_entry(std::uint64_t k, std::uint64_t i);

// Closed forms 2^nu(k) and 2^b(k); mu_of(0) = beta_of(0) = 1.
std::uint64_t mu_of(std::uint64_t k);
std::uint64_t beta_of(std::uint64_t k);

// Direct row scans (the independent route; must agree with the closed forms
// wherever both run). mu_scan walks entries until the first zero, beta_scan
// counts every entry, so both cost O(row length) rather than O(1).
std::uint64_t mu_scan(std::uint64_t k);
std::uint64_t beta_scan(std::uint64_t k);

// Literal max-index readings of nu and mu (index of the last element of the
// run instead of its length). Kept for documentation: the identities
// mu = 2^nu and beta = 2^b do NOT hold under these.
std::optional<int> nu_max_index(std::uint64_t k); // nullopt for even k
std::uint64_t mu_max_index(std::uint64_t k);

// Lazy view of one row of the mod-2 triangle.
struct PascalLineView {
    std::uint64_t k = 0;

    std::uint64_t size() const { return k + 1; }
    bool entry(std::uint64_t i) const { return pascal_entry(k, i); }
    std::uint64_t mu() const { return mu_of(k); }
    std::uint64_t beta() const { return beta_of(k); }
};

} // namespace diffchain
