#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "diffchain/chain.hpp"

namespace diffchain {

// Hard cap on the brute-force oracle: it enumerates 2^(k+1) windows.
inline constexpr std::uint64_t kBruteForceMaxOrder = 22;

struct DifferenceQuery {
    ChainSpec chain;
    std::uint64_t n = 0; // time offset of the window start
    std::uint64_t k = 0; // difference order
};

// Exact law of the k-th difference at one coordinate. The signed deviation
// e = 1 - 2*P(xi = 1) is produced directly by the signed transfer pass, never
// by subtracting 1/2 from a probability: near the limit the deviation IS the
// information and subtraction would destroy it. When |e| drops below 1e-300
// the deviation underflows to 0 and `underflow` is set; log_abs_deviation
// stays available from the scale-tracked pass (natural log), absent only when
// the deviation is exactly zero.
struct MarginalResult {
    double probability_one = 0.0;
    double signed_deviation = 0.0;
    std::optional<double> log_abs_deviation;
    bool underflow = false;
};

// One pairwise absolute-difference pass: out[i] = |in[i+1] - in[i]|, which on
// bits is XOR. Rejects inputs shorter than 2.
std::vector<std::uint8_t> difference_step(std::span<const std::uint8_t> bits);

// k-th difference, two routes that must agree everywhere:
//  - iterated: k literal applications of difference_step;
//  - masked:   out[j] = XOR of in[j+i] over the odd-binomial positions i of
//              row k (submask enumeration).
std::vector<std::uint8_t> difference_k_iterated(std::span<const std::uint8_t> bits,
                                                std::uint64_t k);
std::vector<std::uint8_t> difference_k_masked(std::span<const std::uint8_t> bits,
                                              std::uint64_t k);
std::vector<std::uint8_t> difference_k(std::span<const std::uint8_t> bits, std::uint64_t k);

// Signed parity transfer pass over the window [n, n+k]: per chain state the
// quantity E[(-1)^partial_parity ; state] is propagated through the
// transition matrix, flipping sign at odd-binomial positions. O(n + k) time,
// O(1) memory; power-of-two rescaling keeps the log of the deviation
// available far below the double underflow threshold.
MarginalResult exact_marginal(const DifferenceQuery& query);

// Independent oracle: enumerates all 2^(k+1) windows starting at time n,
// weighs each by its path probability and applies the iterated difference
// literally. Refuses k > kBruteForceMaxOrder.
MarginalResult brute_force_marginal(const DifferenceQuery& query);

// Closed-form log|deviation| for the subcases that admit one (identical-rows
// chains, i.e. s = 1-p, and symmetric chains s = p). Used as the comparison
// route against the transfer pass; nullopt when no closed form applies or the
// deviation is exactly zero.
std::optional<double> closed_form_log_abs_deviation(const ChainSpec& chain, std::uint64_t n,
                                                    std::uint64_t k);

} // namespace diffchain
