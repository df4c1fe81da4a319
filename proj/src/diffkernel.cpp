#include "diffchain/diffkernel.hpp"

#include <cmath>
#include <stdexcept>

#include "diffchain/bitkernel.hpp"
#include "diffchain/errors.hpp"

namespace diffchain {

namespace {

constexpr double kUnderflowAbs = 1e-300;
constexpr long double kRescaleBelow = 0x1.0p-4096L;
constexpr long double kRescaleFactor = 0x1.0p+4096L;
constexpr int kRescaleShift = 4096;

// Submask test: position i of row k carries an odd binomial.
inline bool mask_bit(std::uint64_t k, std::uint64_t i) { return (i & ~k) == 0; }

MarginalResult result_from_signed(long double e_scaled, long long shift) {
    MarginalResult r;
    if (e_scaled == 0.0L) {
        r.probability_one = 0.5;
        r.signed_deviation = 0.0;
        r.underflow = true;
        return r;
    }
    constexpr long double kLn2 = 0.69314718055994530941723212145817657L;
    const long double log_abs =
        std::log(e_scaled < 0 ? -e_scaled : e_scaled) - static_cast<long double>(shift) * kLn2;
    r.log_abs_deviation = static_cast<double>(log_abs);

    // Power-of-two descaling is exact; it only underflows when the true value does.
    long double e = e_scaled;
    long long remaining = shift;
    while (remaining > 0) {
        int step = remaining > 16000 ? 16000 : static_cast<int>(remaining);
        e = std::ldexp(e, -step);
        remaining -= step;
    }
    const double dev = static_cast<double>(e);
    if (dev > -kUnderflowAbs && dev < kUnderflowAbs) {
        r.probability_one = 0.5;
        r.signed_deviation = 0.0;
        r.underflow = true;
        return r;
    }
    r.signed_deviation = dev;
    long double p1 = 0.5L * (1.0L - e);
    if (p1 < 0.0L) {
        p1 = 0.0L;
    }
    if (p1 > 1.0L) {
        p1 = 1.0L;
    }
    r.probability_one = static_cast<double>(p1);
    r.underflow = false;
    return r;
}

} // namespace

std::vector<std::uint8_t> difference_step(std::span<const std::uint8_t> bits) {
    if (bits.size() < 2) {
        throw std::invalid_argument("difference_step: need at least 2 elements");
    }
    std::vector<std::uint8_t> out(bits.size() - 1);
    for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
        out[i] = bits[i] ^ bits[i + 1];
    }
    return out;
}

std::vector<std::uint8_t> difference_k_iterated(std::span<const std::uint8_t> bits,
                                                std::uint64_t k) {
    if (bits.size() < k + 1) {
        throw std::invalid_argument("difference_k: input shorter than k+1");
    }
    std::vector<std::uint8_t> buf(bits.begin(), bits.end());
    for (std::uint64_t t = 0; t < k; ++t) {
        const std::size_t len = buf.size() - t;
        for (std::size_t i = 0; i + 1 < len; ++i) {
            buf[i] = buf[i] ^ buf[i + 1];
        }
    }
    buf.resize(bits.size() - k);
    return buf;
}

std::vector<std::uint8_t> difference_k_masked(std::span<const std::uint8_t> bits,
                                              std::uint64_t k) {
    if (bits.size() < k + 1) {
        throw std::invalid_argument("difference_k: input shorter than k+1");
    }
    std::vector<std::uint8_t> out(bits.size() - k);
    for (std::size_t j = 0; j < out.size(); ++j) {
        std::uint8_t acc = 0;
        // Enumerate the submasks of k: exactly the odd-binomial positions.
        std::uint64_t i = k;
        while (true) {
            acc ^= bits[j + i];
            if (i == 0) {
                break;
            }
            i = (i - 1) & k;
        }
        out[j] = acc;
    }
    return out;
}

std::vector<std::uint8_t> difference_k(std::span<const std::uint8_t> bits, std::uint64_t k) {
    return difference_k_masked(bits, k);
}

MarginalResult exact_marginal(const DifferenceQuery& query) {
    const ChainSpec& c = query.chain;
    const std::uint64_t k = query.k;
    const long double s = c.s;
    const long double p = c.p;

    auto d = detail::marginal_at_ld(c, query.n);
    // Position 0 is always masked (the boundary entry of every row is 1).
    long double v0 = d[0];
    long double v1 = -d[1];
    long long shift = 0;

    for (std::uint64_t i = 1; i <= k; ++i) {
        const long double w0 = v0 * s + v1 * (1.0L - p);
        const long double w1 = v0 * (1.0L - s) + v1 * p;
        v0 = w0;
        v1 = mask_bit(k, i) ? -w1 : w1;
        long double m = v0 < 0 ? -v0 : v0;
        const long double m1 = v1 < 0 ? -v1 : v1;
        if (m1 > m) {
            m = m1;
        }
        if (m > 0.0L && m < kRescaleBelow) {
            v0 *= kRescaleFactor;
            v1 *= kRescaleFactor;
            shift += kRescaleShift;
        }
    }
    return result_from_signed(v0 + v1, shift);
}

MarginalResult brute_force_marginal(const DifferenceQuery& query) {
    const std::uint64_t k = query.k;
    if (k > kBruteForceMaxOrder) {
        throw cost_guard_error("brute_force_marginal: k > 22 would enumerate more than 2^23 "
                               "windows; refuse");
    }
    const ChainSpec& c = query.chain;
    auto d = detail::marginal_at_ld(c, query.n);
    const long double trans[2][2] = {{c.s, 1.0L - c.s}, {1.0L - c.p, c.p}};

    const std::uint64_t window_count = 1ull << (k + 1);
    long double total_one = 0.0L;
    std::uint8_t w[kBruteForceMaxOrder + 1];

    for (std::uint64_t bits = 0; bits < window_count; ++bits) {
        long double prob = (bits & 1) ? d[1] : d[0];
        for (std::uint64_t i = 0; i < k; ++i) {
            prob *= trans[(bits >> i) & 1][(bits >> (i + 1)) & 1];
        }
        for (std::uint64_t i = 0; i <= k; ++i) {
            w[i] = static_cast<std::uint8_t>((bits >> i) & 1);
        }
        // k in-place passes of the pairwise difference.
        for (std::uint64_t t = 0; t < k; ++t) {
            for (std::uint64_t i = 0; i + 1 <= k - t; ++i) {
                w[i] = w[i] ^ w[i + 1];
            }
        }
        if (w[0]) {
            total_one += prob;
        }
    }

    MarginalResult r;
    const long double e = 1.0L - 2.0L * total_one;
    if (e == 0.0L) {
        r.probability_one = 0.5;
        r.signed_deviation = 0.0;
        r.underflow = true;
        return r;
    }
    r.probability_one = static_cast<double>(total_one);
    r.signed_deviation = static_cast<double>(e);
    const double abs_dev = r.signed_deviation < 0 ? -r.signed_deviation : r.signed_deviation;
    if (abs_dev < kUnderflowAbs) {
        r.probability_one = 0.5;
        r.signed_deviation = 0.0;
        r.underflow = true;
    } else {
        r.log_abs_deviation = static_cast<double>(std::log(e < 0 ? -e : e));
        r.underflow = false;
    }
    return r;
}

std::optional<double> closed_form_log_abs_deviation(const ChainSpec& chain, std::uint64_t n,
                                                    std::uint64_t k) {
    const bool identical_rows = chain.s == 1.0 - chain.p;
    const bool symmetric = chain.s == chain.p;
    if (!identical_rows && !symmetric) {
        return std::nullopt;
    }
    if (k == 0) {
        auto d = marginal_at(chain, n);
        const double base = d[0] - d[1];
        if (base == 0.0) {
            return std::nullopt;
        }
        return std::log(std::fabs(base));
    }
    if (identical_rows) {
        // All window variables past the first are i.i.d. Bernoulli(q), q = p;
        // the first carries the (possibly different) law at time n.
        const double q = chain.p;
        const double factor = std::fabs(1.0 - 2.0 * q);
        if (factor == 0.0) {
            return std::nullopt;
        }
        auto d = marginal_at(chain, n);
        const double base = d[0] - d[1];
        if (base == 0.0) {
            return std::nullopt;
        }
        const long double beta = std::exp2(static_cast<long double>(b_of(k)));
        return static_cast<double>(std::log(std::fabs(base)) +
                                   (beta - 1.0L) * std::log(static_cast<long double>(factor)));
    }
    // Symmetric chain: the increment process is i.i.d. Bernoulli(1-s), so the
    // order-k deviation is (2s-1)^beta(k-1) independent of n and the start law.
    const double factor = std::fabs(2.0 * chain.s - 1.0);
    if (factor == 0.0) {
        return std::nullopt;
    }
    const long double beta = k == 1 ? 1.0L : std::exp2(static_cast<long double>(b_of(k - 1)));
    return static_cast<double>(beta * std::log(static_cast<long double>(factor)));
}

} // namespace diffchain
