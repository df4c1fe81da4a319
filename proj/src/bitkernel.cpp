#include "diffchain/bitkernel.hpp"

#include <bit>
#include <stdexcept>

namespace diffchain {

std::vector<std::uint8_t> binary_expansion(std::uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("binary_expansion: k must be >= 1");
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(std::bit_width(k));
    while (k != 0) {
        bits.push_back(static_cast<std::uint8_t>(k & 1));
        k >>= 1;
    }
    return bits;
}

int b_of(std::uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("b_of: k must be >= 1");
    }
    return std::popcount(k);
}

int nu_of(std::uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("nu_of: k must be >= 1");
    }
    return std::countr_one(k);
}

bool pascal_entry(std::uint64_t k, std::uint64_t i) {
    if (i > k) {
        throw std::invalid_argument("pascal_entry: i must not exceed k");
    }
    return (i & ~k) == 0;
}

std::uint64_t mu_of(std::uint64_t k) {
    if (k == 0) {
        return 1;
    }
    int nu = std::countr_one(k);
    if (nu >= 64) {
        throw std::overflow_error("mu_of: 2^nu(k) exceeds 64 bits");
    }
    return 1ull << nu;
}

std::uint64_t beta_of(std::uint64_t k) {
    if (k == 0) {
        return 1;
    }
    int b = std::popcount(k);
    if (b >= 64) {
        throw std::overflow_error("beta_of: 2^b(k) exceeds 64 bits");
    }
    return 1ull << b;
}

std::uint64_t mu_scan(std::uint64_t k) {
    std::uint64_t run = 0;
    for (std::uint64_t i = 0; i <= k; ++i) {
        if ((i & ~k) != 0) {
            break;
        }
        ++run;
    }
    return run;
}

std::uint64_t beta_scan(std::uint64_t k) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i <= k; ++i) {
        count += ((i & ~k) == 0) ? 1 : 0;
    }
    return count;
}

std::optional<int> nu_max_index(std::uint64_t k) {
    if (k == 0) {
        throw std::invalid_argument("nu_max_index: k must be >= 1");
    }
    if ((k & 1) == 0) {
        return std::nullopt; // no index m has bits 0..m all set
    }
    return std::countr_one(k) - 1;
}

std::uint64_t mu_max_index(std::uint64_t k) {
    return mu_scan(k) - 1; // entry 0 is always 1, so the run is never empty
}

} // namespace diffchain
