#include "diffchain/chain.hpp"

#include <charconv>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "diffchain/errors.hpp"
#include "diffchain/rng.hpp"

namespace diffchain {

ChainSpec ChainSpec::make(double s, double p, double q1) {
    if (!(s > 0.0) || !(s < 1.0) || !(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("chain: need 0 < s < 1 and 0 < p < 1 "
                                    "(deterministic boundary chains are excluded)");
    }
    if (!(q1 >= 0.0) || !(q1 <= 1.0)) {
        throw std::invalid_argument("chain: initial one-probability q1 must be in [0, 1]");
    }
    ChainSpec spec;
    spec.s = s;
    spec.p = p;
    spec.q1 = q1;
    spec.q0 = 1.0 - q1;
    return spec;
}

std::string ChainSpec::to_string() const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "s=%.17g,p=%.17g,q1=%.17g", s, p, q1);
    return buf;
}

const char* to_string(ChainType t) { return t == ChainType::TypeI ? "I" : "II"; }

ChainType classify_type(const ChainSpec& spec, double eq_tolerance) {
    if (eq_tolerance < 0.0) {
        throw std::invalid_argument("classify_type: tolerance must be >= 0");
    }
    double d1 = spec.s - spec.p;
    double d2 = spec.s - (1.0 - spec.p);
    if ((d1 < 0 ? -d1 : d1) <= eq_tolerance || (d2 < 0 ? -d2 : d2) <= eq_tolerance) {
        return ChainType::TypeII;
    }
    return ChainType::TypeI;
}

ChainSpec iid_spec(double q) {
    if (!(q > 0.0) || !(q < 1.0)) {
        throw std::invalid_argument("iid_spec: need 0 < q < 1");
    }
    return ChainSpec::make(1.0 - q, q, q);
}

namespace detail {

std::array<long double, 2> marginal_at_ld(const ChainSpec& spec, std::uint64_t n) {
    const long double s = spec.s;
    const long double p = spec.p;
    long double d0 = spec.q0;
    long double d1 = spec.q1;
    for (std::uint64_t t = 0; t < n; ++t) {
        long double e0 = d0 * s + d1 * (1.0L - p);
        long double e1 = d0 * (1.0L - s) + d1 * p;
        d0 = e0;
        d1 = e1;
    }
    return {d0, d1};
}

} // namespace detail

std::array<double, 2> marginal_at(const ChainSpec& spec, std::uint64_t n) {
    auto d = detail::marginal_at_ld(spec, n);
    return {static_cast<double>(d[0]), static_cast<double>(d[1])};
}

std::vector<std::uint8_t> sample_path(const ChainSpec& spec, std::size_t length,
                                      std::uint64_t seed) {
    if (length < 1) {
        throw std::invalid_argument("sample_path: length must be >= 1");
    }
    std::mt19937_64 eng(derive_stream_seed(seed, 0));
    std::vector<std::uint8_t> path(length);
    path[0] = uniform_unit(eng) < spec.q1 ? 1 : 0;
    for (std::size_t i = 1; i < length; ++i) {
        const std::uint8_t cur = path[i - 1];
        const double stay = cur == 0 ? spec.s : spec.p;
        path[i] = uniform_unit(eng) < stay ? cur : static_cast<std::uint8_t>(1 - cur);
    }
    return path;
}

ChainSpec parse_chain(const std::string& text) {
    auto parse_field = [&](std::size_t& pos, const char* name) {
        std::size_t n = std::string::traits_type::length(name);
        if (text.compare(pos, n, name) != 0) {
            throw spec_parse_error(text, pos, std::string("expected \"") + name + "\"");
        }
        pos += n;
        double v = 0.0;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) {
            throw spec_parse_error(text, pos, "expected a number");
        }
        pos += static_cast<std::size_t>(ptr - first);
        return v;
    };

    std::size_t pos = 0;
    double s = parse_field(pos, "s=");
    if (pos >= text.size() || text[pos] != ',') {
        throw spec_parse_error(text, pos, "expected ','");
    }
    ++pos;
    double p = parse_field(pos, "p=");
    double q1 = 0.5;
    if (pos < text.size()) {
        if (text[pos] != ',') {
            throw spec_parse_error(text, pos, "expected ','");
        }
        ++pos;
        q1 = parse_field(pos, "q1=");
        if (pos != text.size()) {
            throw spec_parse_error(text, pos, "trailing characters");
        }
    }
    try {
        return ChainSpec::make(s, p, q1);
    } catch (const std::invalid_argument& e) {
        throw spec_parse_error(text, 0, e.what());
    }
}

} // namespace diffchain
