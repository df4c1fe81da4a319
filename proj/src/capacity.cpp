#include "diffchain/capacity.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "diffchain/bitkernel.hpp"
#include "diffchain/errors.hpp"

namespace diffchain {

namespace {

constexpr int kMaxBlock = 62;

// ceil(log2(p)) for p >= 1, integer-exact.
long long ceil_log2(int p) {
    if (p <= 1) {
        return 0;
    }
    return std::bit_width(static_cast<unsigned>(p - 1));
}

long long ceil_sqrt(int p) {
    long long r = static_cast<long long>(std::floor(std::sqrt(static_cast<double>(p))));
    while (r * r < p) {
        ++r;
    }
    while (r > 0 && (r - 1) * (r - 1) >= p) {
        --r;
    }
    return r;
}

void check_block_args(const char* who, int p, int s) {
    if (p < 2 || p > kMaxBlock) {
        throw std::invalid_argument(std::string(who) + ": p must be in [2, 62]");
    }
    if (s < 0 || s > p) {
        throw std::invalid_argument(std::string(who) + ": s must be in [0, p]");
    }
}

// Block index p with L_p = [2^(p-1), 2^p) containing k.
int block_of(std::uint64_t k) { return std::bit_width(k); }

bool slice_member_B(std::uint64_t k, long long s) { return nu_of(k) >= s; }
bool slice_member_b(std::uint64_t k, long long s) { return b_of(k) >= s; }

} // namespace

long long SRule::eval(int p) const {
    long long v = 0;
    switch (kind) {
    case Kind::Constant:
        v = static_cast<long long>(a);
        break;
    case Kind::Linear:
        v = static_cast<long long>(std::ceil(a * static_cast<double>(p) + b));
        break;
    case Kind::Log2:
        v = ceil_log2(p);
        break;
    case Kind::Sqrt:
        v = ceil_sqrt(p);
        break;
    }
    return v < 0 ? 0 : v;
}

std::string SRule::to_string() const {
    char buf[80];
    switch (kind) {
    case Kind::Constant:
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(a));
        return buf;
    case Kind::Linear:
        std::snprintf(buf, sizeof(buf), "lin:%.17g:%.17g", a, b);
        return buf;
    case Kind::Log2:
        return "log2";
    case Kind::Sqrt:
        return "sqrt";
    }
    return "";
}

bool IndexSetSpec::contains(std::uint64_t k) const {
    if (k == 0) {
        return false;
    }
    switch (kind) {
    case Kind::ExplicitList:
        return std::binary_search(values.begin(), values.end(), k);
    case Kind::Mersenne: {
        if (!std::has_single_bit(k + 1)) {
            return false;
        }
        int m = std::bit_width(k); // k = 2^m - 1
        return m >= 1 && m <= m_max;
    }
    case Kind::FamilyUnionB: {
        int p = block_of(k);
        return p >= p_lo && p <= p_hi && slice_member_B(k, s_rule.eval(p));
    }
    case Kind::FamilyUnionSmallB: {
        int p = block_of(k);
        return p >= p_lo && p <= p_hi && slice_member_b(k, s_rule.eval(p));
    }
    case Kind::PredicateOnRange: {
        if (k < range_lo || k > range_hi) {
            return false;
        }
        switch (pred) {
        case Pred::NuGe:
            return nu_of(k) >= static_cast<long long>(pred_arg);
        case Pred::NuEq:
            return nu_of(k) == static_cast<long long>(pred_arg);
        case Pred::BGe:
            return b_of(k) >= static_cast<long long>(pred_arg);
        case Pred::BEq:
            return b_of(k) == static_cast<long long>(pred_arg);
        case Pred::Even:
            return (k & 1) == 0;
        case Pred::Odd:
            return (k & 1) == 1;
        case Pred::All:
            return true;
        }
        return false;
    }
    }
    return false;
}

std::vector<std::uint64_t> IndexSetSpec::enumerate() const {
    std::vector<std::uint64_t> out;
    switch (kind) {
    case Kind::ExplicitList:
        out = values;
        break;
    case Kind::Mersenne:
        out.reserve(static_cast<std::size_t>(m_max));
        for (int m = 1; m <= m_max; ++m) {
            out.push_back((1ull << m) - 1);
        }
        break;
    case Kind::FamilyUnionB:
    case Kind::FamilyUnionSmallB: {
        // Dyadic blocks are disjoint and ordered, so concatenating slice
        // members keeps the enumeration strictly increasing.
        std::uint64_t candidates = (1ull << p_hi) - (1ull << (p_lo - 1));
        if (candidates > (1ull << 26)) {
            throw cost_guard_error(
                "family enumeration would scan more than 2^26 candidates; "
                "use counting interfaces instead");
        }
        const bool small_b = kind == Kind::FamilyUnionSmallB;
        for (int p = p_lo; p <= p_hi; ++p) {
            long long s = s_rule.eval(p);
            if (s > p) {
                continue; // nu(k), b(k) <= p on L_p: empty slice
            }
            for (std::uint64_t k = 1ull << (p - 1); k < (1ull << p); ++k) {
                if (small_b ? slice_member_b(k, s) : slice_member_B(k, s)) {
                    out.push_back(k);
                }
            }
        }
        break;
    }
    case Kind::PredicateOnRange:
        for (std::uint64_t k = range_lo; k <= range_hi; ++k) {
            if (contains(k)) {
                out.push_back(k);
            }
        }
        break;
    }
    return out;
}

std::uint64_t IndexSetSpec::count_up_to(std::uint64_t m) const {
    switch (kind) {
    case Kind::ExplicitList:
        return static_cast<std::uint64_t>(
            std::upper_bound(values.begin(), values.end(), m) - values.begin());
    case Kind::Mersenne: {
        // members <= m: 2^j - 1 <= m  <=>  j <= bit_width(m+1) - has_single_bit adj.
        std::uint64_t j = 0;
        while (j < static_cast<std::uint64_t>(m_max) && ((1ull << (j + 1)) - 1) <= m) {
            ++j;
        }
        return j;
    }
    case Kind::FamilyUnionB:
    case Kind::FamilyUnionSmallB:
    case Kind::PredicateOnRange: {
        std::uint64_t count = 0;
        for (std::uint64_t k = 1; k <= m; ++k) {
            count += contains(k) ? 1 : 0;
        }
        return count;
    }
    }
    return 0;
}

std::string IndexSetSpec::to_string() const {
    std::string out;
    switch (kind) {
    case Kind::ExplicitList:
        out = "list:";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i != 0) {
                out += ',';
            }
            out += std::to_string(values[i]);
        }
        break;
    case Kind::Mersenne:
        out = "mersenne:mmax=" + std::to_string(m_max);
        break;
    case Kind::FamilyUnionB:
    case Kind::FamilyUnionSmallB:
        out = (kind == Kind::FamilyUnionB) ? "B:" : "b:";
        out += "p=" + std::to_string(p_lo) + ".." + std::to_string(p_hi);
        out += ",s=" + s_rule.to_string();
        break;
    case Kind::PredicateOnRange: {
        out = "pred:range=" + std::to_string(range_lo) + ".." + std::to_string(range_hi) + ",";
        switch (pred) {
        case Pred::NuGe:
            out += "nu>=" + std::to_string(pred_arg);
            break;
        case Pred::NuEq:
            out += "nu==" + std::to_string(pred_arg);
            break;
        case Pred::BGe:
            out += "b>=" + std::to_string(pred_arg);
            break;
        case Pred::BEq:
            out += "b==" + std::to_string(pred_arg);
            break;
        case Pred::Even:
            out += "even";
            break;
        case Pred::Odd:
            out += "odd";
            break;
        case Pred::All:
            out += "all";
            break;
        }
        break;
    }
    }
    return out;
}

IndexSetSpec IndexSetSpec::explicit_list(std::vector<std::uint64_t> v) {
    for (auto k : v) {
        if (k == 0) {
            throw std::invalid_argument("index sets live in {1, 2, ...}: 0 is not a member");
        }
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    IndexSetSpec s;
    s.kind = Kind::ExplicitList;
    s.values = std::move(v);
    return s;
}

IndexSetSpec IndexSetSpec::mersenne(int m_max) {
    if (m_max < 1 || m_max > kMaxBlock) {
        throw std::invalid_argument("mersenne: mmax must be in [1, 62]");
    }
    IndexSetSpec s;
    s.kind = Kind::Mersenne;
    s.m_max = m_max;
    return s;
}

IndexSetSpec IndexSetSpec::family_B(int p_lo, int p_hi, SRule rule) {
    if (p_lo < 2 || p_hi < p_lo || p_hi > kMaxBlock) {
        throw std::invalid_argument("family: need 2 <= p_lo <= p_hi <= 62");
    }
    IndexSetSpec s;
    s.kind = Kind::FamilyUnionB;
    s.p_lo = p_lo;
    s.p_hi = p_hi;
    s.s_rule = rule;
    return s;
}

IndexSetSpec IndexSetSpec::family_b(int p_lo, int p_hi, SRule rule) {
    IndexSetSpec s = family_B(p_lo, p_hi, rule);
    s.kind = Kind::FamilyUnionSmallB;
    return s;
}

IndexSetSpec IndexSetSpec::predicate_on_range(std::uint64_t lo, std::uint64_t hi, Pred pred,
                                              std::uint64_t arg) {
    if (lo < 1 || hi < lo) {
        throw std::invalid_argument("pred: need 1 <= lo <= hi");
    }
    IndexSetSpec s;
    s.kind = Kind::PredicateOnRange;
    s.range_lo = lo;
    s.range_hi = hi;
    s.pred = pred;
    s.pred_arg = arg;
    return s;
}

namespace {

// Minimal cursor over the spec text; all errors carry the byte offset.
struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    char peek() const { return done() ? '\0' : text[pos]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw spec_parse_error(text, pos, msg);
    }

    void expect(char c) {
        if (done() || text[pos] != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos;
    }

    bool consume(const char* lit) {
        std::size_t n = std::string::traits_type::length(lit);
        if (text.compare(pos, n, lit) == 0) {
            pos += n;
            return true;
        }
        return false;
    }

    void expect_lit(const char* lit) {
        if (!consume(lit)) {
            fail(std::string("expected \"") + lit + "\"");
        }
    }

    std::uint64_t parse_u64() {
        std::uint64_t v = 0;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) {
            fail("expected an unsigned integer");
        }
        pos += static_cast<std::size_t>(ptr - first);
        return v;
    }

    int parse_int_bounded(int lo, int hi, const char* what) {
        std::size_t at = pos;
        std::uint64_t v = parse_u64();
        if (v < static_cast<std::uint64_t>(lo) || v > static_cast<std::uint64_t>(hi)) {
            pos = at;
            fail(std::string(what) + " out of range");
        }
        return static_cast<int>(v);
    }

    double parse_double() {
        double v = 0.0;
        const char* first = text.data() + pos;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) {
            fail("expected a number");
        }
        pos += static_cast<std::size_t>(ptr - first);
        return v;
    }
};

SRule parse_s_rule(Cursor& c) {
    SRule rule;
    if (c.consume("log2")) {
        rule.kind = SRule::Kind::Log2;
    } else if (c.consume("sqrt")) {
        rule.kind = SRule::Kind::Sqrt;
    } else if (c.consume("lin:")) {
        rule.kind = SRule::Kind::Linear;
        rule.a = c.parse_double();
        c.expect(':');
        rule.b = c.parse_double();
    } else {
        rule.kind = SRule::Kind::Constant;
        rule.a = static_cast<double>(c.parse_int_bounded(0, kMaxBlock, "constant s"));
    }
    return rule;
}

} // namespace

IndexSetSpec parse_index_set(const std::string& text) {
    Cursor c{text};
    if (c.consume("list:")) {
        std::vector<std::uint64_t> vals;
        while (true) {
            std::size_t at = c.pos;
            std::uint64_t v = c.parse_u64();
            if (v == 0) {
                c.pos = at;
                c.fail("0 is not a member of the index domain");
            }
            vals.push_back(v);
            if (c.done()) {
                break;
            }
            c.expect(',');
        }
        return IndexSetSpec::explicit_list(std::move(vals));
    }
    if (c.consume("mersenne:")) {
        c.expect_lit("mmax=");
        int m = c.parse_int_bounded(1, kMaxBlock, "mmax");
        if (!c.done()) {
            c.fail("trailing characters");
        }
        return IndexSetSpec::mersenne(m);
    }
    if (c.consume("B:") || c.consume("b:")) {
        bool small_b = text[0] == 'b';
        c.expect_lit("p=");
        int p_lo = c.parse_int_bounded(2, kMaxBlock, "p");
        c.expect_lit("..");
        std::size_t at = c.pos;
        int p_hi = c.parse_int_bounded(2, kMaxBlock, "p");
        if (p_hi < p_lo) {
            c.pos = at;
            c.fail("range upper bound below lower bound");
        }
        c.expect(',');
        c.expect_lit("s=");
        SRule rule = parse_s_rule(c);
        if (!c.done()) {
            c.fail("trailing characters");
        }
        return small_b ? IndexSetSpec::family_b(p_lo, p_hi, rule)
                       : IndexSetSpec::family_B(p_lo, p_hi, rule);
    }
    if (c.consume("pred:")) {
        c.expect_lit("range=");
        std::size_t at = c.pos;
        std::uint64_t lo = c.parse_u64();
        if (lo == 0) {
            c.pos = at;
            c.fail("range must start at 1 or above");
        }
        c.expect_lit("..");
        at = c.pos;
        std::uint64_t hi = c.parse_u64();
        if (hi < lo) {
            c.pos = at;
            c.fail("range upper bound below lower bound");
        }
        c.expect(',');
        IndexSetSpec::Pred pred;
        std::uint64_t arg = 0;
        if (c.consume("nu>=")) {
            pred = IndexSetSpec::Pred::NuGe;
            arg = c.parse_u64();
        } else if (c.consume("nu==")) {
            pred = IndexSetSpec::Pred::NuEq;
            arg = c.parse_u64();
        } else if (c.consume("b>=")) {
            pred = IndexSetSpec::Pred::BGe;
            arg = c.parse_u64();
        } else if (c.consume("b==")) {
            pred = IndexSetSpec::Pred::BEq;
            arg = c.parse_u64();
        } else if (c.consume("even")) {
            pred = IndexSetSpec::Pred::Even;
        } else if (c.consume("odd")) {
            pred = IndexSetSpec::Pred::Odd;
        } else if (c.consume("all")) {
            pred = IndexSetSpec::Pred::All;
        } else {
            c.fail("unknown predicate (expected nu>=, nu==, b>=, b==, even, odd or all)");
        }
        if (!c.done()) {
            c.fail("trailing characters");
        }
        return IndexSetSpec::predicate_on_range(lo, hi, pred, arg);
    }
    c.fail("unknown set kind (expected list:, mersenne:, B:, b: or pred:)");
}

std::uint64_t capacity_C(std::span<const std::uint64_t> members) {
    std::uint64_t total = 0;
    for (auto k : members) {
        total += static_cast<std::uint64_t>(nu_of(k)); // nu_of rejects 0
    }
    return total;
}

std::uint64_t capacity_c(std::span<const std::uint64_t> members) {
    std::uint64_t total = 0;
    for (auto k : members) {
        total += static_cast<std::uint64_t>(b_of(k));
    }
    return total;
}

std::uint64_t capacity_C(const IndexSetSpec& e) {
    auto members = e.enumerate();
    return capacity_C(std::span<const std::uint64_t>(members));
}

std::uint64_t capacity_c(const IndexSetSpec& e) {
    auto members = e.enumerate();
    return capacity_c(std::span<const std::uint64_t>(members));
}

std::vector<std::uint64_t> build_Bp(int p, int s) {
    check_block_args("build_Bp", p, s);
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 1ull << (p - 1); k < (1ull << p); ++k) {
        if (slice_member_B(k, s)) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<std::uint64_t> build_bp(int p, int s) {
    check_block_args("build_bp", p, s);
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 1ull << (p - 1); k < (1ull << p); ++k) {
        if (slice_member_b(k, s)) {
            out.push_back(k);
        }
    }
    return out;
}

std::uint64_t closed_form_C_Bp(int p, int s) {
    check_block_args("closed_form_C_Bp", p, s);
    std::uint64_t total = 0;
    for (int i = 0; i <= s; ++i) {
        total += static_cast<std::uint64_t>(i) << (p - i);
    }
    return total;
}

std::uint64_t closed_form_c_bp(int p, int s) {
    check_block_args("closed_form_c_bp", p, s);
    if (p > 57) {
        throw std::overflow_error("closed_form_c_bp: p too large for 64-bit evaluation");
    }
    std::uint64_t total = 0;
    std::uint64_t binom = 1; // C(p, 0)
    for (int i = 0; i <= p; ++i) {
        if (i >= s) {
            total += static_cast<std::uint64_t>(i) * binom;
        }
        if (i < p) {
            binom = binom * static_cast<std::uint64_t>(p - i) / static_cast<std::uint64_t>(i + 1);
        }
    }
    return total;
}

std::vector<CapacityComparisonRow> closed_form_comparison(int p_min, int p_max) {
    if (p_min < 2 || p_max < p_min || p_max > 57) {
        throw std::invalid_argument("closed_form_comparison: need 2 <= p_min <= p_max <= 57");
    }
    std::vector<CapacityComparisonRow> rows;
    for (int p = p_min; p <= p_max; ++p) {
        for (int s = 0; s <= p; ++s) {
            CapacityComparisonRow row;
            row.p = p;
            row.s = s;
            auto B = build_Bp(p, s);
            auto bb = build_bp(p, s);
            row.direct_C_B = capacity_C(std::span<const std::uint64_t>(B));
            row.direct_c_b = capacity_c(std::span<const std::uint64_t>(bb));
            row.closed_C_B = closed_form_C_Bp(p, s);
            row.closed_c_b = closed_form_c_bp(p, s);
            rows.push_back(row);
        }
    }
    return rows;
}

ThicknessReport thickness_report(const IndexSetSpec& family, int p_max) {
    if (!family.is_family()) {
        throw std::invalid_argument("thickness_report: spec is not a family union");
    }
    if (p_max < family.p_lo) {
        throw std::invalid_argument("thickness_report: p_max is below the family's first block");
    }
    const bool small_b = family.kind == IndexSetSpec::Kind::FamilyUnionSmallB;
    const int p_last = std::min(family.p_hi, p_max);

    ThicknessReport report;
    report.uses_small_b = small_b;
    double partial = 0.0;
    for (int p = family.p_lo; p <= p_last; ++p) {
        ThicknessRow row;
        row.p = p;
        row.s_p = family.s_rule.eval(p);
        if (row.s_p <= p) {
            for (std::uint64_t k = 1ull << (p - 1); k < (1ull << p); ++k) {
                bool in = small_b ? slice_member_b(k, row.s_p) : slice_member_B(k, row.s_p);
                if (in) {
                    ++row.slice_size;
                    row.slice_capacity += static_cast<std::uint64_t>(small_b ? b_of(k) : nu_of(k));
                }
            }
        }
        row.term = std::ldexp(static_cast<double>(row.slice_capacity), -p);
        partial += row.term;
        row.partial_sum = partial;
        report.rows.push_back(row);
    }

    bool constant = true;
    bool nondecreasing = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        if (report.rows[i].s_p != report.rows[i - 1].s_p) {
            constant = false;
        }
        if (report.rows[i].s_p < report.rows[i - 1].s_p) {
            nondecreasing = false;
        }
    }
    report.s_trend = constant ? "constant (not diverging)"
                              : (nondecreasing ? "nondecreasing" : "nonmonotone");
    return report;
}

DensitySample density_rho(const IndexSetSpec& e, std::uint64_t m) {
    if (m == 0) {
        throw std::invalid_argument("density_rho: m must be >= 1");
    }
    DensitySample sample;
    sample.m = m;
    sample.count = e.count_up_to(m);
    sample.rho = static_cast<double>(sample.count) / static_cast<double>(m);
    return sample;
}

std::vector<DensitySample> density_trend(const IndexSetSpec& e,
                                         std::span<const std::uint64_t> m_values) {
    for (std::size_t i = 1; i < m_values.size(); ++i) {
        if (m_values[i] <= m_values[i - 1]) {
            throw std::invalid_argument("density_trend: m values must be increasing");
        }
    }
    std::vector<DensitySample> out;
    out.reserve(m_values.size());
    for (auto m : m_values) {
        out.push_back(density_rho(e, m));
    }
    return out;
}

} // namespace diffchain
