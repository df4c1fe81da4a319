#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace diffchain {

// Rule producing the per-block threshold s_p of a family union. Restricted to
// a small grammar so set specifications stay serializable and reproducible.
struct SRule {
    enum class Kind { Constant, Linear, Log2, Sqrt };

    Kind kind = Kind::Constant;
    double a = 0.0; // Linear: ceil(a*p + b); Constant: the value (in a)
    double b = 0.0;

    long long eval(int p) const; // clamped to >= 0
    std::string to_string() const;
};

// A finite, enumerable description of an index set E, subset of {1, 2, ...}.
// Enumeration is strictly increasing and duplicate-free; 0 is never a member.
struct IndexSetSpec {
    enum class Kind { ExplicitList, Mersenne, FamilyUnionB, FamilyUnionSmallB, PredicateOnRange };
    enum class Pred { NuGe, NuEq, BGe, BEq, Even, Odd, All };

    Kind kind = Kind::ExplicitList;

    std::vector<std::uint64_t> values; // ExplicitList (sorted, unique)
    int m_max = 0;                     // Mersenne: {2^m - 1 : 1 <= m <= m_max}
    int p_lo = 0, p_hi = 0;            // family unions over dyadic blocks L_p
    SRule s_rule{};
    std::uint64_t range_lo = 0, range_hi = 0; // PredicateOnRange
    Pred pred = Pred::All;
    std::uint64_t pred_arg = 0;

    bool contains(std::uint64_t k) const;
    std::vector<std::uint64_t> enumerate() const; // full member list
    std::uint64_t count_up_to(std::uint64_t m) const;
    bool is_family() const {
        return kind == Kind::FamilyUnionB || kind == Kind::FamilyUnionSmallB;
    }
    std::string to_string() const; // round-trips through parse_index_set

    static IndexSetSpec explicit_list(std::vector<std::uint64_t> v);
    static IndexSetSpec mersenne(int m_max);
    static IndexSetSpec family_B(int p_lo, int p_hi, SRule s);
    static IndexSetSpec family_b(int p_lo, int p_hi, SRule s);
    static IndexSetSpec predicate_on_range(std::uint64_t lo, std::uint64_t hi, Pred pred,
                                           std::uint64_t arg = 0);
};

// Set-spec mini-language (case-sensitive, comma-separated, no whitespace):
//   list:3,7,15
//   mersenne:mmax=20
//   B:p=2..16,s=log2        b:p=2..16,s=log2
//   s forms: log2 | sqrt | <integer> | lin:<a>:<b>   (ceil(a*p + b))
//   pred:range=1..65536,<predicate>
//   predicates: nu>=N | nu==N | b>=N | b==N | even | odd | all
IndexSetSpec parse_index_set(const std::string& text);

// Discrete capacities: sum of nu(k) resp. b(k) over the set.
std::uint64_t capacity_C(std::span<const std::uint64_t> members);
std::uint64_t capacity_c(std::span<const std::uint64_t> members);
std::uint64_t capacity_C(const IndexSetSpec& e);
std::uint64_t capacity_c(const IndexSetSpec& e);

// Members of the dyadic block L_p = [2^(p-1), 2^p) with nu >= s resp. b >= s.
std::vector<std::uint64_t> build_Bp(int p, int s);
std::vector<std::uint64_t> build_bp(int p, int s);

// The published closed forms, evaluated verbatim. These are REPORTED next to
// the direct sums, never asserted equal to them: at p = 3 both disagree with
// direct enumeration, so direct summation is the ground truth here.
std::uint64_t closed_form_C_Bp(int p, int s);
std::uint64_t closed_form_c_bp(int p, int s);

struct CapacityComparisonRow {
    int p = 0;
    int s = 0;
    std::uint64_t direct_C_B = 0;
    std::uint64_t closed_C_B = 0;
    std::uint64_t direct_c_b = 0;
    std::uint64_t closed_c_b = 0;
};
std::vector<CapacityComparisonRow> closed_form_comparison(int p_min, int p_max);

// Per-block capacity series of a family union. Divergence of the full series
// is not finitely decidable; the report states partial sums and the s_p trend
// over the sampled window only.
struct ThicknessRow {
    int p = 0;
    long long s_p = 0;
    std::uint64_t slice_size = 0;
    std::uint64_t slice_capacity = 0; // C for B-families, c for small-b families
    double term = 0.0;                // 2^-p * slice_capacity
    double partial_sum = 0.0;
};
struct ThicknessReport {
    std::vector<ThicknessRow> rows;
    std::string s_trend; // "constant (not diverging)" | "nondecreasing" | "nonmonotone"
    bool uses_small_b = false;
};
ThicknessReport thickness_report(const IndexSetSpec& family, int p_max);

// Natural-density samples: exact member counts, no sampling.
struct DensitySample {
    std::uint64_t m = 0;
    std::uint64_t count = 0;
    double rho = 0.0; // count / m
};
DensitySample density_rho(const IndexSetSpec& e, std::uint64_t m);
std::vector<DensitySample> density_trend(const IndexSetSpec& e,
                                         std::span<const std::uint64_t> m_values);

} // namespace diffchain
