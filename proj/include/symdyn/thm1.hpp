#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "symdyn/language.hpp"
#include "symdyn/sequences.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

// Binary blocks substituted for 0 and 1 in the balanced base variant.
inline constexpr const char* kBalancedZero = "01100110";
inline constexpr const char* kBalancedOne = "11100100";

// One level of the nested construction: 2^k words of a common length.
struct LevelFamily {
    unsigned level = 1;
    std::vector<Word> words;
    std::size_t n = 0;        // complexity checkpoint n_k
    std::size_t repeats = 0;  // N_k: periodic blocks (level 1: the run length)
    std::size_t stutter = 0;  // S_k used to build this level from the previous one
    bool balanced = false;
    std::size_t padded_words = 0;  // words extended by the padding rule

    std::size_t length() const { return words.front().size(); }
    nlohmann::json provenance() const;
};

// w_1 = 0^N 1, w_2 = 0 1^N, optionally with each letter replaced by an 8-block.
LevelFamily base_level(std::size_t N1, bool balanced = false);

// Level k+1 from level k with R periodic blocks of (w_j^S w_{j+1}) or (w_j^S w_j).
// Indices past 2^k wrap to 1. Requires R > |w^k| 2^k and S >= 1.
LevelFamily next_level(const LevelFamily& family, std::size_t R, std::size_t S);

// Length of every level-(k+1) word without building it.
mpz_class next_length(const mpz_class& length, unsigned level, const mpz_class& R, const mpz_class& S);

struct PairVerdict {
    std::size_t i = 0, j = 0;  // 1-based, i < j
    bool distinct = false;
};

struct DistinctCertificate {
    unsigned level = 0;
    bool ok = true;
    std::vector<PairVerdict> pairs;
    nlohmann::json to_json() const;
};

// No length-|w| subword shared by w_i w_i and w_j w_j, for every pair.
DistinctCertificate verify_distinct_subwords(const LevelFamily& family, unsigned threads = 1);

struct ContainmentCertificate {
    unsigned level = 0;
    bool ok = true;
    std::size_t gap_bound = 0;  // syndetic gap for previous-level words
    std::vector<std::string> missing;  // "w_i^{k+1} lacks w_j^k"
    nlohmann::json to_json() const;
};

// Every word of `upper` contains every word of `lower`.
ContainmentCertificate verify_containment(const LevelFamily& lower, const LevelFamily& upper);

struct ComplexityCertificate {
    unsigned level = 0;
    std::size_t n = 0;
    std::optional<std::uint64_t> exact;          // none when over budget
    std::optional<mpz_class> structural_bound;   // 4n-2 at level 1, three-term bound above
    std::optional<mpz_class> headline_bound;     // (C(2^k,2)+1) n for k >= 2
    mpz_class corrected_bound;                   // see corrected_complexity_bound
    std::optional<bool> structural_holds;
    std::optional<bool> headline_holds;
    std::optional<bool> corrected_holds;
    std::optional<bool> level_one_equality;      // exact == 4n-2, plain level 1 only
    std::string status;                          // "exact" or "structural bound only"
    bool ok() const { return corrected_holds.value_or(true) && structural_holds.value_or(true); }
    nlohmann::json to_json() const;
};

// Upper bound on p(n) for 2^k words of length L built from level k-1 with
// stutter S, n <= L. Windows inside one word: one period (S+1)|w^{k-1}| of
// the periodic region plus 2(2^{k-1}-1)|w^{k-1}| starts touching the prefix
// or suffix region. Windows crossing a boundary: n-1 starts for each of the
// 4^k ordered pairs. At level 1 (no regions) the inside count is L-n+1.
mpz_class corrected_complexity_bound(unsigned level, const mpz_class& length, const mpz_class& n,
                                     const mpz_class& previous_length, const mpz_class& S);

// `previous` is required above level 1 for the three-term bound.
ComplexityCertificate complexity_certificate(const LevelFamily& family, const LevelFamily* previous,
                                             std::uint64_t budget = kDefaultWindowBudget);

// Default delta_k = 1 - 1/(40 2^k), or explicit values for the first levels.
struct DeltaSchedule {
    std::vector<Rational> values;  // empty means the default geometric schedule

    Rational at(unsigned k) const;
    // Lower bound on prod_{k >= 1} delta_k when certifiable, else the
    // partial product over the first `levels` values.
    Rational product_lower(unsigned levels, bool* includes_tail = nullptr) const;
    nlohmann::json to_json() const;
    static DeltaSchedule from_json(const nlohmann::json& j);
};

struct Inequality {
    unsigned level = 0;
    std::string name;
    std::string lhs, rhs;  // exact decimal or p/q text
    bool holds = false;
    nlohmann::json to_json() const;
};

struct Thm1Level {
    unsigned k = 1;
    mpz_class N;       // N_k
    mpz_class S;       // S_{k-1} used to reach this level (0 at level 1)
    mpz_class length;  // |w^k|
    mpz_class n;       // n_k
    mpz_class M;       // M_k
    Rational delta;    // delta_k
};

struct Thm1Params {
    IntegerSequence p = IntegerSequence::polynomial(Rational(1), 2);
    bool balanced = false;
    std::uint64_t horizon = 0;
    DeltaSchedule delta;
    std::vector<Thm1Level> levels;

    nlohmann::json to_json() const;
    static Thm1Params from_json(const nlohmann::json& j);
};

inline constexpr std::uint64_t kDefaultHorizon = std::uint64_t{1} << 16;

// Least m with p_n > k (C(2^k,2)+1) n for all n in [m, horizon]. Throws
// std::domain_error when the inequality fails at the horizon itself.
mpz_class complexity_threshold(const IntegerSequence& p, unsigned k, std::uint64_t horizon);

// Smallest admissible N_k, S_k level by level through k_max.
Thm1Params auto_params(const IntegerSequence& p, unsigned k_max, const DeltaSchedule& delta = {},
                       bool balanced = false, std::uint64_t horizon = kDefaultHorizon);

// Every recorded inequality, recomputed with exact arithmetic.
std::vector<Inequality> check_params(const Thm1Params& params);

// P(n_k)/p_{n_k} < 1/k for a known upper bound on P(n_k).
Inequality liminf_checkpoint(const Thm1Params& params, unsigned k, const mpz_class& complexity_upper);

// corrected_complexity_bound evaluated from the ledger alone.
mpz_class ledger_complexity_bound(const Thm1Params& params, unsigned k);

// Families for the first `levels` levels of params.
std::vector<LevelFamily> build_families(const Thm1Params& params, unsigned levels);

// Stage-t designated windows for the branch choices bits[0..t-1]: length
// (S+1)|w^t| windows of (w_i)^inf for type 0, of (w_i^S w_{i+1})^inf for type 1.
WordSet designated_set(const std::vector<LevelFamily>& families, const std::vector<int>& bits, unsigned stage);

// Active word index at each stage: i_1 = 1, i_{t+1} = 2 i_t - a_t.
std::vector<std::size_t> branch_indices(const std::vector<int>& bits);

// Leading `length` symbols of the periodic point built from w^{T+1}_{i_{T+1}}.
Word branch_point(const std::vector<LevelFamily>& families, const std::vector<int>& bits, std::size_t length);

}  // namespace symdyn
