#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "symdyn/codebook.hpp"
#include "symdyn/magnitude.hpp"
#include "symdyn/measures.hpp"
#include "symdyn/sequences.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

// eps_i for i >= 0 and alpha_i for i >= 1; alpha_0 = 1/3. Explicit values
// cover a prefix, the default geometric schedule continues after it:
// eps_i = 1/(200 2^i), alpha_i = 1 - 1/(20 2^i).
struct Thm2Schedules {
    std::vector<Rational> eps;    // eps_0, eps_1, ...
    std::vector<Rational> alpha;  // alpha_1, alpha_2, ...

    Rational epsilon(unsigned i) const;
    Rational alpha_at(unsigned i) const;
    // prod_{i>=1} (1 - eps_i) and prod_{i>=1} alpha_i from below: exact
    // products over the explicit prefix and `levels`, times 1 - (tail sum).
    Rational eps_product_lower(unsigned levels) const;
    Rational alpha_product_lower(unsigned levels) const;
    nlohmann::json to_json() const;
    static Thm2Schedules from_json(const nlohmann::json& j);
};

// No admissible length within the configured search range.
class SearchHorizonExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Thm2Params {
    IntegerSequence a = IntegerSequence::log();
    IntegerSequence b = IntegerSequence::polynomial(Rational(1), 2);
    Thm2Schedules schedules;
    unsigned levels = 2;
    std::uint64_t materialize_budget = 1'000'000;  // symbols per word
    std::uint64_t seed = 0;
    unsigned candidate_factor = 4;  // candidates examined per required word
    std::size_t search_min = 2, search_max = 400;  // level-1 word lengths tried
    unsigned threads = 1;

    nlohmann::json to_json() const;
    static Thm2Params from_json(const nlohmann::json& j);
};

// Certified codebook rate for K letters:
// g = log2 K - (1 + delta) f(alpha), with rational bounds g_lo <= g <= g_hi.
struct CertifiedRate {
    mpz_class letters;
    Rational alpha, epsilon, delta;
    Rational g_lo, g_hi;
    Rational lambda;  // rational with log2(lambda) <= g_lo / 2
    nlohmann::json to_json() const;
};

CertifiedRate certified_rate(const mpz_class& letters, const Rational& alpha, const Rational& epsilon);

// Bounds on k(n) = (1/n) floor((1 - eps) K^n / 2^(n (1 + delta) f(alpha))).
// The lower bound is -inf when the floor may vanish.
Magnitude floor_count_bounds(const CertifiedRate& r, const Magnitude& n);

// Expected greedy capacity (1/p) ln(1 + p m) for m random balanced binary
// candidates, p the chance that two of them are within the separation radius.
double predicted_capacity(const CodebookSpec& spec, std::uint64_t candidates);

struct SearchTrial {
    std::size_t n = 0;
    std::uint64_t target = 0;
    double predicted = 0;
    std::string outcome;  // "built", "short", "screened", "inadmissible"
    std::uint64_t size = 0, candidates = 0;
    nlohmann::json to_json() const;
};

struct Thm2Level {
    unsigned level = 1;
    Magnitude N, k, P, M;
    Magnitude word_length;  // |w^j| = N_j prod_{1<=s<j} N_s M_s
    Magnitude letters;      // k_{j-1}; 2 at level 1
    nlohmann::json P_definition, M_definition;
    Rational alpha, epsilon;  // alpha_{j-1}, eps_{j-1} used by the level-j codebook
    Rational lambda;          // certifies k_j > lambda^N_j > 4 b_{N_j}
    std::string lambda_basis; // "witness" (materialized) or "rate"
    std::optional<CertifiedRate> rate;
    nlohmann::json estimated_rate;  // uncertified rate for the letters, informational
    std::vector<SearchTrial> search;
    bool materialized = false;
    std::string words_file;
    std::string words_checksum;

    nlohmann::json to_json() const;
    static Thm2Level from_json(const nlohmann::json& j);
};

struct PhaseLedger {
    Thm2Params params;
    std::vector<Thm2Level> levels;

    nlohmann::json to_json() const;
    static PhaseLedger from_json(const nlohmann::json& j);
};

// Level-j words as letters of the level-j codebook (alphabet k_{j-1}) and,
// when they fit the budget, expanded to {0,1}.
struct LevelWords {
    unsigned level = 1;
    Codebook letters;
    std::vector<Word> words;  // empty unless materialized
};

struct LoudResult {
    Thm2Level level;
    std::optional<LevelWords> words;
};

// Level i+1 from level i (i = 0: the base phase over {0,1}). The ledger
// must hold levels 1..i with their quiet phases done.
LoudResult loud_phase(const PhaseLedger& ledger, unsigned i, const Thm2Params& params,
                      const LevelWords* previous = nullptr);

// Fills P_j and M_j of ledger level j. Repetitions v = w^M are never
// materialized beyond the budget.
void quiet_phase(PhaseLedger& ledger, unsigned j, const Thm2Params& params);

// w_j = v_{a_1} v_{a_2} ... for each codebook word a, v_t = w_t^M.
std::vector<Word> substitute(const Codebook& letters, const std::vector<Word>& previous, std::size_t repeats);

enum class CheckStatus { Satisfied, Violated, Deferred };

std::string status_name(CheckStatus s);

struct Thm2Check {
    std::string condition;  // c1..c6, or a global name
    std::string name;
    CheckStatus status = CheckStatus::Deferred;
    std::string lhs, rhs;
    std::string note;
    nlohmann::json to_json() const;
};

struct InductionCertificate {
    unsigned level = 0;
    std::vector<Thm2Check> checks;

    // Violated if any check is, else deferred if any is, else satisfied.
    CheckStatus condition(const std::string& c) const;
    bool ok() const;
    nlohmann::json to_json() const;
};

struct LedgerCertificate {
    std::vector<Thm2Check> global;
    std::vector<InductionCertificate> levels;
    bool ok() const;
    nlohmann::json to_json() const;
};

// Conditions c1..c6 at one level. Words are the materialized level-j
// codebook (for c3, c5); without them those checks are deferred.
InductionCertificate verify_induction(const PhaseLedger& ledger, unsigned level, const LevelWords* words = nullptr,
                                      unsigned threads = 1);

// Interleaving, schedule products and monotonicity, a_n <= b_n at every
// queried index, plus verify_induction at each level.
LedgerCertificate certify_ledger(const PhaseLedger& ledger, const std::vector<const LevelWords*>& words,
                                 unsigned threads = 1);

struct Thm2Run {
    PhaseLedger ledger;
    std::vector<LevelWords> words;  // materialized levels, in order
};

// Loud and quiet phases for levels 1..params.levels.
Thm2Run build_thm2(const Thm2Params& params);

// Quiet-phase mass on a sample from the concatenation subshift of
// v_t = w_t^M: generic-point surrogate for the measure part of c6.
QuietCertificate quiet_sample_check(const std::vector<Word>& words, std::size_t M, std::size_t P,
                                    std::uint64_t sample_length, std::uint64_t seed,
                                    std::optional<Rational> slack = std::nullopt);

// 64-bit FNV-1a of a side file's text; detects edits, not an authenticator.
std::string text_checksum(const std::string& text);

}  // namespace symdyn
