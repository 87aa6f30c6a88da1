#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/language.hpp"
#include "symdyn/sequences.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

// Window frequencies of a finite sample: counts over a common denominator.
struct EmpiricalMeasure {
    std::size_t n = 0;
    std::map<Word, std::uint64_t> counts;
    std::uint64_t total = 0;  // |x| - n + 1
    nlohmann::json provenance = nlohmann::json::object();

    Rational freq(const Word& w) const;
    Rational mass(const WordSet& words) const;
    // word,numerator,denominator with unreduced counts over `total`.
    std::string to_csv(unsigned offset = 0) const;
};

// Seeded concatenation of generators drawn with the given weights
// (exact rationals summing to 1), truncated to `length`.
Word sample_point(const ConcatSubshift& x, std::size_t length, std::uint64_t seed,
                  const std::vector<Rational>& weights);
Word sample_point(const ConcatSubshift& x, std::size_t length, std::uint64_t seed);

EmpiricalMeasure empirical_measure(const Word& x, std::size_t n);

struct QuietCertificate {
    std::size_t P = 0, N = 0, M = 0;
    std::size_t pattern_count = 0;  // |W_P|
    Rational mass;                  // empirical mass of W_P
    Rational bound;                 // 1 - (P-1)/(NM)
    Rational slack;                 // finite-sample allowance
    bool holds = false;             // mass >= bound - slack
    nlohmann::json to_json() const;
};

// Allowance for a sample of the given length starting at a block boundary:
// at most (len-1)/(NM) boundaries, each spoiling P-1 of the len-P+1
// windows, exceed the bound by at most (P-1)(P-2) / (NM (len-P+1)).
Rational quiet_finite_slack(std::size_t P, std::size_t N, std::size_t M, std::uint64_t sample_length);

// Mass of the length-P subwords of the generators v_i (each of length N*M)
// against 1 - (P-1)/(NM). `slack` overrides the finite-sample allowance.
QuietCertificate quiet_bound_check(const EmpiricalMeasure& m, const std::vector<Word>& generators, std::size_t P,
                                   std::size_t N, std::size_t M, std::optional<Rational> slack = std::nullopt);

enum class CoverMethod { Exact, Greedy };

struct CoverResult {
    std::vector<Word> centers;
    Rational covered_mass;
    Rational epsilon;
    CoverMethod method = CoverMethod::Greedy;
    std::size_t universe_size = 0;
    bool success = false;  // covered_mass > 1 - epsilon
    std::size_t size() const { return centers.size(); }
    nlohmann::json to_json() const;
};

inline constexpr std::size_t kExactCoverLimit = 20;

class CoverLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Fewest centers u in `universe` whose open balls {d_H(u, w) < eps} carry
// mass > 1 - eps. Greedy takes the largest uncovered gain, ties to the
// lexicographically least center.
CoverResult covering_number(const EmpiricalMeasure& m, const Rational& eps, const WordSet& universe,
                            CoverMethod method, std::size_t exact_limit = kExactCoverLimit, unsigned threads = 1);

struct CommonPoint {
    std::vector<std::size_t> indices;  // k set indices, 1-based, increasing
    std::size_t s = 0;                 // common element
    std::size_t multiplicity = 0;      // sets containing s
};

// For 2k-1 subsets of {1..n}, each of size >= n/2, a point lying in at
// least k of them.
CommonPoint find_common_point(const std::vector<std::vector<std::size_t>>& sets, std::size_t n);

struct KEstimate {
    std::size_t n = 0;
    Rational eps;
    mpz_class K;
};

struct SlowEntropyRow {
    KEstimate estimate;
    mpz_class a, b;
    Rational ratio_a, ratio_b;  // K / a_n, K / b_n
};

std::vector<SlowEntropyRow> slow_entropy_report(const std::vector<KEstimate>& ks, const IntegerSequence& a,
                                                const IntegerSequence& b);
std::string slow_entropy_csv(const std::vector<SlowEntropyRow>& rows);

}  // namespace symdyn
