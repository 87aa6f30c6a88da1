#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "symdyn/words.hpp"

namespace symdyn {

struct CodebookSpec {
    std::uint32_t alphabet_size = 2;  // N
    std::size_t length = 1;           // n
    Rational alpha;                   // separation, 0 < alpha < (N-1)/N
    Rational epsilon;                 // balance tolerance, 0 < epsilon < 1

    void validate() const;
    // Largest mismatch count that violates d_H > alpha, i.e. floor(alpha n).
    std::size_t separation_radius() const;
    // ceil(alpha n) - 1, the radius of the open ball {d_H < alpha}.
    std::size_t open_ball_radius() const;
};

struct RateReport {
    double f_alpha = 0;       // rate function at alpha, base 2
    unsigned delta_exponent = 0;
    Rational delta;           // 2^-delta_exponent
    double g = 0;             // log2 N - (1 + delta) f(alpha)
    double lambda = 0;        // 2^(g/2)
    Rational lambda_lower;    // dyadic lower bound for lambda, > 1
    std::size_t threshold = 0;  // M
};

// Sum_{j<=radius} C(n, j) (N-1)^j.
mpz_class ball_volume(std::size_t n, std::size_t radius, std::uint32_t alphabet_size);

// x log2(N-1) - x log2 x - (1-x) log2(1-x); 0 at x = 0.
double rate_function(double x, std::uint32_t alphabet_size);

// Lower bound on log2 of (1/n) floor((1-eps) N^n / 2^(n(1+delta)f)).
double log2_floor_count_lower(const CodebookSpec& spec, const RateReport& r, std::size_t n);

RateReport growth_params(const CodebookSpec& spec, std::size_t search_limit = 200000);

// Words in {0..N-1}^n whose letter counts all lie strictly inside
// ((1-eps) n/N, (1+eps) n/N).
mpz_class balanced_count(std::size_t n, std::uint32_t alphabet_size, const Rational& epsilon);

// Allowed letter counts for a balanced word, as [lo, hi]; empty if lo > hi.
std::pair<std::size_t, std::size_t> balanced_count_range(std::size_t n, std::uint32_t alphabet_size,
                                                          const Rational& epsilon);

bool is_balanced(const Word& w, const Rational& epsilon);

enum class CodebookMode { Auto, Exhaustive, Sampling };

struct CodebookOptions {
    CodebookMode mode = CodebookMode::Auto;
    std::uint64_t exhaustive_limit = std::uint64_t{1} << 24;  // max N^n for exhaustive
    std::uint64_t candidate_budget = 1'000'000;  // balanced candidates examined when sampling
    std::uint64_t raw_sample_cap = 0;            // 0 means 64 x candidate_budget
    std::optional<std::size_t> target_size;      // stop once this many words are accepted
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct Codebook {
    CodebookSpec spec;
    CodebookMode mode = CodebookMode::Exhaustive;
    std::uint64_t seed = 0;
    std::vector<Word> words;
    std::uint64_t candidates_examined = 0;  // balanced candidates tested against the book
    std::uint64_t raw_samples = 0;
    bool budget_exhausted = false;
    bool target_reached = false;
};

Codebook build_codebook(const CodebookSpec& spec, const CodebookOptions& options);

std::string mode_name(CodebookMode m);
CodebookMode parse_mode(const std::string& s);

std::string serialize_codebook(const Codebook& book, const std::optional<RateReport>& report);
Codebook parse_codebook(const std::string& text);

// Independent re-verification; shares no code with the builder.
struct CodebookAudit {
    bool balanced = true;
    bool separated = true;
    bool rotation_distinct = true;
    std::size_t min_mismatches = 0;  // over all pairs; length if fewer than two words
    std::string first_failure;
    bool ok() const { return balanced && separated && rotation_distinct; }
};

CodebookAudit audit_codebook(const std::vector<Word>& words, const Rational& alpha,
                             const Rational& epsilon, unsigned threads = 1);

}  // namespace symdyn
