#pragma once

#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "symdyn/magnitude.hpp"

namespace symdyn {

struct IndexChoice {
    Magnitude index;
    // {"form": "exact"} or {"form": "tower", "levels": l, "F": F, "minus_one": b}
    // meaning 2^(2^(...2^F)) with l exponentiations, minus one when flagged.
    nlohmann::json definition;
};

// Positive nondecreasing integer sequences indexed from 1.
//   polynomial:   floor(c n^d), at least 1
//   log:          floor(c floor(log2(n+1))) + 1
//   iterated-log: floor(c floor(log2(floor(log2(n+1)) + 1))) + 1
//   table:        explicit values for n = 1..T
class IntegerSequence {
public:
    enum class Kind { Polynomial, Log, IteratedLog, Table };

    static IntegerSequence polynomial(const Rational& coeff, unsigned degree);
    static IntegerSequence log(const Rational& coeff = Rational(1));
    static IntegerSequence iterated_log(const Rational& coeff = Rational(1));
    static IntegerSequence table(std::vector<mpz_class> values);
    static IntegerSequence from_json(const nlohmann::json& j);

    Kind kind() const noexcept { return kind_; }
    nlohmann::json to_json() const;
    std::string describe() const;

    mpz_class at(const mpz_class& n) const;
    mpz_class at(unsigned long n) const { return at(mpz_class(n)); }

    // Certified bounds on the value at an index known only through bounds.
    Magnitude at(const Magnitude& n) const;

    // An index P > after with a_P > x, proven with at(Magnitude). Minimal
    // when x and after are exact; otherwise chosen with slack.
    IndexChoice least_index_exceeding(const Magnitude& x, const Magnitude& after) const;

    bool unbounded() const;

private:
    Kind kind_ = Kind::Polynomial;
    Rational coeff_ = 1;
    unsigned degree_ = 1;
    std::vector<mpz_class> table_;
};

}  // namespace symdyn
