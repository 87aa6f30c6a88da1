#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <gmpxx.h>
#include <json.hpp>

#include "symdyn/words.hpp"

namespace symdyn {

// Endpoint of an interval that may be -infinity.
struct Bound {
    bool neg_inf = false;
    Rational v;

    static Bound minus_infinity() { return {true, Rational(0)}; }
    friend bool operator<(const Bound& a, const Bound& b);
    friend bool operator==(const Bound& a, const Bound& b);
};

class Magnitude;
bool certainly_less(const Magnitude& a, const Magnitude& b);

// Nonnegative quantity known either exactly or through bounds on an
// iterated base-2 logarithm: log2^height(x) lies in [lo, hi]. Height 0
// bounds x itself. Every operation returns bounds that provably contain
// the true result.
class Magnitude {
public:
    // Exact integers wider than this are demoted to height-1 bounds.
    static constexpr std::size_t kExactBitsCap = std::size_t{1} << 26;

    Magnitude() : Magnitude(mpz_class(0)) {}
    explicit Magnitude(const mpz_class& v);
    explicit Magnitude(unsigned long v) : Magnitude(mpz_class(v)) {}
    static Magnitude interval(const Rational& lo, const Rational& hi);
    static Magnitude tower(unsigned height, Bound lo, Bound hi);
    static Magnitude tower(unsigned height, const Rational& lo, const Rational& hi);

    unsigned height() const noexcept { return height_; }
    const Bound& lo() const noexcept { return lo_; }
    const Bound& hi() const noexcept { return hi_; }
    bool is_exact() const noexcept { return exact_; }
    const mpz_class& value() const;  // throws unless exact
    std::optional<mpz_class> exact_value() const;

    // Same quantity with bounds expressed at a greater height.
    Magnitude lifted(unsigned target) const;

    std::string describe() const;
    nlohmann::json to_json() const;
    static Magnitude from_json(const nlohmann::json& j);

private:
    unsigned height_ = 0;
    bool exact_ = true;
    mpz_class value_;
    Bound lo_, hi_;
};

// Certified dyadic bounds on log2 of a positive rational, accurate to ~2^-40.
Rational log2_lower(const Rational& q);
Rational log2_upper(const Rational& q);

Magnitude mag_log2(const Magnitude& m);
Magnitude mag_exp2(const Magnitude& m);
Magnitude mag_add(const Magnitude& a, const Magnitude& b);
Magnitude mag_mul(const Magnitude& a, const Magnitude& b);
Magnitude mag_mul(const Magnitude& a, const Rational& c);
// y + d for an unknown d in [dlo, dhi].
Magnitude mag_add_real(const Magnitude& y, const Rational& dlo, const Rational& dhi);
// Multiply by an unknown factor in [2^dlo, 2^dhi].
Magnitude mag_scale_log(const Magnitude& m, const Rational& dlo, const Rational& dhi);
Magnitude mag_pow(const Rational& base, const Magnitude& exponent);
Magnitude mag_pow(const Magnitude& base, unsigned long exponent);

// True only when a < b is proven.
bool certainly_less(const Magnitude& a, const Magnitude& b);
inline bool certainly_greater(const Magnitude& a, const Magnitude& b) { return certainly_less(b, a); }

std::string rational_to_text(const Rational& q);
Rational rational_from_text(const std::string& s);
std::string integer_to_text(const mpz_class& z);
mpz_class integer_from_text(const std::string& s);

}  // namespace symdyn
