#include "symdyn/magnitude.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace symdyn {

namespace {

constexpr int kLogBits = 40;

Rational dyadic(long whole, double frac, bool round_up) {
    double scaled = std::ldexp(frac, kLogBits);
    mpz_class k(round_up ? std::ceil(scaled) + 2 : std::floor(scaled) - 2);
    mpz_class den = 1;
    den <<= kLogBits;
    Rational q(k, den);
    q += whole;
    q.canonicalize();
    return q;
}

void log2_parts(const mpz_class& z, long& exp, double& frac) {
    double d = mpz_get_d_2exp(&exp, z.get_mpz_t());
    frac = std::log2(d);
}

Rational log2_bound(const Rational& q, bool upper) {
    if (q <= 0) throw std::domain_error("log2 of a nonpositive value");
    long en = 0, ed = 0;
    double fn = 0, fd = 0;
    log2_parts(q.get_num(), en, fn);
    log2_parts(q.get_den(), ed, fd);
    return dyadic(en - ed, fn - fd, upper);
}

Bound log2_of_bound(const Bound& b, bool upper) {
    if (b.neg_inf || b.v <= 0) return Bound::minus_infinity();
    return {false, log2_bound(b.v, upper)};
}

Bound add_bounds(const Bound& a, const Bound& b) {
    if (a.neg_inf || b.neg_inf) return Bound::minus_infinity();
    return {false, a.v + b.v};
}

Bound add_const(const Bound& a, const Rational& c) {
    if (a.neg_inf) return a;
    return {false, a.v + c};
}

const Bound& max_bound(const Bound& a, const Bound& b) { return a < b ? b : a; }

std::size_t bits(const mpz_class& z) { return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2); }

}  // namespace

bool operator<(const Bound& a, const Bound& b) {
    if (a.neg_inf) return !b.neg_inf;
    if (b.neg_inf) return false;
    return a.v < b.v;
}

bool operator==(const Bound& a, const Bound& b) {
    if (a.neg_inf || b.neg_inf) return a.neg_inf == b.neg_inf;
    return a.v == b.v;
}

// Y + d for d in [dlo, dhi], Y positive, bounds at Y's height.
Magnitude mag_add_real(const Magnitude& y, const Rational& dlo, const Rational& dhi) {
    if (y.height() == 0) return Magnitude::tower(0, add_const(y.lo(), dlo), add_const(y.hi(), dhi));
    // Need Y >= 2|d| for the halving/doubling rules, and iterates >= 2 above height 1.
    Rational mag = std::max(abs(dlo), abs(dhi));
    if (mag > 0) {
        Magnitude need = Magnitude::interval(2 * mag, 2 * mag);
        if (!certainly_less(need, y))
            throw std::logic_error("mag_add_real: magnitude too small for the tower rule");
        if (y.height() >= 2 && y.lo() < Bound{false, Rational(1)})
            throw std::logic_error("mag_add_real: tower bound needs log iterates of at least 2");
    }
    Bound lo = y.lo(), hi = y.hi();
    if (dlo < 0) lo = add_const(lo, Rational(-1));
    if (dhi > 0) hi = add_const(hi, Rational(1));
    return Magnitude::tower(y.height(), lo, hi);
}

Rational log2_lower(const Rational& q) { return log2_bound(q, false); }
Rational log2_upper(const Rational& q) { return log2_bound(q, true); }

Magnitude::Magnitude(const mpz_class& v) {
    if (v < 0) throw std::domain_error("magnitude must be nonnegative");
    if (bits(v) > kExactBitsCap) {
        height_ = 1;
        exact_ = false;
        lo_ = {false, log2_lower(Rational(v))};
        hi_ = {false, log2_upper(Rational(v))};
        return;
    }
    value_ = v;
    lo_ = {false, Rational(v)};
    hi_ = lo_;
}

Magnitude Magnitude::interval(const Rational& lo, const Rational& hi) {
    if (hi < lo) throw std::logic_error("empty magnitude interval");
    if (lo == hi && lo.get_den() == 1 && lo >= 0) return Magnitude(lo.get_num());
    Magnitude m;
    m.exact_ = false;
    m.height_ = 0;
    m.lo_ = {false, lo};
    m.hi_ = {false, hi};
    return m;
}

Magnitude Magnitude::tower(unsigned height, Bound lo, Bound hi) {
    if (hi < lo) throw std::logic_error("empty magnitude interval");
    Magnitude m;
    m.exact_ = false;
    m.height_ = height;
    m.lo_ = std::move(lo);
    m.hi_ = std::move(hi);
    if (height == 0 && !m.lo_.neg_inf && m.lo_ == m.hi_ && m.lo_.v.get_den() == 1 && m.lo_.v >= 0)
        return Magnitude(m.lo_.v.get_num());
    return m;
}

Magnitude Magnitude::tower(unsigned height, const Rational& lo, const Rational& hi) {
    return tower(height, Bound{false, lo}, Bound{false, hi});
}

const mpz_class& Magnitude::value() const {
    if (!exact_) throw std::logic_error("magnitude is not exact: " + describe());
    return value_;
}

std::optional<mpz_class> Magnitude::exact_value() const {
    if (!exact_) return std::nullopt;
    return value_;
}

Magnitude Magnitude::lifted(unsigned target) const {
    Magnitude m = *this;
    while (m.height_ < target) {
        Bound lo = log2_of_bound(m.lo_, false);
        Bound hi = log2_of_bound(m.hi_, true);
        m = tower(m.height_ + 1, lo, hi);
    }
    return m;
}

namespace {

std::string approx(const Bound& b) {
    if (b.neg_inf) return "-inf";
    double d = b.v.get_d();
    char buf[64];
    if (std::isfinite(d) && std::fabs(d) < 1e300) {
        std::snprintf(buf, sizeof buf, "%.6g", d);
    } else {
        std::snprintf(buf, sizeof buf, "~2^%.6g", log2_lower(abs(b.v)).get_d());
    }
    return buf;
}

}  // namespace

std::string Magnitude::describe() const {
    if (exact_) {
        if (bits(value_) <= 64) return value_.get_str();
        char buf[96];
        std::snprintf(buf, sizeof buf, "exact ~2^%.6f (%zu bits)", log2_lower(Rational(value_)).get_d(),
                      bits(value_));
        return buf;
    }
    if (height_ == 0) return "[" + approx(lo_) + ", " + approx(hi_) + "]";
    return "log2^" + std::to_string(height_) + " in [" + approx(lo_) + ", " + approx(hi_) + "]";
}

std::string integer_to_text(const mpz_class& z) {
    if (bits(z) <= 128) return z.get_str();
    if (z < 0) return "-0x" + mpz_class(-z).get_str(16);
    return "0x" + z.get_str(16);
}

mpz_class integer_from_text(const std::string& s) {
    mpz_class z;
    bool neg = !s.empty() && s[0] == '-';
    std::string body = neg ? s.substr(1) : s;
    int base = 10;
    if (body.rfind("0x", 0) == 0) {
        body = body.substr(2);
        base = 16;
    }
    if (body.empty() || z.set_str(body, base) != 0) throw std::invalid_argument("bad integer '" + s + "'");
    return neg ? mpz_class(-z) : z;
}

std::string rational_to_text(const Rational& q) {
    if (q.get_den() == 1) return integer_to_text(q.get_num());
    return integer_to_text(q.get_num()) + "/" + integer_to_text(q.get_den());
}

Rational rational_from_text(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (s.find("0x") == std::string::npos) return parse_rational(s);
        return Rational(integer_from_text(s));
    }
    Rational q(integer_from_text(s.substr(0, slash)), integer_from_text(s.substr(slash + 1)));
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator");
    q.canonicalize();
    return q;
}

nlohmann::json Magnitude::to_json() const {
    if (exact_) return nlohmann::json{{"exact", integer_to_text(value_)}};
    auto text = [](const Bound& b) { return b.neg_inf ? std::string("-inf") : rational_to_text(b.v); };
    return nlohmann::json{{"height", height_}, {"lo", text(lo_)}, {"hi", text(hi_)}};
}

Magnitude Magnitude::from_json(const nlohmann::json& j) {
    if (j.contains("exact")) return Magnitude(integer_from_text(j.at("exact").get<std::string>()));
    auto parse = [](const std::string& s) {
        if (s == "-inf") return Bound::minus_infinity();
        return Bound{false, rational_from_text(s)};
    };
    return tower(j.at("height").get<unsigned>(), parse(j.at("lo").get<std::string>()),
                 parse(j.at("hi").get<std::string>()));
}

Magnitude mag_log2(const Magnitude& m) {
    if (m.height() >= 1) return Magnitude::tower(m.height() - 1, m.lo(), m.hi());
    return Magnitude::tower(0, log2_of_bound(m.lo(), false), log2_of_bound(m.hi(), true));
}

Magnitude mag_exp2(const Magnitude& m) {
    if (m.is_exact() && m.value() <= Magnitude::kExactBitsCap) {
        mpz_class v = 1;
        v <<= m.value().get_ui();
        return Magnitude(v);
    }
    return Magnitude::tower(m.height() + 1, m.lo(), m.hi());
}

Magnitude mag_add(const Magnitude& a, const Magnitude& b) {
    if (a.is_exact() && b.is_exact()) return Magnitude(a.value() + b.value());
    if (a.height() == 0 && b.height() == 0) return Magnitude::tower(0, add_bounds(a.lo(), b.lo()), add_bounds(a.hi(), b.hi()));
    unsigned h = std::max(a.height(), b.height());
    Magnitude x = a.lifted(h), y = b.lifted(h);
    Bound lo = max_bound(x.lo(), y.lo());
    Bound hi = max_bound(x.hi(), y.hi());
    if (h >= 2 && lo < Bound{false, Rational(0)})
        throw std::logic_error("mag_add: operands too small for the tower rule");
    return Magnitude::tower(h, lo, add_const(hi, Rational(1)));
}

Magnitude mag_mul(const Magnitude& a, const Magnitude& b) {
    if (a.is_exact() && b.is_exact()) {
        if (bits(a.value()) + bits(b.value()) <= Magnitude::kExactBitsCap) return Magnitude(a.value() * b.value());
    }
    if ((a.is_exact() && a.value() == 0) || (b.is_exact() && b.value() == 0)) return Magnitude(0ul);
    if (a.height() == 0 && b.height() == 0 && !a.lo().neg_inf && !b.lo().neg_inf &&
        bits(a.hi().v.get_num()) + bits(b.hi().v.get_num()) <= Magnitude::kExactBitsCap) {
        return Magnitude::tower(0, Bound{false, a.lo().v * b.lo().v}, Bound{false, a.hi().v * b.hi().v});
    }
    return mag_exp2(mag_add(mag_log2(a), mag_log2(b)));
}

Magnitude mag_mul(const Magnitude& a, const Rational& c) {
    if (c <= 0) throw std::domain_error("mag_mul: factor must be positive");
    if (a.height() == 0) return mag_mul(a, Magnitude::interval(c, c));
    return mag_scale_log(a, log2_lower(c), log2_upper(c));
}

Magnitude mag_scale_log(const Magnitude& m, const Rational& dlo, const Rational& dhi) {
    if (m.height() == 0) return mag_scale_log(m.lifted(1), dlo, dhi);
    if (m.height() == 1) return Magnitude::tower(1, add_const(m.lo(), dlo), add_const(m.hi(), dhi));
    return mag_exp2(mag_add_real(mag_log2(m), dlo, dhi));
}

Magnitude mag_pow(const Rational& base, const Magnitude& exponent) {
    if (base <= 0) throw std::domain_error("mag_pow: base must be positive");
    if (exponent.is_exact() && exponent.value() <= 1u << 20) {
        unsigned long e = exponent.value().get_ui();
        if ((bits(base.get_num()) + bits(base.get_den())) * e <= std::size_t{1} << 24) {
            mpz_class num, den;
            mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
            mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
            Rational q(num, den);
            q.canonicalize();
            return Magnitude::interval(q, q);
        }
    }
    if (base < 1) throw std::domain_error("mag_pow: large powers need a base above 1");
    Magnitude lg = Magnitude::interval(log2_lower(base), log2_upper(base));
    if (lg.lo() < Bound{false, Rational(0)}) lg = Magnitude::tower(0, Bound{false, Rational(0)}, lg.hi());
    return mag_exp2(mag_mul(exponent, lg));
}

Magnitude mag_pow(const Magnitude& base, unsigned long exponent) {
    if (base.is_exact() && bits(base.value()) * exponent <= Magnitude::kExactBitsCap) {
        mpz_class v;
        mpz_pow_ui(v.get_mpz_t(), base.value().get_mpz_t(), exponent);
        return Magnitude(v);
    }
    return mag_exp2(mag_mul(mag_log2(base), Rational(exponent)));
}

bool certainly_less(const Magnitude& a, const Magnitude& b) {
    if (a.is_exact() && b.is_exact()) return a.value() < b.value();
    unsigned h = std::max(a.height(), b.height());
    Magnitude x = a.lifted(h), y = b.lifted(h);
    return x.hi() < y.lo();
}

}  // namespace symdyn
