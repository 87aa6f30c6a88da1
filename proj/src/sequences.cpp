#include "symdyn/sequences.hpp"

#include <stdexcept>

namespace symdyn {

namespace {

mpz_class floor_q(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

mpz_class ceil_q(const Rational& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// floor(log2(v)) for v >= 1.
mpz_class floor_log2(const mpz_class& v) { return mpz_class(mpz_sizeinbase(v.get_mpz_t(), 2) - 1); }

Magnitude clamp_below(const Magnitude& m, const Rational& floor_value) {
    if (m.height() != 0 || m.is_exact()) return m;
    Bound lo = m.lo();
    if (lo.neg_inf || lo.v < floor_value) lo = Bound{false, floor_value};
    Bound hi = m.hi() < lo ? lo : m.hi();
    return Magnitude::tower(0, lo, hi);
}

Magnitude tower_form(const mpz_class& F, unsigned levels, bool minus_one) {
    Magnitude v(F);
    for (unsigned i = 0; i < levels; ++i) v = mag_exp2(v);
    if (!minus_one) return v;
    if (v.is_exact()) return Magnitude(mpz_class(v.value() - 1));
    Bound lo = v.lo();
    if (!lo.neg_inf) lo.v -= 1;
    return Magnitude::tower(v.height(), lo, v.hi());
}

}  // namespace

IntegerSequence IntegerSequence::polynomial(const Rational& coeff, unsigned degree) {
    if (coeff <= 0) throw std::invalid_argument("polynomial coefficient must be positive");
    IntegerSequence s;
    s.kind_ = Kind::Polynomial;
    s.coeff_ = coeff;
    s.degree_ = degree;
    return s;
}

IntegerSequence IntegerSequence::log(const Rational& coeff) {
    if (coeff <= 0) throw std::invalid_argument("log coefficient must be positive");
    IntegerSequence s;
    s.kind_ = Kind::Log;
    s.coeff_ = coeff;
    return s;
}

IntegerSequence IntegerSequence::iterated_log(const Rational& coeff) {
    if (coeff <= 0) throw std::invalid_argument("iterated-log coefficient must be positive");
    IntegerSequence s;
    s.kind_ = Kind::IteratedLog;
    s.coeff_ = coeff;
    return s;
}

IntegerSequence IntegerSequence::table(std::vector<mpz_class> values) {
    if (values.empty()) throw std::invalid_argument("table sequence needs values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 1) throw std::invalid_argument("table values must be positive");
        if (i && values[i] < values[i - 1]) throw std::invalid_argument("table values must be nondecreasing");
    }
    IntegerSequence s;
    s.kind_ = Kind::Table;
    s.table_ = std::move(values);
    return s;
}

IntegerSequence IntegerSequence::from_json(const nlohmann::json& j) {
    const std::string preset = j.at("preset").get<std::string>();
    auto coeff = [&] {
        if (!j.contains("coeff")) return Rational(1);
        const auto& c = j.at("coeff");
        return c.is_string() ? parse_rational(c.get<std::string>()) : Rational(c.get<long>());
    };
    if (preset == "polynomial") return polynomial(coeff(), j.value("degree", 1u));
    if (preset == "log") return log(coeff());
    if (preset == "iterated-log") return iterated_log(coeff());
    if (preset == "table") {
        std::vector<mpz_class> v;
        for (const auto& x : j.at("values"))
            v.push_back(x.is_string() ? integer_from_text(x.get<std::string>()) : mpz_class(x.get<long>()));
        return table(std::move(v));
    }
    throw std::invalid_argument("unknown sequence preset '" + preset + "'");
}

nlohmann::json IntegerSequence::to_json() const {
    switch (kind_) {
        case Kind::Polynomial:
            return {{"preset", "polynomial"}, {"coeff", coeff_.get_str()}, {"degree", degree_}};
        case Kind::Log: return {{"preset", "log"}, {"coeff", coeff_.get_str()}};
        case Kind::IteratedLog: return {{"preset", "iterated-log"}, {"coeff", coeff_.get_str()}};
        case Kind::Table: {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& x : table_) v.push_back(integer_to_text(x));
            return {{"preset", "table"}, {"values", v}};
        }
    }
    return {};
}

std::string IntegerSequence::describe() const {
    std::string c = coeff_ == 1 ? "" : coeff_.get_str() + " ";
    switch (kind_) {
        case Kind::Polynomial: return "floor(" + c + "n^" + std::to_string(degree_) + ")";
        case Kind::Log: return "floor(" + c + "floor(log2(n+1))) + 1";
        case Kind::IteratedLog: return "floor(" + c + "floor(log2(floor(log2(n+1)) + 1))) + 1";
        case Kind::Table: return "table of " + std::to_string(table_.size()) + " values";
    }
    return "";
}

bool IntegerSequence::unbounded() const {
    switch (kind_) {
        case Kind::Polynomial: return degree_ > 0;
        case Kind::Log:
        case Kind::IteratedLog: return true;
        case Kind::Table: return false;
    }
    return false;
}

mpz_class IntegerSequence::at(const mpz_class& n) const {
    if (n < 1) throw std::out_of_range("sequences are indexed from 1");
    switch (kind_) {
        case Kind::Polynomial: {
            mpz_class p;
            mpz_pow_ui(p.get_mpz_t(), n.get_mpz_t(), degree_);
            mpz_class v = floor_q(coeff_ * p);
            return v < 1 ? mpz_class(1) : v;
        }
        case Kind::Log: return floor_q(coeff_ * floor_log2(n + 1)) + 1;
        case Kind::IteratedLog: return floor_q(coeff_ * floor_log2(floor_log2(n + 1) + 1)) + 1;
        case Kind::Table:
            if (n > table_.size()) throw std::out_of_range("index beyond sequence table");
            return table_[n.get_ui() - 1];
    }
    return 1;
}

Magnitude IntegerSequence::at(const Magnitude& n) const {
    if (n.is_exact()) return Magnitude(at(n.value()));
    switch (kind_) {
        case Kind::Polynomial: {
            if (degree_ == 0) return Magnitude(at(mpz_class(1)));
            Magnitude v = mag_mul(mag_pow(n, degree_), coeff_);
            if (v.height() == 0) {
                Rational lo = v.lo().neg_inf ? Rational(1) : Rational(floor_q(v.lo().v));
                if (lo < 1) lo = 1;
                return Magnitude::interval(lo, Rational(floor_q(v.hi().v)) < lo ? lo : Rational(floor_q(v.hi().v)));
            }
            return mag_scale_log(v, Rational(-1), Rational(0));
        }
        case Kind::Log:
        case Kind::IteratedLog: {
            Magnitude inner = mag_log2(n);
            if (kind_ == Kind::IteratedLog) inner = mag_log2(clamp_below(inner, Rational(1)));
            Magnitude b = clamp_below(mag_add_real(inner, Rational(-1), Rational(1)), Rational(0));
            Magnitude scaled = b.height() == 0 ? Magnitude::tower(0, Bound{false, b.lo().v * coeff_},
                                                                  Bound{false, b.hi().v * coeff_})
                                               : mag_mul(b, coeff_);
            return clamp_below(mag_add_real(scaled, Rational(0), Rational(1)), Rational(1));
        }
        case Kind::Table: throw std::out_of_range("index beyond sequence table");
    }
    return Magnitude(1ul);
}

IndexChoice IntegerSequence::least_index_exceeding(const Magnitude& x, const Magnitude& after) const {
    const bool small = x.height() == 0 && after.height() == 0 && !x.hi().neg_inf;
    if (small) {
        const mpz_class X = floor_q(x.hi().v);
        const mpz_class A = after.hi().neg_inf ? mpz_class(0) : floor_q(after.hi().v);
        std::optional<mpz_class> p;
        switch (kind_) {
            case Kind::Polynomial: {
                if (degree_ == 0) {
                    if (at(mpz_class(1)) <= X) throw std::domain_error("bounded sequence never exceeds the target");
                    p = mpz_class(1);
                    break;
                }
                // values are clamped to at least 1
                mpz_class t = X < 1 ? mpz_class(1) : ceil_q((X + 1) / coeff_);
                if (t < 1) t = 1;
                if (mpz_sizeinbase(t.get_mpz_t(), 2) / degree_ < Magnitude::kExactBitsCap) {
                    mpz_class r;
                    mpz_root(r.get_mpz_t(), t.get_mpz_t(), degree_);
                    mpz_class rp;
                    mpz_pow_ui(rp.get_mpz_t(), r.get_mpz_t(), degree_);
                    if (rp < t) r += 1;
                    p = r;
                }
                break;
            }
            case Kind::Log: {
                mpz_class b0 = ceil_q(Rational(X) / coeff_);
                if (b0 < 0) b0 = 0;
                if (b0 <= Magnitude::kExactBitsCap) {
                    mpz_class v = 1;
                    v <<= b0.get_ui();
                    p = mpz_class(v - 1);
                }
                break;
            }
            case Kind::IteratedLog: {
                mpz_class d = ceil_q(Rational(X) / coeff_);
                if (d < 0) d = 0;
                if (d <= 25) {
                    unsigned long e = (1ul << d.get_ui()) - 1;
                    mpz_class v = 1;
                    v <<= e;
                    p = mpz_class(v - 1);
                }
                break;
            }
            case Kind::Table: {
                for (std::size_t i = 0; i < table_.size(); ++i) {
                    if (table_[i] > X && i + 1 > A) return {Magnitude(mpz_class(i + 1)), {{"form", "exact"}}};
                }
                throw std::out_of_range("sequence table never exceeds the target");
            }
        }
        if (p) {
            mpz_class P = *p;
            if (P <= A) P = A + 1;
            if (P < 1) P = 1;
            if (at(P) <= X) throw std::logic_error("index search overshoot check failed");
            return {Magnitude(P), {{"form", "exact"}}};
        }
    }
    if (kind_ == Kind::Table) throw std::out_of_range("sequence table never exceeds the target");
    if (kind_ == Kind::Polynomial && degree_ == 0) throw std::domain_error("bounded sequence never exceeds the target");

    unsigned extra = kind_ == Kind::Polynomial ? 0 : kind_ == Kind::Log ? 1 : 2;
    unsigned levels = std::max(1u, x.height() + extra);
    bool minus_one = kind_ != Kind::Polynomial;
    auto ceil_bound = [](const Bound& b) { return b.neg_inf ? mpz_class(0) : ceil_q(b.v); };
    mpz_class F0 = ceil_bound(x.lifted(x.height()).hi());
    if (x.height() == 0) {
        // height-0 targets: the exponent tracks the target directly
        Rational X = x.hi().v;
        if (kind_ == Kind::Log) F0 = ceil_q(X / coeff_);
        else if (kind_ == Kind::IteratedLog) F0 = ceil_q(X / coeff_);
        else F0 = mpz_class(mpz_sizeinbase(ceil_q(X / coeff_ + 1).get_mpz_t(), 2));
    }
    mpz_class FA = ceil_bound(after.lifted(levels).hi()) + 1;
    if (FA > F0) F0 = FA;
    if (F0 < 1) F0 = 1;
    for (unsigned s = 0; s < 256; ++s) {
        mpz_class F = F0 + s;
        Magnitude P = tower_form(F, levels, minus_one);
        if (certainly_less(x, at(P)) && certainly_less(after, P)) {
            return {P,
                    {{"form", "tower"}, {"levels", levels}, {"F", integer_to_text(F)}, {"minus_one", minus_one}}};
        }
    }
    throw std::logic_error("could not certify an index exceeding the target");
}

}  // namespace symdyn
