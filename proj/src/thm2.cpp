#include "symdyn/thm2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

#include "window_hash.hpp"

namespace symdyn {

namespace {

// Stored bounds are lifted until their rationals are this small.
constexpr std::size_t kCompactBits = 512;

mpz_class floor_div(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// Least integer strictly greater than q.
mpz_class above(const Rational& q) { return floor_div(q) + 1; }

Rational pow2_rational(unsigned i) {
    mpz_class d = 1;
    d <<= i;
    return Rational(d);
}

std::size_t bits(const mpz_class& z) { return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2); }

std::size_t bound_bits(const Bound& b) {
    if (b.neg_inf) return 0;
    return std::max(bits(abs(b.v.get_num())), bits(b.v.get_den()));
}

Magnitude compact(Magnitude m) {
    if (m.is_exact()) return m;
    while (std::max(bound_bits(m.lo()), bound_bits(m.hi())) > kCompactBits) m = m.lifted(m.height() + 1);
    return m;
}

Magnitude mq(const Rational& q) { return Magnitude::interval(q, q); }

std::string text(const Rational& q) { return rational_to_text(q); }

const mpz_class& exact(const Magnitude& m, const char* what) {
    if (!m.is_exact()) throw std::logic_error(std::string(what) + " is not known exactly");
    return m.value();
}

CheckStatus less_status(const Magnitude& a, const Magnitude& b) {
    if (certainly_less(a, b)) return CheckStatus::Satisfied;
    if (a.is_exact() && b.is_exact()) return CheckStatus::Violated;
    if (certainly_less(b, a)) return CheckStatus::Violated;
    return CheckStatus::Deferred;
}

CheckStatus from_bool(bool ok) { return ok ? CheckStatus::Satisfied : CheckStatus::Violated; }

Thm2Check check(std::string condition, std::string name, CheckStatus s, std::string lhs, std::string rhs,
                std::string note = {}) {
    return {std::move(condition), std::move(name), s, std::move(lhs), std::move(rhs), std::move(note)};
}

Thm2Check less_check(std::string condition, std::string name, const Magnitude& a, const Magnitude& b,
                     std::string note = {}) {
    return check(std::move(condition), std::move(name), less_status(a, b), a.describe(), b.describe(),
                 std::move(note));
}

CheckStatus combine(const std::vector<Thm2Check>& cs) {
    bool deferred = false;
    for (const auto& c : cs) {
        if (c.status == CheckStatus::Violated) return CheckStatus::Violated;
        if (c.status == CheckStatus::Deferred) deferred = true;
    }
    return deferred ? CheckStatus::Deferred : CheckStatus::Satisfied;
}

Rational log2_lo(const mpz_class& z) { return log2_lower(Rational(z)); }
Rational log2_hi(const mpz_class& z) { return log2_upper(Rational(z)); }

// 4 b_N as a magnitude.
Magnitude four_b(const IntegerSequence& b, const Magnitude& N) {
    if (N.is_exact()) return Magnitude(mpz_class(4 * b.at(N.value())));
    return compact(mag_scale_log(b.at(N), Rational(2), Rational(2)));
}

// lambda^N with lambda a rational > 1.
Magnitude lambda_power(const Rational& lambda, const Magnitude& N) { return compact(mag_pow(lambda, N)); }

}  // namespace

// ---- schedules -------------------------------------------------------------

Rational Thm2Schedules::epsilon(unsigned i) const {
    if (i < eps.size()) return eps[i];
    return Rational(1, 200) / pow2_rational(i);
}

Rational Thm2Schedules::alpha_at(unsigned i) const {
    if (i == 0) return Rational(1, 3);
    if (i <= alpha.size()) return alpha[i - 1];
    return 1 - Rational(1, 20) / pow2_rational(i);
}

Rational Thm2Schedules::eps_product_lower(unsigned levels) const {
    const unsigned K = std::max<unsigned>(levels, static_cast<unsigned>(eps.size()));
    Rational prod = 1;
    for (unsigned i = 1; i <= K; ++i) prod *= 1 - epsilon(i);
    // prod_{i>K} (1 - x_i) >= 1 - sum_{i>K} x_i = 1 - 1/(200 2^K)
    return prod * (1 - Rational(1, 200) / pow2_rational(K));
}

Rational Thm2Schedules::alpha_product_lower(unsigned levels) const {
    const unsigned K = std::max<unsigned>(levels, static_cast<unsigned>(alpha.size()));
    Rational prod = 1;
    for (unsigned i = 1; i <= K; ++i) prod *= alpha_at(i);
    return prod * (1 - Rational(1, 20) / pow2_rational(K));
}

nlohmann::json Thm2Schedules::to_json() const {
    nlohmann::json e = nlohmann::json::array(), a = nlohmann::json::array();
    for (const auto& q : eps) e.push_back(text(q));
    for (const auto& q : alpha) a.push_back(text(q));
    return {{"eps", e}, {"alpha", a}, {"tail", "eps_i = 1/(200 2^i), alpha_i = 1 - 1/(20 2^i)"}};
}

Thm2Schedules Thm2Schedules::from_json(const nlohmann::json& j) {
    Thm2Schedules s;
    if (j.is_null()) return s;
    for (const auto& v : j.value("eps", nlohmann::json::array())) s.eps.push_back(rational_from_text(v.get<std::string>()));
    for (const auto& v : j.value("alpha", nlohmann::json::array()))
        s.alpha.push_back(rational_from_text(v.get<std::string>()));
    for (const auto& q : s.eps)
        if (q <= 0 || q >= 1) throw std::invalid_argument("eps values must lie in (0,1)");
    for (const auto& q : s.alpha)
        if (q <= 0 || q >= 1) throw std::invalid_argument("alpha values must lie in (0,1)");
    return s;
}

nlohmann::json Thm2Params::to_json() const {
    return {{"a", a.to_json()},
            {"b", b.to_json()},
            {"schedules", schedules.to_json()},
            {"levels", levels},
            {"materialize_budget", materialize_budget},
            {"seed", seed},
            {"candidate_factor", candidate_factor},
            {"search_min", search_min},
            {"search_max", search_max}};
}

Thm2Params Thm2Params::from_json(const nlohmann::json& j) {
    Thm2Params p;
    if (j.contains("a")) p.a = IntegerSequence::from_json(j.at("a"));
    if (j.contains("b")) p.b = IntegerSequence::from_json(j.at("b"));
    p.schedules = Thm2Schedules::from_json(j.value("schedules", nlohmann::json()));
    p.levels = j.value("levels", p.levels);
    p.materialize_budget = j.value("materialize_budget", p.materialize_budget);
    p.seed = j.value("seed", p.seed);
    p.candidate_factor = j.value("candidate_factor", p.candidate_factor);
    p.search_min = j.value("search_min", p.search_min);
    p.search_max = j.value("search_max", p.search_max);
    p.threads = j.value("threads", p.threads);
    if (p.levels < 1) throw std::invalid_argument("thm2 needs at least one level");
    if (p.candidate_factor < 1) throw std::invalid_argument("candidate_factor must be positive");
    if (!p.a.unbounded()) throw std::invalid_argument("a_n must be unbounded");
    return p;
}

// ---- rates -----------------------------------------------------------------

CertifiedRate certified_rate(const mpz_class& letters, const Rational& alpha, const Rational& epsilon) {
    if (letters < 2) throw std::domain_error("the codebook rate needs at least 2 letters");
    if (!(alpha > 0 && alpha * letters < letters - 1))
        throw std::domain_error("the codebook rate needs 0 < alpha < (K-1)/K");
    if (!(epsilon > 0 && epsilon < 1)) throw std::domain_error("epsilon must lie in (0,1)");
    CertifiedRate r;
    r.letters = letters;
    r.alpha = alpha;
    r.epsilon = epsilon;
    const Rational beta = 1 - alpha;
    const mpz_class km1 = letters - 1;
    // f(a) = a log2(K-1) - a log2 a - (1-a) log2(1-a)
    const Rational f_hi = alpha * log2_hi(km1) - alpha * log2_lower(alpha) - beta * log2_lower(beta);
    const Rational f_lo = alpha * log2_lo(km1) - alpha * log2_upper(alpha) - beta * log2_upper(beta);
    const Rational lk_lo = log2_lo(letters), lk_hi = log2_hi(letters);
    bool found = false;
    for (unsigned j = 0; j <= 60 && !found; ++j) {
        Rational delta = 1 / pow2_rational(j);
        if ((1 + delta) * f_hi < lk_lo) {
            r.delta = delta;
            found = true;
        }
    }
    if (!found) throw std::domain_error("no dyadic delta certifies (1+delta) f(alpha) < log2 K");
    r.g_lo = lk_lo - (1 + r.delta) * f_hi;
    r.g_hi = lk_hi - (1 + r.delta) * f_lo;
    // Dyadic lambda just below 2^(g_lo/2), then confirmed with a certified log.
    mpz_class den = 1;
    den <<= 40;
    mpz_class num(std::floor(std::ldexp(std::exp2(r.g_lo.get_d() / 2), 40)));
    r.lambda = Rational(num, den);
    r.lambda.canonicalize();
    while (r.lambda > 1 && log2_upper(r.lambda) > r.g_lo / 2) {
        num -= 1 + num / 1000000;
        r.lambda = Rational(num, den);
        r.lambda.canonicalize();
    }
    if (r.lambda <= 1) throw std::domain_error("growth rate too close to 1 to certify");
    return r;
}

nlohmann::json CertifiedRate::to_json() const {
    return {{"letters", integer_to_text(letters)},
            {"alpha", text(alpha)},
            {"epsilon", text(epsilon)},
            {"delta", text(delta)},
            {"g_lo", text(g_lo)},
            {"g_hi", text(g_hi)},
            {"lambda", text(lambda)}};
}

namespace {

CertifiedRate rate_from_json(const nlohmann::json& j) {
    CertifiedRate r;
    r.letters = integer_from_text(j.at("letters").get<std::string>());
    r.alpha = rational_from_text(j.at("alpha").get<std::string>());
    r.epsilon = rational_from_text(j.at("epsilon").get<std::string>());
    r.delta = rational_from_text(j.at("delta").get<std::string>());
    r.g_lo = rational_from_text(j.at("g_lo").get<std::string>());
    r.g_hi = rational_from_text(j.at("g_hi").get<std::string>());
    r.lambda = rational_from_text(j.at("lambda").get<std::string>());
    return r;
}

}  // namespace

Magnitude floor_count_bounds(const CertifiedRate& r, const Magnitude& n) {
    const Rational log_keep = log2_lower(1 - r.epsilon) - 1;  // floor(X) >= X/2 once X >= 2
    if (n.is_exact()) {
        const mpz_class& v = n.value();
        if (v < 1) throw std::domain_error("word length must be positive");
        Rational x_lo = r.g_lo * v + log2_lower(1 - r.epsilon);
        Bound lo = x_lo >= 1 ? Bound{false, x_lo - 1 - log2_hi(v)} : Bound::minus_infinity();
        Bound hi{false, r.g_hi * v - log2_lo(v)};
        return compact(Magnitude::tower(1, lo, hi));
    }
    // n g_lo / 4 >= log2 n + 1 - log2(1 - eps) leaves log2 k >= (3/4) n g_lo.
    Magnitude quarter = compact(mag_mul(n, r.g_lo / 4));
    Magnitude need = compact(mag_add_real(mag_log2(n), -log_keep, -log_keep));
    Magnitude lo_part = compact(mag_mul(n, 3 * r.g_lo / 4));
    Magnitude hi_part = compact(mag_mul(n, r.g_hi));
    const unsigned h = std::max(lo_part.height(), hi_part.height());
    Bound lo = certainly_less(need, quarter) ? lo_part.lifted(h).lo() : Bound::minus_infinity();
    return compact(mag_exp2(Magnitude::tower(h, lo, hi_part.lifted(h).hi())));
}

double predicted_capacity(const CodebookSpec& spec, std::uint64_t candidates) {
    const double m = static_cast<double>(candidates);
    if (spec.alphabet_size != 2) return std::numeric_limits<double>::infinity();
    const std::size_t n = spec.length, r = spec.separation_radius();
    auto [lo, hi] = balanced_count_range(n, 2, spec.epsilon);
    if (lo > hi) return 0;
    auto lc = [](double a, double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
    const double N = static_cast<double>(n);
    double total = 0;
    for (std::size_t w = lo; w <= hi; ++w) total += std::exp(lc(N, static_cast<double>(w)) - lc(N, N / 2));
    double p = 0;
    for (std::size_t w1 = lo; w1 <= hi; ++w1) {
        const double pi1 = std::exp(lc(N, static_cast<double>(w1)) - lc(N, N / 2)) / total;
        for (std::size_t w2 = lo; w2 <= hi; ++w2) {
            const double pi2 = std::exp(lc(N, static_cast<double>(w2)) - lc(N, N / 2)) / total;
            // overlap x ~ hypergeometric; distance w1 + w2 - 2x
            double within = 0;
            for (std::size_t x = 0; x <= std::min(w1, w2); ++x) {
                if (w2 - x > n - w1) continue;
                if (w1 + w2 - 2 * x > r) continue;
                within += std::exp(lc(static_cast<double>(w1), static_cast<double>(x)) +
                                   lc(N - static_cast<double>(w1), static_cast<double>(w2 - x)) -
                                   lc(N, static_cast<double>(w2)));
            }
            p += pi1 * pi2 * within;
        }
    }
    if (p <= 0) return m;
    return std::log1p(p * m) / p;
}

// ---- records ---------------------------------------------------------------

nlohmann::json SearchTrial::to_json() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", predicted);
    nlohmann::json j = {{"n", n}, {"target", target}, {"predicted", std::string(buf)}, {"outcome", outcome}};
    if (outcome == "built" || outcome == "short") {
        j["size"] = size;
        j["candidates"] = candidates;
    }
    return j;
}

nlohmann::json Thm2Level::to_json() const {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& t : search) s.push_back(t.to_json());
    nlohmann::json j = {{"level", level},
                        {"N", N.to_json()},
                        {"k", k.to_json()},
                        {"P", P.to_json()},
                        {"P_definition", P_definition},
                        {"M", M.to_json()},
                        {"M_definition", M_definition},
                        {"word_length", word_length.to_json()},
                        {"letters", letters.to_json()},
                        {"alpha", text(alpha)},
                        {"epsilon", text(epsilon)},
                        {"lambda", text(lambda)},
                        {"lambda_basis", lambda_basis},
                        {"estimated_rate", estimated_rate},
                        {"search", s},
                        {"materialized", materialized}};
    j["rate"] = rate ? rate->to_json() : nlohmann::json();
    if (!words_file.empty()) {
        j["words_file"] = words_file;
        j["words_checksum"] = words_checksum;
    }
    return j;
}

Thm2Level Thm2Level::from_json(const nlohmann::json& j) {
    Thm2Level l;
    l.level = j.at("level").get<unsigned>();
    l.N = Magnitude::from_json(j.at("N"));
    l.k = Magnitude::from_json(j.at("k"));
    l.P = Magnitude::from_json(j.at("P"));
    l.P_definition = j.value("P_definition", nlohmann::json());
    l.M = Magnitude::from_json(j.at("M"));
    l.M_definition = j.value("M_definition", nlohmann::json());
    l.word_length = Magnitude::from_json(j.at("word_length"));
    l.letters = Magnitude::from_json(j.at("letters"));
    l.alpha = rational_from_text(j.at("alpha").get<std::string>());
    l.epsilon = rational_from_text(j.at("epsilon").get<std::string>());
    l.lambda = rational_from_text(j.at("lambda").get<std::string>());
    l.lambda_basis = j.at("lambda_basis").get<std::string>();
    l.estimated_rate = j.value("estimated_rate", nlohmann::json());
    if (j.contains("rate") && !j.at("rate").is_null()) l.rate = rate_from_json(j.at("rate"));
    for (const auto& t : j.value("search", nlohmann::json::array())) {
        SearchTrial s;
        s.n = t.at("n").get<std::size_t>();
        s.target = t.at("target").get<std::uint64_t>();
        s.predicted = std::stod(t.at("predicted").get<std::string>());
        s.outcome = t.at("outcome").get<std::string>();
        s.size = t.value("size", std::uint64_t{0});
        s.candidates = t.value("candidates", std::uint64_t{0});
        l.search.push_back(s);
    }
    l.materialized = j.value("materialized", false);
    l.words_file = j.value("words_file", std::string());
    l.words_checksum = j.value("words_checksum", std::string());
    return l;
}

nlohmann::json PhaseLedger::to_json() const {
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& l : levels) ls.push_back(l.to_json());
    return {{"params", params.to_json()}, {"levels", ls}};
}

PhaseLedger PhaseLedger::from_json(const nlohmann::json& j) {
    PhaseLedger p;
    p.params = Thm2Params::from_json(j.at("params"));
    for (const auto& l : j.at("levels")) p.levels.push_back(Thm2Level::from_json(l));
    return p;
}

std::string status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Satisfied: return "satisfied";
        case CheckStatus::Violated: return "violated";
        case CheckStatus::Deferred: return "deferred";
    }
    return "deferred";
}

nlohmann::json Thm2Check::to_json() const {
    nlohmann::json j = {{"condition", condition}, {"name", name}, {"status", status_name(status)},
                        {"lhs", lhs},             {"rhs", rhs}};
    if (!note.empty()) j["note"] = note;
    return j;
}

CheckStatus InductionCertificate::condition(const std::string& c) const {
    std::vector<Thm2Check> sel;
    for (const auto& x : checks)
        if (x.condition == c) sel.push_back(x);
    return combine(sel);
}

bool InductionCertificate::ok() const {
    return std::none_of(checks.begin(), checks.end(), [](const Thm2Check& c) { return c.status == CheckStatus::Violated; });
}

nlohmann::json InductionCertificate::to_json() const {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& c : checks) cs.push_back(c.to_json());
    nlohmann::json summary = nlohmann::json::object();
    for (const char* c : {"c1", "c2", "c3", "c4", "c5", "c6", "quiet"}) summary[c] = status_name(condition(c));
    return {{"level", level}, {"summary", summary}, {"checks", cs}};
}

bool LedgerCertificate::ok() const {
    for (const auto& c : global)
        if (c.status == CheckStatus::Violated) return false;
    return std::all_of(levels.begin(), levels.end(), [](const InductionCertificate& c) { return c.ok(); });
}

nlohmann::json LedgerCertificate::to_json() const {
    nlohmann::json g = nlohmann::json::array(), l = nlohmann::json::array();
    for (const auto& c : global) g.push_back(c.to_json());
    for (const auto& c : levels) l.push_back(c.to_json());
    return {{"ok", ok()}, {"global", g}, {"levels", l}};
}

// ---- phases ----------------------------------------------------------------

namespace {

// Rational p/2^bits with target < (p/2^bits)^n < limit, both sides exact.
Rational lambda_witness(const mpz_class& target, const mpz_class& limit, unsigned long n) {
    for (unsigned prec = 40; prec <= 4096; prec *= 2) {
        mpz_class scale = 1;
        scale <<= prec * n;
        mpz_class lo = target * scale, p;
        mpz_root(p.get_mpz_t(), lo.get_mpz_t(), n);
        for (;; ++p) {
            mpz_class pn;
            mpz_pow_ui(pn.get_mpz_t(), p.get_mpz_t(), n);
            if (pn <= lo) continue;
            if (pn < limit * scale) {
                mpz_class den = 1;
                den <<= prec;
                Rational q(p, den);
                q.canonicalize();
                return q;
            }
            break;
        }
    }
    throw std::domain_error("no rational witness between the bounds");
}

LoudResult base_loud(const Thm2Params& params) {
    const Thm2Schedules& s = params.schedules;
    const Rational alpha0 = s.alpha_at(0), eps0 = s.epsilon(0), alpha1 = s.alpha_at(1);
    LoudResult out;
    Thm2Level& L = out.level;
    L.level = 1;
    L.letters = Magnitude(2ul);
    L.alpha = alpha0;
    L.epsilon = eps0;
    L.lambda_basis = "witness";
    for (std::size_t n = std::max<std::size_t>(params.search_min, 2); n <= params.search_max; ++n) {
        // alpha_1 < (n-1)/n
        if (!(alpha1 * n < Rational(static_cast<unsigned long>(n - 1)))) continue;
        CodebookSpec spec{2, n, alpha0, eps0};
        auto [lo, hi] = balanced_count_range(n, 2, eps0);
        if (lo > hi) continue;
        const mpz_class target = 4 * params.b.at(static_cast<unsigned long>(n)) + 1;
        if (!target.fits_ulong_p() || target > mpz_class(1ul << 40)) break;
        SearchTrial t;
        t.n = n;
        t.target = target.get_ui();
        const std::uint64_t budget = params.candidate_factor * t.target;
        t.predicted = predicted_capacity(spec, budget);
        if (t.predicted < static_cast<double>(t.target)) {
            t.outcome = "screened";
            L.search.push_back(t);
            continue;
        }
        CodebookOptions opt;
        opt.mode = CodebookMode::Sampling;
        opt.candidate_budget = budget;
        opt.target_size = t.target;
        opt.seed = params.seed + n;
        opt.threads = params.threads;
        Codebook book = build_codebook(spec, opt);
        t.size = book.words.size();
        t.candidates = book.candidates_examined;
        t.outcome = book.target_reached ? "built" : "short";
        L.search.push_back(t);
        if (!book.target_reached) continue;

        L.N = Magnitude(static_cast<unsigned long>(n));
        L.k = Magnitude(static_cast<unsigned long>(book.words.size()));
        L.word_length = L.N;
        L.lambda = lambda_witness(target - 1, target, n);
        try {
            RateReport r = growth_params(spec);
            Rational lam = r.lambda_lower;
            Magnitude pw = lambda_power(lam, L.N);
            L.estimated_rate = {{"g", r.g},
                                {"lambda_lower", text(lam)},
                                {"threshold", r.threshold},
                                {"lambda_power_exceeds_4b", certainly_less(four_b(params.b, L.N), pw)}};
        } catch (const std::domain_error& e) {
            L.estimated_rate = {{"error", e.what()}};
        }
        L.materialized = true;
        LevelWords w;
        w.level = 1;
        w.words = book.words;
        w.letters = std::move(book);
        out.words = std::move(w);
        return out;
    }
    throw SearchHorizonExceeded("level 1: no length in [" + std::to_string(params.search_min) + ", " +
                             std::to_string(params.search_max) +
                             "] yields a codebook with k > 4 b_n; failing inequality k > 4 b_n");
}

// Least N >= start (exact) for which `ok` holds, assuming ok is monotone.
mpz_class least_from(const mpz_class& start, const std::function<bool(const Magnitude&)>& ok) {
    if (ok(Magnitude(start))) return start;
    mpz_class step = 1, hi = start;
    for (int i = 0; i < 4096; ++i) {
        hi = start + step;
        if (ok(Magnitude(hi))) break;
        step *= 2;
        if (i == 4095) throw SearchHorizonExceeded("loud phase: search horizon exceeded");
    }
    mpz_class lo = start;  // fails at lo, holds at hi
    while (hi - lo > 1) {
        mpz_class mid = (lo + hi) / 2;
        if (ok(Magnitude(mid))) hi = mid;
        else lo = mid;
    }
    return hi;
}

LoudResult inductive_loud(const PhaseLedger& ledger, unsigned i, const Thm2Params& params) {
    const Thm2Level& prev = ledger.levels.at(i - 1);
    const Thm2Schedules& s = params.schedules;
    const Rational alpha = s.alpha_at(i), eps = s.epsilon(i), alpha_next = s.alpha_at(i + 1);
    const mpz_class& K = exact(prev.k, "k");
    CertifiedRate rate = certified_rate(K, alpha, eps);

    LoudResult out;
    Thm2Level& L = out.level;
    L.level = i + 1;
    L.letters = prev.k;
    L.alpha = alpha;
    L.epsilon = eps;
    L.lambda = rate.lambda;
    L.lambda_basis = "rate";

    auto admissible = [&](const Magnitude& N) {
        Magnitude k = floor_count_bounds(rate, N);
        Magnitude pw = lambda_power(rate.lambda, N);
        return certainly_less(four_b(params.b, N), pw) && certainly_less(pw, k);
    };
    // Closed-form lower limits: alpha_{j} < (N-1)/N, Chebyshev balance N > K(K-1)/eps^3.
    const mpz_class c1 = above(1 / (1 - alpha_next));
    const mpz_class cheb = above(Rational(K * (K - 1)) / (eps * eps * eps));
    Magnitude start = mag_add(prev.P, Magnitude(1ul));
    if (start.is_exact()) {
        mpz_class n0 = std::max({start.value(), c1, cheb});
        L.N = Magnitude(least_from(n0, admissible));
    } else {
        if (!certainly_less(Magnitude(std::max(c1, cheb)), start) || !admissible(start))
            throw std::runtime_error("loud phase: bounds do not certify the first admissible length");
        L.N = start;
    }
    L.k = floor_count_bounds(rate, L.N);
    L.word_length = mag_mul(L.N, mag_mul(prev.word_length, prev.M));
    L.rate = rate;
    L.materialized = false;
    return out;
}

// M > req for every requirement, as a definite integer.
std::pair<Magnitude, nlohmann::json> least_above(const std::vector<Magnitude>& reqs) {
    bool all_exact = true;
    mpz_class best = 0;
    for (const auto& r : reqs) {
        if (r.height() == 0 && !r.hi().neg_inf) {
            mpz_class a = above(r.hi().v);
            if (r.is_exact() || r.lo() == r.hi()) {
                best = std::max(best, a);
                continue;
            }
        }
        all_exact = false;
    }
    if (all_exact) return {Magnitude(best), {{"form", "exact"}, {"rule", "least integer above every requirement"}}};
    unsigned h = 1;
    for (const auto& r : reqs) h = std::max(h, r.height());
    Rational top = 0;
    for (const auto& r : reqs) {
        Magnitude x = r.lifted(h);
        if (x.hi().neg_inf) continue;
        top = std::max(top, x.hi().v);
    }
    mpz_class c = above(top) + 1;
    Magnitude m = Magnitude::tower(h, Rational(c), Rational(c));
    return {m,
            {{"form", "tower"}, {"levels", h}, {"F", integer_to_text(c)}, {"minus_one", false},
             {"rule", "tower value above every requirement, not minimal"}}};
}

}  // namespace

LoudResult loud_phase(const PhaseLedger& ledger, unsigned i, const Thm2Params& params, const LevelWords*) {
    if (ledger.levels.size() != i) throw std::logic_error("loud_phase: ledger must hold exactly levels 1..i");
    if (i == 0) return base_loud(params);
    return inductive_loud(ledger, i, params);
}

void quiet_phase(PhaseLedger& ledger, unsigned j, const Thm2Params& params) {
    Thm2Level& L = ledger.levels.at(j - 1);
    const Rational eps = params.schedules.epsilon(j);
    // k_j |w^j| < a_P with P > N_j
    Magnitude x = compact(mag_mul(L.k, L.word_length));
    IndexChoice pc = params.a.least_index_exceeding(x, L.N);
    L.P = pc.index;
    L.P_definition = pc.definition;
    L.P_definition["rule"] = "least P > N_j with a_P > k_j |w^j|";

    const Magnitude prevM = j >= 2 ? ledger.levels[j - 2].M : Magnitude(1ul);
    std::vector<Magnitude> reqs;
    if (L.k.is_exact() && L.word_length.is_exact() && L.P.is_exact() && L.N.is_exact()) {
        reqs.push_back(mq(Rational(L.word_length.value() * L.k.value()) / eps));
        reqs.push_back(mq(Rational(L.P.value() - 1) / (eps * L.N.value())));
    } else {
        reqs.push_back(compact(mag_mul(mag_mul(L.word_length, L.k), 1 / eps)));
        // (P - 1)/(eps N) < P/(eps N), scaled through certified logs of eps and N.
        Magnitude ln = compact(mag_log2(L.N.is_exact() ? L.N.lifted(1) : L.N));
        if (ln.height() != 0 || ln.lo().neg_inf) throw std::logic_error("quiet_phase: N_j too large to divide by");
        reqs.push_back(compact(mag_scale_log(L.P, -log2_upper(eps) - ln.hi().v, -log2_lower(eps) - ln.lo().v)));
    }
    reqs.push_back(prevM);
    auto [M, def] = least_above(reqs);
    L.M = compact(M);
    L.M_definition = def;
}

std::vector<Word> substitute(const Codebook& letters, const std::vector<Word>& previous, std::size_t repeats) {
    if (previous.size() != letters.spec.alphabet_size)
        throw std::invalid_argument("substitute: one previous word per letter");
    std::vector<Word> out;
    out.reserve(letters.words.size());
    for (const Word& a : letters.words) {
        std::vector<Word> parts;
        parts.reserve(a.size());
        for (Symbol s : a) parts.push_back(repeat(previous.at(s), repeats));
        out.push_back(concat(parts));
    }
    return out;
}

// ---- verification ----------------------------------------------------------

InductionCertificate verify_induction(const PhaseLedger& ledger, unsigned level, const LevelWords* words,
                                      unsigned threads) {
    InductionCertificate cert;
    cert.level = level;
    auto& cs = cert.checks;
    const Thm2Level& L = ledger.levels.at(level - 1);
    const Thm2Params& params = ledger.params;
    const Thm2Schedules& s = params.schedules;
    const Rational alpha_j = s.alpha_at(level), eps_j = s.epsilon(level);

    // c1: alpha_j < (N_j - 1)/N_j, i.e. 1/(1 - alpha_j) < N_j
    cs.push_back(less_check("c1", "alpha_j < (N_j-1)/N_j", mq(1 / (1 - alpha_j)), L.N, "compared as 1/(1-alpha_j) < N_j"));
    cs.push_back(less_check("c1", "alpha_j < (k_j-1)/k_j", mq(1 / (1 - alpha_j)), L.k,
                            "precondition of the codebook rate at the next level"));

    // c2: k_j > lambda^N_j > 4 b_{N_j}, lambda > 1
    cs.push_back(check("c2", "lambda > 1", from_bool(L.lambda > 1), text(L.lambda), "1", "basis: " + L.lambda_basis));
    Magnitude pw = lambda_power(L.lambda, L.N);
    Magnitude fb = four_b(params.b, L.N);
    cs.push_back(less_check("c2", "lambda^N_j > 4 b_{N_j}", fb, pw));
    cs.push_back(less_check("c2", "k_j > lambda^N_j", pw, L.k));
    cs.push_back(less_check("c2", "k_j > 4 b_{N_j}", fb, L.k));
    if (L.lambda_basis == "rate") {
        if (!L.rate) {
            cs.push_back(check("c2", "rate record", CheckStatus::Violated, "missing", "present"));
        } else {
            const CertifiedRate& r = *L.rate;
            CertifiedRate again = certified_rate(r.letters, r.alpha, r.epsilon);
            cs.push_back(check("c2", "rate re-derivation",
                               from_bool(again.g_lo == r.g_lo && again.g_hi == r.g_hi && again.lambda == r.lambda &&
                                         again.delta == r.delta),
                               text(r.g_lo), text(again.g_lo)));
            cs.push_back(check("c2", "log2 lambda <= g_lo/2", from_bool(log2_upper(r.lambda) <= r.g_lo / 2),
                               text(log2_upper(r.lambda)), text(r.g_lo / 2)));
            cs.push_back(check("c2", "volume bound alpha <= (K-1)/K",
                               from_bool(r.alpha * r.letters <= r.letters - 1), text(r.alpha),
                               integer_to_text(r.letters - 1) + "/" + integer_to_text(r.letters),
                               "entropy bound on Hamming balls holds for every length"));
            const Rational cheb = Rational(r.letters * (r.letters - 1)) / (r.epsilon * r.epsilon * r.epsilon);
            cs.push_back(less_check("c2", "balanced mass > 1 - eps (Chebyshev)", mq(cheb), L.N,
                                    "unbalanced fraction <= K(K-1)/(eps^2 N) < eps"));
            Magnitude k_again = floor_count_bounds(r, L.N);
            cs.push_back(check("c2", "k_j from the floor count", from_bool(k_again.to_json() == L.k.to_json()),
                               L.k.describe(), k_again.describe()));
        }
    }

    // c3 and c5 on materialized words
    const Rational sep = [&] {
        Rational p = 1;
        for (unsigned t = 0; t < level; ++t) p *= s.alpha_at(t);
        return p;
    }();
    if (words && !words->words.empty()) {
        const std::vector<Word>& ws = words->words;
        CodebookAudit audit = audit_codebook(ws, sep, L.epsilon, threads);
        const std::size_t len = ws.front().size();
        cs.push_back(check("c3", "word count equals k_j",
                           from_bool(L.k.is_exact() && L.k.value() == static_cast<unsigned long>(ws.size())),
                           std::to_string(ws.size()), L.k.describe()));
        cs.push_back(check("c3", "word length equals |w^j|",
                           from_bool(L.word_length.is_exact() && L.word_length.value() == static_cast<unsigned long>(len)),
                           std::to_string(len), L.word_length.describe()));
        cs.push_back(check("c3", "d_H > prod alpha_s", from_bool(audit.separated),
                           std::to_string(audit.min_mismatches) + "/" + std::to_string(len), text(sep),
                           "minimum pairwise mismatches over all pairs"));
        cs.push_back(check("c3", "doubled words share no length-|w| window", from_bool(audit.rotation_distinct),
                           audit.rotation_distinct ? "no shared window" : audit.first_failure, "none"));
        cs.push_back(check("c4", "v_t windows of length |w| are distinct across t", from_bool(audit.rotation_distinct),
                           "length-|w| windows of w^M are rotations of w", "see c3"));
        cs.push_back(check("c5", "letter counts within (1 +- eps_{j-1}) N_j / k_{j-1}", from_bool(audit.balanced),
                           audit.balanced ? "all balanced" : audit.first_failure, text(L.epsilon)));
    } else {
        const char* why = "words not materialized";
        cs.push_back(check("c3", "d_H > prod alpha_s", CheckStatus::Deferred, "", text(sep), why));
        cs.push_back(check("c3", "doubled words share no length-|w| window", CheckStatus::Deferred, "", "", why));
        cs.push_back(check("c4", "v_t windows of length |w| are distinct across t", CheckStatus::Deferred, "", "", why));
        cs.push_back(check("c5", "letter counts within (1 +- eps_{j-1}) N_j / k_{j-1}", CheckStatus::Deferred, "",
                           text(L.epsilon), why));
        if (L.N.is_exact() && L.letters.is_exact()) {
            // Some integer count lies strictly inside the window.
            const Rational mean = Rational(L.N.value()) / Rational(L.letters.value());
            const Rational lo = (1 - L.epsilon) * mean, hi = (1 + L.epsilon) * mean;
            cs.push_back(check("c5", "balance window holds an integer", from_bool(above(lo) < hi),
                               integer_to_text(above(lo)), "< (1+eps) N/K"));
        }
    }

    // c6 parameters, with eps_j throughout
    cs.push_back(less_check("c6", "P_j > k_j", L.k, L.P));
    Magnitude need_M = L.word_length.is_exact() && L.k.is_exact()
                           ? mq(Rational(L.word_length.value() * L.k.value()) / eps_j)
                           : compact(mag_mul(mag_mul(L.word_length, L.k), 1 / eps_j));
    cs.push_back(less_check("c6", "M_j > |w^j| k_j / eps_j", need_M, L.M));
    if (L.P.is_exact() && L.N.is_exact() && L.M.is_exact()) {
        const Rational lhs = Rational(L.P.value() - 1) / Rational(L.N.value() * L.M.value());
        cs.push_back(check("c6", "(P_j - 1)/(N_j M_j) < eps_j", from_bool(lhs < eps_j),
                           Magnitude(L.P.value() - 1).describe() + " / (N M)", text(eps_j)));
    } else {
        Magnitude rhs = compact(mag_mul(mag_mul(L.N, L.M), eps_j));
        cs.push_back(less_check("c6", "(P_j - 1)/(N_j M_j) < eps_j", L.P, rhs, "checked as P_j < eps_j N_j M_j"));
    }
    const Magnitude prevM = level >= 2 ? ledger.levels[level - 2].M : Magnitude(1ul);
    cs.push_back(less_check("c6", "M_{j-1} < M_j", prevM, L.M));
    cs.push_back(check("c6", "measure of W_P and W~_N above 1 - eps_j", CheckStatus::Deferred, "", text(1 - eps_j),
                       "deferred to empirical: only sampled measures are testable"));

    // quiet index P_j
    const Magnitude x = L.k.is_exact() && L.word_length.is_exact() ? Magnitude(mpz_class(L.k.value() * L.word_length.value()))
                                                                    : compact(mag_mul(L.k, L.word_length));
    cs.push_back(less_check("quiet", "P_j > N_j", L.N, L.P));
    cs.push_back(less_check("quiet", "a_{P_j} > k_j |w^j|", x, params.a.at(L.P)));
    if (L.P.is_exact() && x.is_exact()) {
        const mpz_class pm1 = L.P.value() - 1;
        bool minimal = pm1 <= exact(L.N, "N") || params.a.at(pm1) <= x.value();
        cs.push_back(check("quiet", "P_j minimal", from_bool(minimal), "a_{P_j - 1}", "<= k_j |w^j|"));
    }
    return cert;
}

LedgerCertificate certify_ledger(const PhaseLedger& ledger, const std::vector<const LevelWords*>& words,
                                 unsigned threads) {
    LedgerCertificate cert;
    auto& g = cert.global;
    const Thm2Params& p = ledger.params;
    const Thm2Schedules& s = p.schedules;
    const unsigned levels = static_cast<unsigned>(ledger.levels.size());

    const Rational ep = s.eps_product_lower(levels + 1), ap = s.alpha_product_lower(levels + 1);
    g.push_back(check("schedule", "prod (1 - eps_i) > 99/100", from_bool(ep > Rational(99, 100)), text(ep), "99/100",
                      "exact partial product times 1 - tail sum"));
    g.push_back(check("schedule", "prod alpha_i > 3/4", from_bool(ap > Rational(3, 4)), text(ap), "3/4",
                      "exact partial product times 1 - tail sum"));
    bool eps_dec = true, alpha_inc = true;
    const unsigned horizon = std::max<unsigned>(levels + 2, static_cast<unsigned>(std::max(s.eps.size(), s.alpha.size())) + 2);
    for (unsigned i = 0; i < horizon; ++i) {
        if (!(s.epsilon(i) > 0 && s.epsilon(i) < 1) || (i && !(s.epsilon(i) < s.epsilon(i - 1)))) eps_dec = false;
        if (i >= 1 && (!(s.alpha_at(i) > 0 && s.alpha_at(i) < 1) || (i >= 2 && !(s.alpha_at(i) > s.alpha_at(i - 1)))))
            alpha_inc = false;
    }
    g.push_back(check("schedule", "eps_i decreasing in (0,1)", from_bool(eps_dec), "", "",
                      "explicit prefix joined to the default tail"));
    g.push_back(check("schedule", "alpha_i increasing in (0,1) for i >= 1", from_bool(alpha_inc), "", ""));

    // N_1 < P_1 < N_2 < P_2 < ...
    std::vector<std::pair<std::string, Magnitude>> chain;
    for (const auto& l : ledger.levels) {
        chain.emplace_back("N_" + std::to_string(l.level), l.N);
        chain.emplace_back("P_" + std::to_string(l.level), l.P);
    }
    for (std::size_t i = 1; i < chain.size(); ++i)
        g.push_back(less_check("interleaving", chain[i - 1].first + " < " + chain[i].first, chain[i - 1].second,
                               chain[i].second));
    for (const auto& [name, m] : chain) {
        Magnitude an = compact(p.a.at(m)), bn = compact(p.b.at(m));
        CheckStatus st = an.is_exact() && bn.is_exact() ? from_bool(an.value() <= bn.value()) : less_status(an, bn);
        g.push_back(check("sequences", "a_n <= b_n at n = " + name, st, an.describe(), bn.describe()));
    }

    for (unsigned j = 1; j <= levels; ++j) {
        const LevelWords* w = j - 1 < words.size() ? words[j - 1] : nullptr;
        cert.levels.push_back(verify_induction(ledger, j, w, threads));
    }
    return cert;
}

Thm2Run build_thm2(const Thm2Params& params) {
    Thm2Run run;
    run.ledger.params = params;
    for (unsigned i = 0; i < params.levels; ++i) {
        const LevelWords* prev = run.words.empty() ? nullptr : &run.words.back();
        LoudResult r = loud_phase(run.ledger, i, params, prev);
        run.ledger.levels.push_back(std::move(r.level));
        if (r.words) run.words.push_back(std::move(*r.words));
        quiet_phase(run.ledger, i + 1, params);
    }
    return run;
}

QuietCertificate quiet_sample_check(const std::vector<Word>& words, std::size_t M, std::size_t P,
                                    std::uint64_t sample_length, std::uint64_t seed, std::optional<Rational> slack) {
    if (words.empty()) throw std::invalid_argument("quiet_sample_check: no words");
    const std::size_t N = words.front().size();
    if (P < 1 || P >= N * M) throw std::invalid_argument("quiet_sample_check: needs 1 <= P < NM");
    std::vector<Word> gens;
    for (const Word& w : words) gens.push_back(repeat(w, M));
    Word x = sample_point(ConcatSubshift(gens), sample_length, seed);
    if (x.size() < P) throw std::invalid_argument("quiet_sample_check: sample shorter than P");

    detail::WindowHasher hasher(P);
    detail::DistinctWindows patterns(P);
    std::vector<std::uint64_t> hs;
    for (const Word& v : gens) {
        hasher.all(v.symbols(), hs);
        for (std::size_t i = 0; i < hs.size(); ++i) patterns.insert(v.symbols().subspan(i, P), hs[i]);
    }
    hasher.all(x.symbols(), hs);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < hs.size(); ++i)
        if (patterns.contains(x.symbols().subspan(i, P), hs[i])) ++hits;

    QuietCertificate c;
    c.P = P;
    c.N = N;
    c.M = M;
    c.pattern_count = patterns.size();
    c.mass = Rational(static_cast<unsigned long>(hits), static_cast<unsigned long>(hs.size()));
    c.mass.canonicalize();
    c.bound = 1 - Rational(static_cast<unsigned long>(P - 1), static_cast<unsigned long>(N * M));
    c.bound.canonicalize();
    c.slack = slack ? *slack : quiet_finite_slack(P, N, M, sample_length);
    c.holds = c.mass >= c.bound - c.slack;
    return c;
}

std::string text_checksum(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace symdyn
