#include "symdyn/thm1.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "window_hash.hpp"

namespace symdyn {

namespace {

const Alphabet kBinary(2);

mpz_class choose2(const mpz_class& m) { return m * (m - 1) / 2; }

mpz_class pow2(unsigned k) {
    mpz_class v = 1;
    v <<= k;
    return v;
}

std::string text(const mpz_class& z) { return integer_to_text(z); }
std::string text(const Rational& q) { return rational_to_text(q); }

mpz_class floor_div(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

Word substitute_balanced(const Word& w) {
    const Word zero = parse_word(kBalancedZero, kBinary);
    const Word one = parse_word(kBalancedOne, kBinary);
    std::vector<Word> parts;
    parts.reserve(w.size());
    for (Symbol s : w) parts.push_back(s == 0 ? zero : one);
    return concat(parts);
}

std::size_t checked_size(const mpz_class& z, const char* what) {
    if (z < 0 || !z.fits_ulong_p()) throw std::overflow_error(std::string(what) + " does not fit in memory");
    return z.get_ui();
}

}  // namespace

nlohmann::json LevelFamily::provenance() const {
    return {{"level", level},         {"words", words.size()},  {"length", length()},
            {"n", n},                 {"repeats", repeats},     {"stutter", stutter},
            {"balanced", balanced},   {"padded_words", padded_words}};
}

LevelFamily base_level(std::size_t N1, bool balanced) {
    if (N1 < 2) throw std::invalid_argument("base level needs N_1 >= 2");
    std::vector<Symbol> a(N1 + 1, 0), b(N1 + 1, 1);
    a[N1] = 1;
    b[0] = 0;
    LevelFamily f;
    f.level = 1;
    f.repeats = N1;
    f.balanced = balanced;
    f.words = {Word(kBinary, a), Word(kBinary, b)};
    if (balanced) {
        for (Word& w : f.words) w = substitute_balanced(w);
        f.n = f.length() / 2;
    } else {
        f.n = N1 / 2;
    }
    return f;
}

mpz_class next_length(const mpz_class& length, unsigned level, const mpz_class& R, const mpz_class& S) {
    return (R * (S + 1) + pow2(level) - 1) * length;
}

LevelFamily next_level(const LevelFamily& family, std::size_t R, std::size_t S) {
    const std::size_t K = family.words.size();
    const std::size_t L = family.length();
    if (S < 1) throw std::invalid_argument("S_k must be at least 1");
    if (R <= L * K)
        throw std::invalid_argument("precondition N_k > |w_1^k| 2^k fails: " + std::to_string(R) +
                                    " <= " + std::to_string(L * K));
    // Part indices (0-based) for each shape; odd shapes periodize w_j^S w_{j+1}.
    std::vector<std::vector<std::size_t>> shapes;
    std::vector<std::size_t> last_suffix;
    for (std::size_t j = 0; j < K; ++j) {
        const std::size_t next = (j + 1) % K;
        for (int even = 0; even < 2; ++even) {
            std::vector<std::size_t> parts;
            for (std::size_t p = 0; p < j; ++p) parts.push_back(p);
            for (std::size_t r = 0; r < R; ++r) {
                parts.insert(parts.end(), S, j);
                parts.push_back(even ? j : next);
            }
            for (std::size_t p = j + 1; p < K; ++p) parts.push_back(p);
            shapes.push_back(std::move(parts));
            last_suffix.push_back(j + 1 < K ? K - 1 : j);
        }
    }
    // Padding: extend short shapes with the cyclic continuation of their suffix.
    std::size_t longest = 0;
    for (const auto& s : shapes) longest = std::max(longest, s.size());
    LevelFamily out;
    out.level = family.level + 1;
    out.repeats = R;
    out.stutter = S;
    out.balanced = family.balanced;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        auto& parts = shapes[s];
        if (parts.size() < longest) ++out.padded_words;
        for (std::size_t c = last_suffix[s] + 1; parts.size() < longest; ++c) parts.push_back(c % K);
        std::vector<Symbol> symbols;
        symbols.reserve(parts.size() * L);
        for (std::size_t p : parts) {
            auto src = family.words[p].symbols();
            symbols.insert(symbols.end(), src.begin(), src.end());
        }
        out.words.emplace_back(family.words.front().alphabet(), std::move(symbols));
    }
    for (const Word& w : out.words)
        if (w.size() != out.words.front().size()) throw std::logic_error("level words differ in length");
    out.n = out.length() / 2;
    return out;
}

nlohmann::json DistinctCertificate::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : pairs) rows.push_back({{"i", p.i}, {"j", p.j}, {"distinct", p.distinct}});
    return {{"level", level}, {"ok", ok}, {"pairs", rows}};
}

DistinctCertificate verify_distinct_subwords(const LevelFamily& family, unsigned threads) {
    DistinctCertificate cert;
    cert.level = family.level;
    for (std::size_t i = 0; i < family.words.size(); ++i)
        for (std::size_t j = i + 1; j < family.words.size(); ++j) cert.pairs.push_back({i + 1, j + 1, false});
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t; (t = next++) < cert.pairs.size();) {
            auto& p = cert.pairs[t];
            p.distinct = !shares_doubled_window(family.words[p.i - 1], family.words[p.j - 1]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (const auto& p : cert.pairs) cert.ok = cert.ok && p.distinct;
    return cert;
}

nlohmann::json ContainmentCertificate::to_json() const {
    return {{"level", level}, {"ok", ok}, {"gap_bound", gap_bound}, {"missing", missing}};
}

ContainmentCertificate verify_containment(const LevelFamily& lower, const LevelFamily& upper) {
    ContainmentCertificate cert;
    cert.level = upper.level;
    const std::size_t L = lower.length();
    detail::WindowHasher hasher(L);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;
    for (std::size_t j = 0; j < lower.words.size(); ++j) index[hasher.hash(lower.words[j].symbols())].push_back(j);
    std::vector<std::uint64_t> hashes;
    for (std::size_t i = 0; i < upper.words.size(); ++i) {
        const auto symbols = upper.words[i].symbols();
        hasher.all(symbols, hashes);
        std::vector<char> seen(lower.words.size(), 0);
        for (std::size_t pos = 0; pos < hashes.size(); ++pos) {
            auto it = index.find(hashes[pos]);
            if (it == index.end()) continue;
            for (std::size_t j : it->second) {
                auto ref = lower.words[j].symbols();
                if (!seen[j] && std::equal(ref.begin(), ref.end(), symbols.begin() + pos)) seen[j] = 1;
            }
        }
        for (std::size_t j = 0; j < seen.size(); ++j) {
            if (seen[j]) continue;
            cert.ok = false;
            cert.missing.push_back("w_" + std::to_string(i + 1) + "^" + std::to_string(upper.level) + " lacks w_" +
                                   std::to_string(j + 1) + "^" + std::to_string(lower.level));
        }
    }
    cert.gap_bound = cert.ok ? 2 * upper.length() : 0;
    return cert;
}

nlohmann::json ComplexityCertificate::to_json() const {
    nlohmann::json j = {{"level", level}, {"n", n}, {"status", status}};
    j["exact"] = exact ? nlohmann::json(*exact) : nlohmann::json(nullptr);
    auto opt = [&](const char* key, const auto& v) {
        if (v) j[key] = *v;
        else j[key] = nullptr;
    };
    if (structural_bound) j["structural_bound"] = text(*structural_bound);
    if (headline_bound) j["headline_bound"] = text(*headline_bound);
    opt("structural_holds", structural_holds);
    opt("headline_holds", headline_holds);
    j["corrected_bound"] = text(corrected_bound);
    opt("corrected_holds", corrected_holds);
    opt("level_one_equality", level_one_equality);
    return j;
}

mpz_class corrected_complexity_bound(unsigned level, const mpz_class& length, const mpz_class& n,
                                     const mpz_class& previous_length, const mpz_class& S) {
    if (n < 1 || n > length) throw std::invalid_argument("checkpoint must satisfy 1 <= n <= |w|");
    const mpz_class words = pow2(level);
    const mpz_class crossing = words * words * (n - 1);
    if (level == 1) return words * (length - n + 1) + crossing;
    const mpz_class inside = (S + 1) * previous_length + 2 * (pow2(level - 1) - 1) * previous_length;
    return words * inside + crossing;
}

ComplexityCertificate complexity_certificate(const LevelFamily& family, const LevelFamily* previous,
                                             std::uint64_t budget) {
    ComplexityCertificate cert;
    cert.level = family.level;
    cert.n = family.n;
    try {
        cert.exact = complexity(ConcatSubshift(family.words), family.n, budget);
        cert.status = "exact";
    } catch (const BudgetExceeded&) {
        cert.status = "structural bound only";
    }
    const mpz_class n(static_cast<unsigned long>(family.n));
    const mpz_class length(static_cast<unsigned long>(family.length()));
    const mpz_class prev_length(static_cast<unsigned long>(previous ? previous->length() : 0));
    cert.corrected_bound = corrected_complexity_bound(family.level, length, n, prev_length,
                                                      mpz_class(static_cast<unsigned long>(family.stutter)));
    if (cert.exact) cert.corrected_holds = mpz_class(static_cast<unsigned long>(*cert.exact)) <= cert.corrected_bound;
    if (family.level == 1) {
        if (!family.balanced) {
            cert.structural_bound = 4 * n - 2;
            if (cert.exact) {
                mpz_class e(static_cast<unsigned long>(*cert.exact));
                cert.structural_holds = e <= *cert.structural_bound;
                cert.level_one_equality = e == *cert.structural_bound;
            }
        }
        return cert;
    }
    if (!previous || previous->level + 1 != family.level)
        throw std::invalid_argument("complexity certificate above level 1 needs the previous level");
    const unsigned k = previous->level;
    const mpz_class words = pow2(k + 1);
    const mpz_class L(static_cast<unsigned long>(previous->length()));
    const mpz_class S(static_cast<unsigned long>(family.stutter));
    cert.structural_bound = words * (S + 1) * L + words * L + choose2(words) * n;
    cert.headline_bound = (choose2(words) + 1) * n;
    if (cert.exact) {
        mpz_class e(static_cast<unsigned long>(*cert.exact));
        cert.structural_holds = e <= *cert.structural_bound;
        cert.headline_holds = e <= *cert.headline_bound;
    }
    return cert;
}

Rational DeltaSchedule::at(unsigned k) const {
    if (k == 0) throw std::out_of_range("delta is indexed from 1");
    if (values.empty()) {
        Rational d(1, 40);
        d /= Rational(pow2(k));
        return 1 - d;
    }
    if (k > values.size()) throw std::out_of_range("delta schedule has no value for level " + std::to_string(k));
    return values[k - 1];
}

Rational DeltaSchedule::product_lower(unsigned levels, bool* includes_tail) const {
    Rational prod = 1;
    const unsigned count = values.empty() ? levels : std::min<unsigned>(levels, values.size());
    for (unsigned k = 1; k <= count; ++k) prod *= at(k);
    if (values.empty()) {
        // prod_{k>K} (1 - x_k) >= 1 - sum_{k>K} x_k = 1 - 1/(40 2^K)
        prod *= 1 - Rational(1, 40) / Rational(pow2(levels));
        if (includes_tail) *includes_tail = true;
    } else if (includes_tail) {
        *includes_tail = false;
    }
    return prod;
}

nlohmann::json DeltaSchedule::to_json() const {
    if (values.empty()) return {{"schedule", "default"}};
    nlohmann::json v = nlohmann::json::array();
    for (const auto& q : values) v.push_back(text(q));
    return {{"schedule", "explicit"}, {"values", v}};
}

DeltaSchedule DeltaSchedule::from_json(const nlohmann::json& j) {
    DeltaSchedule d;
    if (j.is_null() || j.value("schedule", std::string("default")) == "default") return d;
    for (const auto& v : j.at("values")) {
        Rational q = v.is_string() ? rational_from_text(v.get<std::string>()) : Rational(v.get<double>());
        if (q <= 0 || q >= 1) throw std::invalid_argument("delta values must lie in (0,1)");
        d.values.push_back(q);
    }
    return d;
}

nlohmann::json Inequality::to_json() const {
    return {{"level", level}, {"name", name}, {"lhs", lhs}, {"rhs", rhs}, {"holds", holds}};
}

nlohmann::json Thm1Params::to_json() const {
    nlohmann::json ls = nlohmann::json::array();
    for (const auto& l : levels) {
        ls.push_back({{"k", l.k},
                      {"N", text(l.N)},
                      {"S", text(l.S)},
                      {"length", text(l.length)},
                      {"n", text(l.n)},
                      {"M", text(l.M)},
                      {"delta", text(l.delta)}});
    }
    return {{"p", p.to_json()}, {"balanced", balanced}, {"horizon", horizon}, {"delta", delta.to_json()},
            {"levels", ls}};
}

Thm1Params Thm1Params::from_json(const nlohmann::json& j) {
    Thm1Params t;
    t.p = IntegerSequence::from_json(j.at("p"));
    t.balanced = j.value("balanced", false);
    t.horizon = j.value("horizon", kDefaultHorizon);
    t.delta = DeltaSchedule::from_json(j.value("delta", nlohmann::json()));
    for (const auto& l : j.at("levels")) {
        Thm1Level v;
        v.k = l.at("k").get<unsigned>();
        v.N = integer_from_text(l.at("N").get<std::string>());
        v.S = integer_from_text(l.at("S").get<std::string>());
        v.length = integer_from_text(l.at("length").get<std::string>());
        v.n = integer_from_text(l.at("n").get<std::string>());
        v.M = integer_from_text(l.at("M").get<std::string>());
        v.delta = rational_from_text(l.at("delta").get<std::string>());
        t.levels.push_back(v);
    }
    return t;
}

mpz_class complexity_threshold(const IntegerSequence& p, unsigned k, std::uint64_t horizon) {
    if (k == 0 || horizon == 0) throw std::invalid_argument("threshold needs k >= 1 and a positive horizon");
    const mpz_class c = k * (choose2(pow2(k)) + 1);
    std::uint64_t last_fail = 0;
    mpz_class n = 0;
    for (std::uint64_t i = 1; i <= horizon; ++i) {
        n = static_cast<unsigned long>(i);
        if (p.at(n) <= c * n) last_fail = i;
    }
    if (last_fail == horizon)
        throw std::domain_error("target sequence not verifiably superlinear by horizon " + std::to_string(horizon));
    return mpz_class(static_cast<unsigned long>(last_fail + 1));
}

namespace {

mpz_class level_one_length(const mpz_class& N, bool balanced) { return balanced ? mpz_class(8 * (N + 1)) : mpz_class(N + 1); }

mpz_class level_one_n(const mpz_class& N, bool balanced) {
    return balanced ? mpz_class(level_one_length(N, balanced) / 2) : mpz_class(N / 2);
}

// Designated-window frequency lower bound for one level-(k+1) word.
Rational periodic_frequency(const mpz_class& R, const mpz_class& S, const mpz_class& L, const mpz_class& length) {
    Rational q((R - 1) * (S + 1) * L + 1, length);
    q.canonicalize();
    return q;
}

}  // namespace

Thm1Params auto_params(const IntegerSequence& p, unsigned k_max, const DeltaSchedule& delta, bool balanced,
                       std::uint64_t horizon) {
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    Thm1Params t;
    t.p = p;
    t.balanced = balanced;
    t.horizon = horizon;
    t.delta = delta;

    Thm1Level first;
    first.k = 1;
    first.M = complexity_threshold(p, 1, horizon);
    first.N = 2;
    while (level_one_n(first.N, balanced) <= first.M) ++first.N;
    first.length = level_one_length(first.N, balanced);
    first.n = level_one_n(first.N, balanced);
    first.delta = delta.at(1);
    t.levels.push_back(first);

    for (unsigned k = 2; k <= k_max; ++k) {
        const Thm1Level& prev = t.levels.back();
        const mpz_class K = pow2(k - 1);
        const mpz_class& L = prev.length;
        const Rational d = prev.delta;
        Thm1Level cur;
        cur.k = k;
        cur.M = complexity_threshold(p, k, horizon);
        const mpz_class R_floor = std::max(mpz_class(L * K + 1), mpz_class(2 * prev.N + 1));
        mpz_class best_R, best_S, best_product;
        for (mpz_class S = 1;; ++S) {
            if (best_product > 0 && (S + 1) * R_floor > best_product) break;
            // (R-1)(S+1)L + 1 > d (R(S+1) + K - 1) L
            Rational t_freq = (Rational((S + 1) * L - 1) + d * Rational((K - 1) * L)) /
                              (Rational((S + 1) * L) * (1 - d));
            mpz_class R = std::max(R_floor, mpz_class(floor_div(t_freq) + 1));
            // floor((R(S+1) + K - 1) L / 2) > M
            mpz_class need = ceil_div(2 * cur.M + 2, L) - (K - 1);
            if (need > 0) R = std::max(R, ceil_div(need, S + 1));
            mpz_class product = R * (S + 1);
            if (best_product == 0 || product < best_product) {
                best_product = product;
                best_R = R;
                best_S = S;
            }
        }
        cur.N = best_R;
        cur.S = best_S;
        cur.length = next_length(L, k - 1, best_R, best_S);
        cur.n = cur.length / 2;
        cur.delta = delta.at(k);
        t.levels.push_back(cur);
    }
    return t;
}

std::vector<Inequality> check_params(const Thm1Params& t) {
    std::vector<Inequality> out;
    auto record = [&](unsigned level, std::string name, const auto& lhs, const auto& rhs, bool holds) {
        out.push_back({level, std::move(name), text(lhs), text(rhs), holds});
    };
    for (std::size_t idx = 0; idx < t.levels.size(); ++idx) {
        const Thm1Level& l = t.levels[idx];
        const unsigned k = l.k;
        if (k != idx + 1) throw std::invalid_argument("levels must be numbered 1, 2, ...");
        mpz_class M;
        try {
            M = complexity_threshold(t.p, k, t.horizon);
        } catch (const std::domain_error&) {
            M = -1;
        }
        record(k, "M_k is the least threshold with p_n > k(C(2^k,2)+1)n up to the horizon", l.M, M, M == l.M);
        record(k, "n_k > M_k", l.n, l.M, l.n > l.M);
        const mpz_class c = k * (choose2(pow2(k)) + 1);
        const mpz_class pn = l.n >= 1 ? t.p.at(l.n) : mpz_class(0);
        record(k, "p_{n_k} > k(C(2^k,2)+1) n_k", pn, mpz_class(c * l.n), pn > c * l.n);
        if (k == 1) {
            record(k, "N_1 >= 2", l.N, mpz_class(2), l.N >= 2);
            record(k, "|w^1| matches the base words", l.length, level_one_length(l.N, t.balanced),
                   l.length == level_one_length(l.N, t.balanced));
            record(k, "n_1 matches the checkpoint rule", l.n, level_one_n(l.N, t.balanced),
                   l.n == level_one_n(l.N, t.balanced));
            continue;
        }
        const Thm1Level& prev = t.levels[idx - 1];
        const mpz_class K = pow2(k - 1);
        record(k, "N_k > |w^{k-1}| 2^{k-1}", l.N, mpz_class(prev.length * K), l.N > prev.length * K);
        record(k, "N_k > 2 N_{k-1}", l.N, mpz_class(2 * prev.N), l.N > 2 * prev.N);
        record(k, "S_{k-1} >= 1", l.S, mpz_class(1), l.S >= 1);
        const mpz_class len = next_length(prev.length, k - 1, l.N, l.S);
        record(k, "|w^k| = (N_k(S+1) + 2^{k-1} - 1)|w^{k-1}|", l.length, len, l.length == len);
        record(k, "n_k = floor(|w^k|/2)", l.n, mpz_class(l.length / 2), l.n == l.length / 2);
        const Rational freq = periodic_frequency(l.N, l.S, prev.length, l.length);
        record(k, "periodic-region frequency > delta_{k-1}", freq, prev.delta, freq > prev.delta);
    }
    if (!t.levels.empty()) {
        bool tail = false;
        const Rational lower = t.delta.product_lower(t.levels.size(), &tail);
        record(0, tail ? "prod delta_k > 9/10 (with tail bound)" : "prod delta_k > 9/10 over the materialized levels",
               lower, Rational(9, 10), lower > Rational(9, 10));
    }
    return out;
}

mpz_class ledger_complexity_bound(const Thm1Params& t, unsigned k) {
    if (k < 1 || k > t.levels.size()) throw std::out_of_range("level outside the ledger");
    const Thm1Level& l = t.levels[k - 1];
    if (k == 1) return corrected_complexity_bound(1, l.length, l.n, 0, 0);
    return corrected_complexity_bound(k, l.length, l.n, t.levels[k - 2].length, l.S);
}

Inequality liminf_checkpoint(const Thm1Params& t, unsigned k, const mpz_class& complexity_upper) {
    const Thm1Level& l = t.levels.at(k - 1);
    const mpz_class lhs = k * complexity_upper;
    const mpz_class rhs = t.p.at(l.n);
    return {k, "k P(n_k) < p_{n_k}", text(lhs), text(rhs), lhs < rhs};
}

std::vector<LevelFamily> build_families(const Thm1Params& t, unsigned levels) {
    if (levels > t.levels.size()) throw std::out_of_range("params do not reach the requested level");
    std::vector<LevelFamily> out;
    for (unsigned k = 1; k <= levels; ++k) {
        const Thm1Level& l = t.levels[k - 1];
        if (k == 1) {
            out.push_back(base_level(checked_size(l.N, "N_1"), t.balanced));
        } else {
            checked_size(l.length * pow2(k), "level size");
            out.push_back(next_level(out.back(), checked_size(l.N, "N_k"), checked_size(l.S, "S_k")));
        }
        if (mpz_class(static_cast<unsigned long>(out.back().length())) != l.length)
            throw std::logic_error("built length disagrees with the ledger at level " + std::to_string(k));
    }
    return out;
}

std::vector<std::size_t> branch_indices(const std::vector<int>& bits) {
    std::vector<std::size_t> idx{1};
    for (int a : bits) {
        if (a != 0 && a != 1) throw std::invalid_argument("branch bits must be 0 or 1");
        idx.push_back(2 * idx.back() - static_cast<std::size_t>(a));
    }
    return idx;
}

WordSet designated_set(const std::vector<LevelFamily>& families, const std::vector<int>& bits, unsigned stage) {
    if (stage < 1 || stage > bits.size()) throw std::out_of_range("stage outside the branch depth");
    if (families.size() <= stage) throw std::out_of_range("designated set needs level stage+1 materialized");
    const LevelFamily& f = families[stage - 1];
    const std::size_t i = branch_indices(bits)[stage - 1] - 1;
    const std::size_t S = families[stage].stutter;
    const std::size_t L = f.length();
    const std::size_t span = (S + 1) * L;
    std::vector<Word> period_parts(S, f.words[i]);
    period_parts.push_back(bits[stage - 1] == 0 ? f.words[i] : f.words[(i + 1) % f.words.size()]);
    const Word period = concat(period_parts);
    const Word doubled = concat({period, period});
    const std::size_t shifts = bits[stage - 1] == 0 ? L : span;
    WordSet out;
    for (std::size_t s = 0; s < shifts; ++s) out.insert(doubled.slice(s, span));
    return out;
}

Word branch_point(const std::vector<LevelFamily>& families, const std::vector<int>& bits, std::size_t length) {
    const std::size_t T = bits.size();
    if (families.size() <= T)
        throw std::out_of_range("branch depth " + std::to_string(T) + " needs level " + std::to_string(T + 1));
    const Word& w = families[T].words[branch_indices(bits)[T] - 1];
    std::vector<Symbol> out;
    out.reserve(length);
    while (out.size() < length) {
        const std::size_t take = std::min(w.size(), length - out.size());
        out.insert(out.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return Word(w.alphabet(), std::move(out));
}

}  // namespace symdyn
