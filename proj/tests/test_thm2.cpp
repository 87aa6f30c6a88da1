#include <doctest.h>

#include <cmath>
#include <random>

#include "symdyn/thm2.hpp"

using namespace symdyn;

namespace {

Thm2Params linear_params() {
    Thm2Params p;
    p.b = IntegerSequence::polynomial(Rational(1), 1);
    return p;
}

const Thm2Run& linear_run() {
    static const Thm2Run run = build_thm2(linear_params());
    return run;
}

Rational qpow(const Rational& q, unsigned long n) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), n);
    return Rational(num, den);
}

// Oracle: f(a) = a log2(K-1) - a log2 a - (1-a) log2(1-a) in long double.
long double entropy_f(long double K, long double a) {
    return a * std::log2(K - 1) - a * std::log2(a) - (1 - a) * std::log2(1 - a);
}

const Thm2Check* find_check(const InductionCertificate& c, const std::string& name) {
    for (const auto& x : c.checks)
        if (x.name == name) return &x;
    return nullptr;
}

Word random_word(std::mt19937_64& rng, std::uint32_t k, std::size_t n) {
    std::vector<Symbol> s(n);
    for (auto& x : s) x = static_cast<Symbol>(rng() % k);
    return Word(Alphabet(k), s);
}

}  // namespace

TEST_CASE("default schedules") {
    Thm2Schedules s;
    CHECK(s.epsilon(0) == Rational(1, 200));
    CHECK(s.epsilon(3) == Rational(1, 1600));
    CHECK(s.alpha_at(0) == Rational(1, 3));
    CHECK(s.alpha_at(1) == Rational(39, 40));
    CHECK(s.alpha_at(2) == Rational(79, 80));
    for (unsigned K : {0u, 1u, 2u, 5u}) {
        // Oracle: exact prefix product times one minus the geometric tail.
        Rational pe = 1, pa = 1;
        for (unsigned i = 1; i <= K; ++i) {
            pe *= 1 - s.epsilon(i);
            pa *= s.alpha_at(i);
        }
        Rational tail_e = Rational(1, 200) / (1u << K), tail_a = Rational(1, 20) / (1u << K);
        CHECK(s.eps_product_lower(K) == pe * (1 - tail_e));
        CHECK(s.alpha_product_lower(K) == pa * (1 - tail_a));
        CHECK(s.eps_product_lower(K) > Rational(99, 100));
        CHECK(s.alpha_product_lower(K) > Rational(3, 4));
        // Lower bounds for long finite products.
        Rational fe = 1, fa = 1;
        for (unsigned i = 1; i <= 40; ++i) {
            fe *= 1 - s.epsilon(i);
            fa *= s.alpha_at(i);
        }
        CHECK(s.eps_product_lower(K) <= fe);
        CHECK(s.alpha_product_lower(K) <= fa);
    }
    CHECK(s.eps_product_lower(1) <= s.eps_product_lower(4));
}

TEST_CASE("explicit schedule prefixes round trip") {
    Thm2Params p;
    p.schedules.eps = {Rational(1, 300), Rational(1, 900)};
    p.schedules.alpha = {Rational(9, 10)};
    p.seed = 11;
    CHECK(p.schedules.epsilon(1) == Rational(1, 900));
    CHECK(p.schedules.epsilon(2) == Rational(1, 800));
    CHECK(p.schedules.alpha_at(1) == Rational(9, 10));
    CHECK(p.schedules.alpha_at(2) == Rational(79, 80));
    Thm2Params back = Thm2Params::from_json(p.to_json());
    CHECK(back.to_json() == p.to_json());
    CHECK(back.schedules.epsilon(1) == Rational(1, 900));
}

TEST_CASE("certified rate brackets the real rate") {
    struct Case {
        unsigned long K;
        Rational alpha, eps;
    };
    for (const Case& c : {Case{2, Rational(1, 3), Rational(1, 200)}, Case{185, Rational(39, 40), Rational(1, 400)},
                          Case{80657, Rational(39, 40), Rational(1, 400)}}) {
        CertifiedRate r = certified_rate(mpz_class(c.K), c.alpha, c.eps);
        const long double f = entropy_f(c.K, c.alpha.get_d());
        const long double g = std::log2(static_cast<long double>(c.K)) - (1 + r.delta.get_d()) * f;
        CHECK(r.delta > 0);
        CHECK(r.g_lo > 0);
        CHECK(r.g_lo <= r.g_hi);
        CHECK(r.g_lo.get_d() <= static_cast<double>(g) + 1e-12);
        CHECK(static_cast<double>(g) <= r.g_hi.get_d() + 1e-12);
        CHECK(r.g_hi - r.g_lo < Rational(1, 1000000));
        CHECK(r.lambda > 1);
        CHECK(log2_upper(r.lambda) <= r.g_lo / 2);
        // delta is the first power of 1/2 leaving a positive rate.
        if (r.delta < 1) CHECK((1 + 2 * r.delta.get_d()) * f >= std::log2(static_cast<long double>(c.K)) - 1e-9);
    }
    CHECK_THROWS_AS(certified_rate(mpz_class(1), Rational(1, 3), Rational(1, 100)), std::domain_error);
    CHECK_THROWS_AS(certified_rate(mpz_class(2), Rational(1, 2), Rational(1, 100)), std::domain_error);
}

TEST_CASE("floor count bounds bracket the floor") {
    CertifiedRate r = certified_rate(mpz_class(4), Rational(1, 4), Rational(1, 100));
    const long double f = entropy_f(4, 0.25L), d = r.delta.get_d();
    for (unsigned long n : {400ul, 1000ul, 3000ul}) {
        Magnitude k = floor_count_bounds(r, Magnitude(n));
        // Oracle in log2: log2((1-eps) 4^n / 2^(n(1+d)f) / n), far from any floor effect.
        const long double lk = std::log2(0.99L) + 2.0L * n - n * (1 + d) * f - std::log2(static_cast<long double>(n));
        Magnitude below = Magnitude::tower(1, Rational(static_cast<double>(lk - 1e-6)), Rational(static_cast<double>(lk - 1e-6)));
        Magnitude above = Magnitude::tower(1, Rational(static_cast<double>(lk + 1e-6)), Rational(static_cast<double>(lk + 1e-6)));
        CHECK_FALSE(certainly_less(k, below));
        CHECK_FALSE(certainly_less(above, k));
    }
}

TEST_CASE("level 1 for linear b") {
    const Thm2Run& run = linear_run();
    REQUIRE(run.ledger.levels.size() == 2);
    const Thm2Level& L = run.ledger.levels[0];
    REQUIRE(L.N.is_exact());
    CHECK(L.N.value() == 46);
    CHECK(L.k.value() == 185);
    CHECK(L.word_length.value() == 46);
    CHECK(L.alpha == Rational(1, 3));
    CHECK(L.epsilon == Rational(1, 200));
    CHECK(L.lambda_basis == "witness");
    // 4 b_N < lambda^N < k, exactly.
    const Rational lp = qpow(L.lambda, 46);
    CHECK(lp > 4 * 46);
    CHECK(lp < 185);
    CHECK(L.lambda > 1);
    // Lengths below 46 were screened or skipped.
    REQUIRE(!L.search.empty());
    CHECK(L.search.back().n == 46);
    CHECK(L.search.back().outcome == "built");
    for (std::size_t i = 0; i + 1 < L.search.size(); ++i) CHECK(L.search[i].outcome != "built");
    REQUIRE(run.words.size() == 1);
    CHECK(run.words[0].words.size() == 185);
    for (const Word& w : run.words[0].words) CHECK(w.size() == 46);

    // P_1: least P > 46 with floor(log2(P+1)) + 1 > 185 * 46, i.e. P = 2^8510 - 1.
    mpz_class two = 2, p1;
    mpz_pow_ui(p1.get_mpz_t(), two.get_mpz_t(), 8510);
    p1 -= 1;
    REQUIRE(L.P.is_exact());
    CHECK(L.P.value() == p1);
    // M_1: least integer above |w| k / eps_1 and (P_1 - 1) / (eps_1 N_1).
    mpz_class m1 = (p1 - 1) * 400 / 46 + 1;
    REQUIRE(L.M.is_exact());
    CHECK(L.M.value() == m1);
}

TEST_CASE("level 2 for linear b is ledger-only") {
    const Thm2Run& run = linear_run();
    const Thm2Level& L1 = run.ledger.levels[0];
    const Thm2Level& L2 = run.ledger.levels[1];
    CHECK_FALSE(L2.materialized);
    CHECK(L2.lambda_basis == "rate");
    REQUIRE(L2.rate);
    CHECK(L2.rate->letters == 185);
    CHECK(L2.alpha == Rational(39, 40));
    CHECK(L2.epsilon == Rational(1, 400));
    REQUIRE(L2.N.is_exact());
    CHECK(L2.N.value() > L1.P.value());
    CHECK(L2.word_length.is_exact());
    CHECK(L2.word_length.value() == L2.N.value() * L1.N.value() * L1.M.value());
    CHECK(certainly_less(L2.N, L2.P));
    CHECK(certainly_less(L1.M, L2.M));
}

TEST_CASE("ledger certificate for linear b") {
    const Thm2Run& run = linear_run();
    std::vector<const LevelWords*> ws{&run.words[0]};
    LedgerCertificate cert = certify_ledger(run.ledger, ws);
    CHECK(cert.ok());
    for (const auto& g : cert.global) CHECK(g.status == CheckStatus::Satisfied);
    REQUIRE(cert.levels.size() == 2);
    const InductionCertificate& c1 = cert.levels[0];
    for (const char* c : {"c1", "c2", "c3", "c4", "c5", "quiet"}) CHECK(c1.condition(c) == CheckStatus::Satisfied);
    CHECK(c1.condition("c6") == CheckStatus::Deferred);
    const Thm2Check* measure = find_check(c1, "measure of W_P and W~_N above 1 - eps_j");
    REQUIRE(measure);
    CHECK(measure->status == CheckStatus::Deferred);
    for (const auto& x : c1.checks)
        if (x.condition == "c6" && &x != measure) CHECK(x.status == CheckStatus::Satisfied);

    const InductionCertificate& c2 = cert.levels[1];
    for (const char* c : {"c1", "c2", "quiet"}) CHECK(c2.condition(c) == CheckStatus::Satisfied);
    for (const char* c : {"c3", "c4", "c5", "c6"}) CHECK(c2.condition(c) == CheckStatus::Deferred);

    // Without the words, level-1 c3 is deferred rather than violated.
    LedgerCertificate bare = certify_ledger(run.ledger, {});
    CHECK(bare.ok());
    CHECK(bare.levels[0].condition("c3") == CheckStatus::Deferred);
}

TEST_CASE("ledger json round trip") {
    const Thm2Run& run = linear_run();
    const std::string text = run.ledger.to_json().dump();
    PhaseLedger back = PhaseLedger::from_json(nlohmann::json::parse(text));
    CHECK(back.to_json().dump() == text);
    std::vector<const LevelWords*> ws{&run.words[0]};
    CHECK(certify_ledger(back, ws).to_json() == certify_ledger(run.ledger, ws).to_json());
}

TEST_CASE("tampering flips checks to violated") {
    const Thm2Run& run = linear_run();
    std::vector<const LevelWords*> ws{&run.words[0]};
    {
        PhaseLedger t = run.ledger;
        t.levels[0].M = Magnitude(mpz_class(t.levels[0].M.value() / 2));
        LedgerCertificate c = certify_ledger(t, ws);
        CHECK_FALSE(c.ok());
        CHECK(c.levels[0].condition("c6") == CheckStatus::Violated);
    }
    {
        PhaseLedger t = run.ledger;
        t.levels[0].k = Magnitude(184ul);
        CHECK(verify_induction(t, 1, &run.words[0]).condition("c3") == CheckStatus::Violated);
    }
    {
        PhaseLedger t = run.ledger;
        t.levels[0].lambda = Rational(11, 10);
        CHECK(verify_induction(t, 1, &run.words[0]).condition("c2") == CheckStatus::Violated);
    }
    {
        PhaseLedger t = run.ledger;
        t.levels[0].P = Magnitude(40ul);
        LedgerCertificate c = certify_ledger(t, ws);
        CHECK_FALSE(c.ok());
        bool interleave_violated = false;
        for (const auto& g : c.global)
            if (g.name == "N_1 < P_1") interleave_violated = g.status == CheckStatus::Violated;
        CHECK(interleave_violated);
    }
    {
        // A word moved next to another breaks separation.
        LevelWords w = run.words[0];
        w.words[1] = w.words[0];
        CHECK(verify_induction(run.ledger, 1, &w).condition("c3") == CheckStatus::Violated);
    }
}

TEST_CASE("substitution multiplies separation") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint32_t K = 2 + rng() % 4;
        const std::size_t n = 4 + rng() % 8, len = 3 + rng() % 6, M = 1 + rng() % 3;
        std::vector<Word> prev;
        for (std::uint32_t i = 0; i < K; ++i) prev.push_back(random_word(rng, 2, n));
        Codebook letters;
        letters.spec = CodebookSpec{K, len, Rational(1, 4), Rational(1, 2)};
        for (int i = 0; i < 5; ++i) letters.words.push_back(random_word(rng, K, len));
        std::vector<Word> out = substitute(letters, prev, M);
        REQUIRE(out.size() == letters.words.size());
        Rational min_prev = 1;
        for (std::size_t a = 0; a < prev.size(); ++a)
            for (std::size_t b = a + 1; b < prev.size(); ++b) min_prev = std::min(min_prev, hamming(prev[a], prev[b]));
        for (std::size_t a = 0; a < out.size(); ++a) {
            CHECK(out[a].size() == len * n * M);
            for (std::size_t b = a + 1; b < out.size(); ++b)
                CHECK(hamming(out[a], out[b]) >= hamming(letters.words[a], letters.words[b]) * min_prev);
        }
    }
    Codebook bad;
    bad.spec = CodebookSpec{3, 2, Rational(1, 4), Rational(1, 2)};
    CHECK_THROWS_AS(substitute(bad, {Word(Alphabet(2), {0})}, 1), std::invalid_argument);
}

TEST_CASE("substituted level-1 words keep the separation constant") {
    // Letters over the 185 level-1 words give level-2 words separated by
    // more than alpha_0 alpha_1 whenever letter distance exceeds alpha_1.
    const Thm2Run& run = linear_run();
    const auto& prev = run.words[0].words;
    std::mt19937_64 rng(5);
    Codebook letters;
    letters.spec = CodebookSpec{185, 4, Rational(39, 40), Rational(1, 400)};
    while (letters.words.size() < 6) {
        Word w = random_word(rng, 185, 4);
        bool far = true;
        for (const Word& u : letters.words) far = far && hamming(u, w) > Rational(39, 40);
        if (far) letters.words.push_back(w);
    }
    std::vector<Word> out = substitute(letters, prev, 2);
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t b = a + 1; b < out.size(); ++b) CHECK(hamming(out[a], out[b]) > Rational(1, 3) * Rational(39, 40));
}

TEST_CASE("sampled quiet mass agrees with the measure check") {
    std::vector<Word> ws = {parse_word("00101", Alphabet(2)), parse_word("11010", Alphabet(2)),
                            parse_word("01110", Alphabet(2))};
    const std::size_t M = 10, P = 6;
    QuietCertificate fast = quiet_sample_check(ws, M, P, 20000, 3);
    std::vector<Word> gens;
    for (const Word& w : ws) gens.push_back(repeat(w, M));
    Word x = sample_point(ConcatSubshift(gens), 20000, 3);
    QuietCertificate slow = quiet_bound_check(empirical_measure(x, P), gens, P, 5, M);
    CHECK(fast.mass == slow.mass);
    CHECK(fast.bound == Rational(9, 10));
    CHECK(fast.bound == slow.bound);
    CHECK(fast.slack == slow.slack);
    CHECK(fast.pattern_count == slow.pattern_count);
    CHECK(fast.holds == slow.holds);
    CHECK(fast.holds);
    CHECK(quiet_sample_check(ws, M, 1, 1000, 1).mass == 1);
    CHECK_THROWS_AS(quiet_sample_check(ws, M, 50, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(quiet_sample_check({}, M, 2, 1000, 1), std::invalid_argument);
}

TEST_CASE("text checksum") {
    CHECK(text_checksum("") == "cbf29ce484222325");
    CHECK(text_checksum("a") == "af63dc4c8601ec8c");
    CHECK(text_checksum("ab") != text_checksum("ba"));
}

TEST_CASE("search horizon errors name the inequality") {
    Thm2Params p = linear_params();
    p.search_max = 30;
    try {
        build_thm2(p);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("k > 4 b_n") != std::string::npos);
    }
}
