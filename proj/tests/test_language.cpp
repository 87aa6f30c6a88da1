#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "symdyn/language.hpp"

using namespace symdyn;

namespace {

Word bin(const std::string& s) { return parse_word(s, Alphabet(2)); }

// Oracle: every window of every concatenation of `blocks` generators.
std::set<std::string> naive_language(const std::vector<std::string>& gens, std::size_t n,
                                     std::size_t blocks) {
    std::set<std::string> out;
    std::vector<std::size_t> idx(blocks, 0);
    for (;;) {
        std::string s;
        for (auto i : idx) s += gens[i];
        for (std::size_t p = 0; p + n <= s.size(); ++p) out.insert(s.substr(p, n));
        std::size_t pos = blocks;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < gens.size()) break;
            idx[pos] = 0;
            if (pos == 0) return out;
        }
    }
}

ConcatSubshift subshift_of(const std::vector<std::string>& gens) {
    std::vector<Word> w;
    for (auto& g : gens) w.push_back(bin(g));
    return ConcatSubshift(w);
}

std::vector<std::string> step_one(std::size_t zeros) {
    return {std::string(zeros, '0') + "1", "0" + std::string(zeros, '1')};
}

}  // namespace

TEST_CASE("two-block full shift") {
    auto x = subshift_of({"01", "10"});
    CHECK(complexity(x, 2) == 4);
    WordSet l = language(x, 2);
    CHECK(l.size() == 4);
    CHECK(language_dump(l) == "00\n01\n10\n11\n");
}

TEST_CASE("invalid generator sets are rejected") {
    CHECK_THROWS_AS(subshift_of({"01", "011"}), std::invalid_argument);
    CHECK_THROWS_AS(subshift_of({"01", "01"}), std::invalid_argument);
    CHECK_THROWS_AS(ConcatSubshift({}), std::invalid_argument);
}

TEST_CASE("budget is enforced") {
    auto x = subshift_of({"0001", "0011", "0111"});
    CHECK(enumeration_cost(x, 8) == 3 * 3 * 3 * 4);
    CHECK_THROWS_AS(complexity(x, 8, 10), BudgetExceeded);
}

TEST_CASE("complexity matches the naive oracle on random generator sets") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t L = 2 + rng() % 4;
        std::size_t k = 1 + rng() % 3;
        std::set<std::string> gs;
        while (gs.size() < k) {
            std::string g;
            for (std::size_t i = 0; i < L; ++i) g.push_back('0' + rng() % 2);
            gs.insert(g);
        }
        std::vector<std::string> gens(gs.begin(), gs.end());
        auto x = subshift_of(gens);
        for (std::size_t n = 1; n <= 9; ++n) {
            std::size_t t = (n + L - 1) / L + 2;
            auto oracle = naive_language(gens, n, t);
            REQUIRE(complexity(x, n) == oracle.size());
            WordSet l = language(x, n);
            std::set<std::string> got;
            for (auto& w : l) got.insert(render(w));
            REQUIRE(got == oracle);
        }
    }
}

TEST_CASE("base family counts at the checkpoint length") {
    // Oracle values, frozen: N=10 at n=5 gives 16 words.
    auto oracle = naive_language(step_one(10), 5, 4);
    CHECK(oracle.size() == 16);
    CHECK(complexity(subshift_of(step_one(10)), 5) == 16);
    for (std::size_t N = 4; N <= 14; ++N) {
        std::size_t n = N / 2;
        auto o = naive_language(step_one(N), n, 3);
        REQUIRE(complexity(subshift_of(step_one(N)), n) == o.size());
        REQUIRE(o.size() == 4 * n - 4);
    }
}

TEST_CASE("complexity properties") {
    std::vector<std::vector<std::string>> families = {
        {"001", "011"}, {"0001", "0110", "1011"}, step_one(6), {"0110"}, {"01", "10"}};
    for (const auto& gens : families) {
        auto x = subshift_of(gens);
        std::vector<std::uint64_t> p(13, 0);
        for (std::size_t n = 1; n <= 12; ++n) p[n] = complexity(x, n);
        for (std::size_t n = 1; n < 12; ++n) CHECK(p[n + 1] >= p[n]);
        for (std::size_t m = 1; m <= 6; ++m)
            for (std::size_t n = 1; m + n <= 12; ++n) CHECK(p[m + n] <= p[m] * p[n]);
        // Once flat, flat forever.
        for (std::size_t n = 1; n < 11; ++n)
            if (p[n + 1] == p[n]) CHECK(p[n + 2] == p[n]);
        // One more block per tuple finds nothing new.
        const std::size_t L = gens.front().size();
        for (std::size_t n = 1; n <= 10; ++n) {
            std::size_t t = (n + L - 1) / L + 1;
            CHECK(complexity_with_tuples(x, n, t + 1) == p[n]);
        }
    }
}

TEST_CASE("periodic subshift has bounded complexity") {
    auto x = subshift_of({"00101"});
    for (std::size_t n = 1; n <= 15; ++n) CHECK(complexity(x, n) <= 5);
    CHECK(complexity(x, 15) == 5);
}

TEST_CASE("syndetic gap") {
    auto x = subshift_of({"0011", "0110"});
    auto g = syndetic_gap(x, bin("01"));
    REQUIRE(g.has_value());
    CHECK(*g == 8);
    CHECK_FALSE(syndetic_gap(x, bin("00")).has_value());
}

TEST_CASE("csv output") {
    CHECK(complexity_csv({{1, 2}, {2, 4}}) == "n,p\n1,2\n2,4\n");
}
