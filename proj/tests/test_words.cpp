#include <doctest.h>

#include <random>
#include <string>

#include "symdyn/words.hpp"

using namespace symdyn;

namespace {

Word bin(const std::string& s) { return parse_word(s, Alphabet(2)); }

// Naive oracle: does uu contain a length-|u| window equal to some window of vv.
bool naive_shares(const std::string& u, const std::string& v) {
    std::string uu = u + u, vv = v + v;
    for (std::size_t i = 0; i <= u.size(); ++i)
        if (vv.find(uu.substr(i, u.size())) != std::string::npos) return true;
    return false;
}

std::string naive_min_rotation(const std::string& s) {
    std::string best = s;
    for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s.substr(i) + s.substr(0, i));
    return best;
}

std::string bits(unsigned value, unsigned len) {
    std::string s;
    for (unsigned i = 0; i < len; ++i) s.push_back(((value >> (len - 1 - i)) & 1) ? '1' : '0');
    return s;
}

}  // namespace

TEST_CASE("concat joins words and rejects mixed alphabets") {
    CHECK(render(concat({bin("01"), bin("10")})) == "0110");
    CHECK(concat(std::span<const Word>{}).empty());
    CHECK_THROWS_AS(concat({bin("0"), parse_word("2", Alphabet(3))}), std::invalid_argument);
    CHECK(render(repeat(bin("01"), 3)) == "010101");
}

TEST_CASE("symbols outside the alphabet are rejected") {
    CHECK_THROWS_AS(Word(Alphabet(2), {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Alphabet(0), std::invalid_argument);
}

TEST_CASE("hamming distance is an exact fraction") {
    CHECK(hamming(bin("0000"), bin("0011")) == Rational(1, 2));
    CHECK(hamming(bin("0101"), bin("0101")) == 0);
    CHECK(hamming(bin("111"), bin("000")) == 1);
    CHECK_THROWS_AS(hamming(bin("01"), bin("011")), std::invalid_argument);
}

TEST_CASE("hamming is a metric on random words") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        unsigned len = 1 + rng() % 12;
        Word a = bin(bits(rng() % (1u << len), len));
        Word b = bin(bits(rng() % (1u << len), len));
        Word c = bin(bits(rng() % (1u << len), len));
        CHECK(hamming(a, b) == hamming(b, a));
        CHECK(hamming(a, c) <= hamming(a, b) + hamming(b, c));
        CHECK((hamming(a, b) == 0) == (a == b));
    }
}

TEST_CASE("subwords lists distinct windows") {
    WordSet s = subwords(bin("0110"), 2);
    CHECK(s.size() == 3);
    CHECK(s.count(bin("01")) == 1);
    CHECK(s.count(bin("11")) == 1);
    CHECK(s.count(bin("10")) == 1);
    CHECK_THROWS_AS(subwords(bin("01"), 3), std::out_of_range);
    CHECK_THROWS_AS(subwords(bin("01"), 0), std::out_of_range);
}

TEST_CASE("rotations") {
    CHECK_FALSE(rotation_distinct(bin("0011"), bin("0110")));
    CHECK(rotation_distinct(bin("0011"), bin("0101")));
    CHECK(render(canonical_rotation(bin("1100"))) == "0011");
    CHECK_THROWS_AS(rotation_distinct(bin("01"), bin("011")), std::invalid_argument);
}

TEST_CASE("least rotation agrees with brute force for all binary words up to 12") {
    for (unsigned len = 1; len <= 12; ++len) {
        for (unsigned v = 0; v < (1u << len); ++v) {
            std::string s = bits(v, len);
            REQUIRE(render(canonical_rotation(bin(s))) == naive_min_rotation(s));
        }
    }
}

TEST_CASE("rotation_distinct matches the doubled-word scan") {
    for (unsigned len = 1; len <= 6; ++len) {
        for (unsigned a = 0; a < (1u << len); ++a) {
            for (unsigned b = 0; b < (1u << len); ++b) {
                std::string u = bits(a, len), v = bits(b, len);
                REQUIRE(rotation_distinct(bin(u), bin(v)) == !naive_shares(u, v));
                REQUIRE(shares_doubled_window(bin(u), bin(v)) == naive_shares(u, v));
            }
        }
    }
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        unsigned len = 7 + rng() % 6;
        std::string u = bits(rng() % (1u << len), len);
        std::string v = rng() % 3 == 0 ? u.substr(3 % len) + u.substr(0, 3 % len)
                                       : bits(rng() % (1u << len), len);
        REQUIRE(rotation_distinct(bin(u), bin(v)) == !naive_shares(u, v));
    }
}

TEST_CASE("least rotation on larger alphabets") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t len = 1 + rng() % 20;
        std::vector<Symbol> sym(len);
        for (auto& s : sym) s = rng() % 4;
        Word w(Alphabet(4), sym);
        std::string s = render(w);
        CHECK(render(canonical_rotation(w)) == naive_min_rotation(s));
    }
}

TEST_CASE("occurrence frequency") {
    WordSet p{bin("00")};
    CHECK(occurrence_frequency(p, bin("0001")) == Rational(2, 3));
    CHECK(occurrence_frequency(WordSet{}, bin("0001")) == 0);
    CHECK_THROWS_AS(occurrence_frequency(WordSet{bin("0"), bin("01")}, bin("0001")),
                    std::invalid_argument);
    WordSet q{bin("01"), bin("10")};
    CHECK(occurrence_frequency(q, bin("010110")) == Rational(4, 5));
}

TEST_CASE("rendering and parsing round trip") {
    Word w(Alphabet(40), {0, 39, 7});
    CHECK(render(w) == "0.39.7");
    CHECK(parse_word("0.39.7", Alphabet(40)) == w);
    Word b = bin("0110");
    CHECK(render(b, 1) == "1221");
    CHECK(parse_word("1221", Alphabet(2), 1) == b);
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("1/4") == Rational(1, 4));
    CHECK(parse_rational("0.6") == Rational(3, 5));
    CHECK(parse_rational("2") == 2);
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("abc"));
}
