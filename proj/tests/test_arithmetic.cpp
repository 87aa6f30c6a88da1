#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include "symdyn/arithmetic.hpp"
#include "symdyn/language.hpp"

using namespace symdyn;

namespace {

// Oracle: trial division.
int omega_parity(std::uint64_t n) {
    int omega = 0;
    for (std::uint64_t p = 2; p * p <= n; ++p)
        while (n % p == 0) {
            n /= p;
            ++omega;
        }
    if (n > 1) ++omega;
    return omega % 2 ? -1 : 1;
}

int mu_direct(std::uint64_t n) {
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    if (n > 1) sign = -sign;
    return sign;
}

// Oracle: set of string windows.
std::uint64_t naive_windows(const std::vector<Symbol>& s, std::size_t n) {
    std::set<std::vector<Symbol>> seen;
    for (std::size_t i = 0; i + n <= s.size(); ++i) seen.emplace(s.begin() + i, s.begin() + i + n);
    return seen.size();
}

}  // namespace

TEST_CASE("sieve values") {
    ArithmeticSequence l = liouville(20000), m = mobius(20000);
    CHECK(l.at(1) == 1);
    CHECK(l.at(2) == -1);
    CHECK(l.at(12) == -1);
    CHECK(m.at(1) == 1);
    CHECK(m.at(4) == 0);
    CHECK(m.at(6) == 1);
    for (std::uint64_t n = 1; n <= 20000; ++n) {
        REQUIRE(l.at(n) == omega_parity(n));
        REQUIRE(m.at(n) == mu_direct(n));
        if (m.at(n) != 0) CHECK(l.at(n) == m.at(n));
    }
    CHECK_THROWS_AS(liouville(100, 50), BudgetExceeded);
    CHECK_THROWS_AS(mobius(0), std::invalid_argument);
}

TEST_CASE("liouville is completely multiplicative") {
    ArithmeticSequence l = liouville(1'000'000);
    std::mt19937_64 rng(9);
    int coprime = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t a = 1 + rng() % 1000, b = 1 + rng() % 1000;
        if (std::gcd(a, b) == 1) ++coprime;
        CHECK(l.at(a) * l.at(b) == l.at(a * b));
    }
    CHECK(coprime > 100);
    CHECK(coprime < 1000);
}

TEST_CASE("window counts match the naive oracle") {
    ArithmeticSequence l = liouville(10000), m = mobius(10000);
    for (const ArithmeticSequence* s : {&l, &m}) {
        auto sym = s->symbols();
        for (std::size_t n : {1u, 2u, 5u, 10u, 16u, 25u, 31u, 40u})
            CHECK(seq_complexity(*s, n) == naive_windows(sym, n));
    }
    ArithmeticSequence c = custom_sequence(std::vector<std::int8_t>(50, 1));
    for (std::size_t n = 1; n <= 50; ++n) CHECK(seq_complexity(c, n) == 1);
    CHECK_THROWS_AS(custom_sequence({2}), std::invalid_argument);
}

TEST_CASE("window count properties") {
    ArithmeticSequence l = liouville(200000);
    std::vector<std::uint64_t> p(17, 0);
    for (std::size_t n = 1; n <= 16; ++n) {
        p[n] = seq_complexity(l, n);
        CHECK(p[n] <= std::min<std::uint64_t>(l.n_max() - n + 1, std::uint64_t{1} << n));
        if (n > 1) CHECK(p[n] >= p[n - 1]);
    }
    for (std::size_t a = 1; a <= 8; ++a)
        for (std::size_t b = 1; a + b <= 16; ++b) CHECK(p[a + b] <= p[a] * p[b]);
}

TEST_CASE("growth report") {
    ArithmeticSequence l = liouville(5000);
    CHECK(growth_report(l, 5, 4).empty());
    auto rows = growth_report(l, 1, 12, 4);
    REQUIRE(rows.size() == 12);
    for (const auto& r : rows) {
        CHECK(r.count == seq_complexity(l, r.n));
        CHECK(r.per_n * static_cast<unsigned long>(r.n) == static_cast<unsigned long>(r.count));
        CHECK(r.per_n2 * static_cast<unsigned long>(r.n * r.n) == static_cast<unsigned long>(r.count));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].count >= rows[i - 1].count);
    CHECK(growth_csv(growth_report(l, 1, 1)) == "n,count,count_over_n,count_over_n2\n1,2,2,2\n");
}

TEST_CASE("sequence cache round trip") {
    const std::string path = (std::filesystem::temp_directory_path() / "symdyn_cache_test.sdsq").string();
    ArithmeticSequence m = mobius(1000);
    write_cache(path, m);
    CHECK(std::filesystem::file_size(path) == 14 + 1000);
    ArithmeticSequence back = read_cache(path);
    CHECK(back.kind == ArithmeticKind::Mobius);
    CHECK(back.values == m.values);
    {
        std::FILE* f = std::fopen(path.c_str(), "ab");
        std::fputc(0, f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_cache(path), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_cache(path), std::runtime_error);
}
