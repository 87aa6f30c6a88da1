#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symdyn/words.hpp"

namespace symdyn {

enum class ArithmeticKind : std::uint8_t { Liouville = 1, Mobius = 2, Custom = 3 };

// values[i] is the term at n = i + 1, each in {-1, 0, 1}.
struct ArithmeticSequence {
    ArithmeticKind kind = ArithmeticKind::Custom;
    std::vector<std::int8_t> values;

    std::uint64_t n_max() const noexcept { return values.size(); }
    std::int8_t at(std::uint64_t n) const { return values.at(n - 1); }
    // Liouville: -1 -> 0, 1 -> 1. Otherwise -1 -> 0, 0 -> 1, 1 -> 2.
    Alphabet alphabet() const;
    std::vector<Symbol> symbols() const;
    Word as_word() const;
};

inline constexpr std::uint64_t kDefaultSieveLimit = std::uint64_t{1} << 30;

std::string kind_name(ArithmeticKind k);
ArithmeticKind parse_kind(const std::string& s);

// lambda(n) = (-1)^Omega(n) from a smallest-prime-factor sieve.
ArithmeticSequence liouville(std::uint64_t n_max, std::uint64_t limit = kDefaultSieveLimit);
ArithmeticSequence mobius(std::uint64_t n_max, std::uint64_t limit = kDefaultSieveLimit);
ArithmeticSequence custom_sequence(std::vector<std::int8_t> values);

// Number of distinct length-n windows.
std::uint64_t seq_complexity(const ArithmeticSequence& s, std::size_t n);
std::uint64_t window_count(std::span<const Symbol> s, std::uint32_t alphabet_size, std::size_t n);

struct GrowthRow {
    std::size_t n = 0;
    std::uint64_t count = 0;
    Rational per_n, per_n2;  // count/n, count/n^2
};

// One row per n in [n_lo, n_hi]; window counts run in parallel over n.
std::vector<GrowthRow> growth_report(const ArithmeticSequence& s, std::size_t n_lo, std::size_t n_hi,
                                     unsigned threads = 1);
std::string growth_csv(const std::vector<GrowthRow>& rows);

// Binary cache: "SDSQ", version byte, kind byte, n_max as 8 little-endian
// bytes, then one signed byte per value.
void write_cache(const std::string& path, const ArithmeticSequence& s);
ArithmeticSequence read_cache(const std::string& path);

}  // namespace symdyn
