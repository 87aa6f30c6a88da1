#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace symdyn {

using Symbol = std::uint32_t;
using Rational = mpq_class;

// Finite alphabet {0, ..., size-1}.
class Alphabet {
public:
    explicit Alphabet(std::uint32_t size);

    std::uint32_t size() const noexcept { return size_; }
    bool contains(Symbol s) const noexcept { return s < size_; }

    friend bool operator==(const Alphabet&, const Alphabet&) = default;
    friend auto operator<=>(const Alphabet&, const Alphabet&) = default;

private:
    std::uint32_t size_;
};

class Word {
public:
    Word() : alphabet_(1) {}
    Word(Alphabet alphabet, std::vector<Symbol> symbols);
    Word(Alphabet alphabet, std::initializer_list<Symbol> symbols);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const noexcept { return symbols_[i]; }
    std::span<const Symbol> symbols() const noexcept { return symbols_; }
    auto begin() const noexcept { return symbols_.begin(); }
    auto end() const noexcept { return symbols_.end(); }

    Word slice(std::size_t pos, std::size_t len) const;

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);

private:
    Alphabet alphabet_;
    std::vector<Symbol> symbols_;
};

using WordSet = std::set<Word>;

Word concat(std::span<const Word> parts);
Word concat(std::initializer_list<Word> parts);
Word repeat(const Word& w, std::size_t times);

// Number of positions where u and v differ. Throws on length mismatch.
std::size_t mismatches(const Word& u, const Word& v);

// Normalized Hamming distance as an exact fraction.
Rational hamming(const Word& u, const Word& v);

// All distinct subwords of length n.
WordSet subwords(const Word& w, std::size_t n);

// Start index of the lexicographically least rotation (Booth).
std::size_t least_rotation_index(std::span<const Symbol> s);
Word canonical_rotation(const Word& w);

// True when u and v have equal length and are not cyclic rotations of
// each other, i.e. uu and vv share no subword of length |u|.
bool rotation_distinct(const Word& u, const Word& v);

// Direct check: does uu share a subword of length |u| with vv.
bool shares_doubled_window(const Word& u, const Word& v);

// Fraction of length-n windows of w that lie in patterns (all of length n).
Rational occurrence_frequency(const WordSet& patterns, const Word& w);

// Digits then lowercase letters for symbols below 36, offset added first.
std::string render(const Word& w, unsigned offset = 0);
Word parse_word(std::string_view text, Alphabet alphabet, unsigned offset = 0);

// Accepts "p/q", decimal "0.25", or an integer.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

}  // namespace symdyn
