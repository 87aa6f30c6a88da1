#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdyn/words.hpp"

namespace symdyn {

inline constexpr std::uint64_t kDefaultWindowBudget = 100'000'000;

// Raised when an enumeration would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
        : std::runtime_error(what + ": needs " + std::to_string(required) + ", budget " +
                             std::to_string(budget)),
          required_(required), budget_(budget) {}
    std::uint64_t required() const noexcept { return required_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t required_;
    std::uint64_t budget_;
};

// Closure of all bi-infinite concatenations of a finite set of
// equal-length, pairwise distinct generators.
class ConcatSubshift {
public:
    explicit ConcatSubshift(std::vector<Word> generators);

    const std::vector<Word>& generators() const noexcept { return generators_; }
    std::size_t block_length() const noexcept { return generators_.front().size(); }
    const Alphabet& alphabet() const noexcept { return generators_.front().alphabet(); }

private:
    std::vector<Word> generators_;
};

// Number of window positions scanned when enumerating length-n words:
// k^t tuples times L offsets, t = ceil(n/L) + 1. Saturates at UINT64_MAX.
std::uint64_t enumeration_cost(const ConcatSubshift& x, std::size_t n);

WordSet language(const ConcatSubshift& x, std::size_t n,
                 std::uint64_t budget = kDefaultWindowBudget);

std::uint64_t complexity(const ConcatSubshift& x, std::size_t n,
                         std::uint64_t budget = kDefaultWindowBudget);

// Same count using only `tuple_length` consecutive generators per window.
std::uint64_t complexity_with_tuples(const ConcatSubshift& x, std::size_t n,
                                     std::size_t tuple_length,
                                     std::uint64_t budget = kDefaultWindowBudget);

// Gap bound 2L when u occurs in every generator, nullopt otherwise.
std::optional<std::size_t> syndetic_gap(const ConcatSubshift& x, const Word& u);

std::string complexity_csv(const std::vector<std::pair<std::size_t, std::uint64_t>>& rows);
std::string language_dump(const WordSet& words, unsigned offset = 0);

}  // namespace symdyn
