#include "symdyn/language.hpp"

#include <limits>
#include <sstream>

#include "window_hash.hpp"

namespace symdyn {

ConcatSubshift::ConcatSubshift(std::vector<Word> generators) : generators_(std::move(generators)) {
    if (generators_.empty()) throw std::invalid_argument("subshift needs at least one generator");
    const std::size_t L = generators_.front().size();
    if (L == 0) throw std::invalid_argument("generators must be nonempty");
    WordSet seen;
    for (const Word& g : generators_) {
        if (g.size() != L) throw std::invalid_argument("generators must share one length");
        if (g.alphabet() != generators_.front().alphabet())
            throw std::invalid_argument("generators must share one alphabet");
        if (!seen.insert(g).second) throw std::invalid_argument("generators must be distinct");
    }
}

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::size_t default_tuple_length(const ConcatSubshift& x, std::size_t n) {
    const std::size_t L = x.block_length();
    return (n + L - 1) / L + 1;
}

std::uint64_t tuple_cost(const ConcatSubshift& x, std::size_t t) {
    std::uint64_t tuples = 1;
    for (std::size_t i = 0; i < t; ++i) tuples = saturating_mul(tuples, x.generators().size());
    return saturating_mul(tuples, x.block_length());
}

template <class Visit>
void scan_windows(const ConcatSubshift& x, std::size_t n, std::size_t t, std::uint64_t budget,
                  Visit&& visit) {
    if (n == 0) throw std::invalid_argument("window length must be positive");
    const std::size_t L = x.block_length();
    if (t * L < n + L - 1)
        throw std::invalid_argument("tuple length too short for every offset");
    std::uint64_t cost = tuple_cost(x, t);
    if (cost > budget) throw BudgetExceeded("language enumeration", cost, budget);

    const auto& gens = x.generators();
    const std::size_t k = gens.size();
    const std::size_t span_len = L - 1 + n;
    std::vector<std::size_t> digits(t, 0);
    std::vector<Symbol> buffer(t * L);
    std::vector<std::uint64_t> hashes;
    detail::WindowHasher hasher(n);
    std::size_t dirty = 0;  // first block that must be rewritten
    for (;;) {
        for (std::size_t b = dirty; b < t; ++b)
            std::copy(gens[digits[b]].begin(), gens[digits[b]].end(), buffer.begin() + b * L);
        std::span<const Symbol> view(buffer.data(), span_len);
        hasher.all(view, hashes);
        for (std::size_t s = 0; s < L; ++s) visit(view.subspan(s, n), hashes[s]);
        std::size_t pos = t;
        while (pos > 0) {
            --pos;
            if (++digits[pos] < k) break;
            digits[pos] = 0;
            if (pos == 0) return;
        }
        dirty = pos;
    }
}

}  // namespace

std::uint64_t enumeration_cost(const ConcatSubshift& x, std::size_t n) {
    return tuple_cost(x, default_tuple_length(x, n));
}

WordSet language(const ConcatSubshift& x, std::size_t n, std::uint64_t budget) {
    detail::DistinctWindows seen(n);
    scan_windows(x, n, default_tuple_length(x, n), budget,
                 [&](std::span<const Symbol> w, std::uint64_t h) { seen.insert(w, h); });
    WordSet out;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        auto m = seen.member(i);
        out.insert(Word(x.alphabet(), std::vector<Symbol>(m.begin(), m.end())));
    }
    return out;
}

std::uint64_t complexity_with_tuples(const ConcatSubshift& x, std::size_t n, std::size_t tuple_length,
                                     std::uint64_t budget) {
    detail::DistinctWindows seen(n);
    scan_windows(x, n, tuple_length, budget,
                 [&](std::span<const Symbol> w, std::uint64_t h) { seen.insert(w, h); });
    return seen.size();
}

std::uint64_t complexity(const ConcatSubshift& x, std::size_t n, std::uint64_t budget) {
    return complexity_with_tuples(x, n, default_tuple_length(x, n), budget);
}

std::optional<std::size_t> syndetic_gap(const ConcatSubshift& x, const Word& u) {
    if (u.empty() || u.size() > x.block_length()) return std::nullopt;
    for (const Word& g : x.generators()) {
        if (subwords(g, u.size()).count(u) == 0) return std::nullopt;
    }
    return 2 * x.block_length();
}

std::string complexity_csv(const std::vector<std::pair<std::size_t, std::uint64_t>>& rows) {
    std::ostringstream out;
    out << "n,p\n";
    for (auto [n, p] : rows) out << n << ',' << p << '\n';
    return out.str();
}

std::string language_dump(const WordSet& words, unsigned offset) {
    std::string out;
    for (const Word& w : words) {
        out += render(w, offset);
        out.push_back('\n');
    }
    return out;
}

}  // namespace symdyn
