// Re-verification of a finished codebook. Deliberately written without
// the builder's packing, rotation or balance helpers.

#include <algorithm>
#include <bit>
#include <cstring>
#include <thread>

#include "symdyn/codebook.hpp"

namespace symdyn {

namespace {

std::string min_rotation_bruteforce(const Word& w) {
    const std::size_t n = w.size();
    std::string s(n, '\0');
    for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<char>(w[i] & 0xff);
    std::string wide;
    if (w.alphabet().size() > 256) {
        wide.resize(4 * n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t v = w[i];
            for (int b = 0; b < 4; ++b) wide[4 * i + b] = static_cast<char>((v >> (24 - 8 * b)) & 0xff);
        }
        s = wide;
    }
    const std::size_t unit = w.alphabet().size() > 256 ? 4 : 1;
    std::string doubled = s + s;
    std::size_t best = 0;
    for (std::size_t r = 1; r < n; ++r) {
        if (std::memcmp(doubled.data() + r * unit, doubled.data() + best * unit, n * unit) < 0) best = r;
    }
    return doubled.substr(best * unit, n * unit);
}

}  // namespace

CodebookAudit audit_codebook(const std::vector<Word>& words, const Rational& alpha,
                             const Rational& epsilon, unsigned threads) {
    CodebookAudit audit;
    if (words.empty()) return audit;
    const std::size_t n = words.front().size();
    const std::uint32_t N = words.front().alphabet().size();
    audit.min_mismatches = n;

    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() != n) {
            audit.balanced = false;
            audit.first_failure = "word " + std::to_string(i) + " has a different length";
            return audit;
        }
        std::vector<unsigned long> count(N, 0);
        for (std::size_t p = 0; p < n; ++p) count[words[i][p]]++;
        for (std::uint32_t a = 0; a < N; ++a) {
            // (1-eps) n/N < c < (1+eps) n/N, compared as c N vs (1 +- eps) n
            Rational lhs(count[a] * N);
            if (!(lhs > (1 - epsilon) * n && lhs < (1 + epsilon) * n)) {
                if (audit.balanced)
                    audit.first_failure = "word " + std::to_string(i) + " unbalanced in letter " + std::to_string(a);
                audit.balanced = false;
            }
        }
    }

    std::vector<std::string> classes;
    classes.reserve(words.size());
    for (const Word& w : words) classes.push_back(min_rotation_bruteforce(w));
    std::vector<std::size_t> order(words.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return classes[a] < classes[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (classes[order[i]] == classes[order[i - 1]]) {
            if (audit.rotation_distinct)
                audit.first_failure = "words " + std::to_string(order[i - 1]) + " and " +
                                      std::to_string(order[i]) + " are rotations";
            audit.rotation_distinct = false;
        }
    }

    // Pairwise separation: mismatches m must satisfy m > alpha n.
    const Rational limit = alpha * n;
    const std::size_t k = words.size();
    std::vector<std::size_t> row_min(k, n);
    if (N == 2) {
        const std::size_t lanes = (n + 63) / 64;
        std::vector<std::uint64_t> packed(k * lanes, 0);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t p = 0; p < n; ++p)
                packed[i * lanes + p / 64] |= static_cast<std::uint64_t>(words[i][p]) << (63 - p % 64);
        auto work = [&](std::size_t begin, std::size_t step) {
            for (std::size_t i = begin; i < k; i += step) {
                std::size_t best = n;
                for (std::size_t j = i + 1; j < k; ++j) {
                    std::size_t m = 0;
                    for (std::size_t l = 0; l < lanes; ++l)
                        m += static_cast<std::size_t>(std::popcount(packed[i * lanes + l] ^ packed[j * lanes + l]));
                    best = std::min(best, m);
                }
                row_min[i] = best;
            }
        };
        unsigned t = std::max(1u, threads);
        std::vector<std::thread> pool;
        for (unsigned w = 1; w < t; ++w) pool.emplace_back(work, w, t);
        work(0, t);
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                std::size_t m = 0;
                for (std::size_t p = 0; p < n; ++p) m += words[i][p] != words[j][p];
                row_min[i] = std::min(row_min[i], m);
            }
        }
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        audit.min_mismatches = std::min(audit.min_mismatches, row_min[i]);
        if (Rational(row_min[i]) <= limit) {
            if (audit.separated) audit.first_failure = "word " + std::to_string(i) + " too close to a later word";
            audit.separated = false;
        }
    }
    return audit;
}

}  // namespace symdyn
