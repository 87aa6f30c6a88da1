#include "symdyn/arithmetic.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "symdyn/language.hpp"
#include "window_hash.hpp"

namespace symdyn {

Alphabet ArithmeticSequence::alphabet() const { return Alphabet(kind == ArithmeticKind::Liouville ? 2 : 3); }

std::vector<Symbol> ArithmeticSequence::symbols() const {
    std::vector<Symbol> out(values.size());
    const int shift = kind == ArithmeticKind::Liouville ? 0 : 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        int v = values[i];
        out[i] = static_cast<Symbol>(kind == ArithmeticKind::Liouville ? (v + 1) / 2 : v + shift);
    }
    return out;
}

Word ArithmeticSequence::as_word() const { return Word(alphabet(), symbols()); }

std::string kind_name(ArithmeticKind k) {
    switch (k) {
        case ArithmeticKind::Liouville: return "liouville";
        case ArithmeticKind::Mobius: return "mobius";
        case ArithmeticKind::Custom: return "custom";
    }
    return "custom";
}

ArithmeticKind parse_kind(const std::string& s) {
    if (s == "liouville") return ArithmeticKind::Liouville;
    if (s == "mobius") return ArithmeticKind::Mobius;
    if (s == "custom") return ArithmeticKind::Custom;
    throw std::invalid_argument("unknown sequence kind '" + s + "'");
}

namespace {

// Linear sieve: spf[n] is the smallest prime factor of n (spf[1] = 1).
std::vector<std::uint32_t> smallest_prime_factors(std::uint64_t n_max, std::uint64_t limit) {
    if (n_max < 1) throw std::invalid_argument("sieve horizon must be at least 1");
    if (n_max > limit) throw BudgetExceeded("sieve", n_max, limit);
    if (n_max > 0xffffffffULL) throw BudgetExceeded("sieve", n_max, 0xffffffffULL);
    std::vector<std::uint32_t> spf(n_max + 1, 0);
    std::vector<std::uint32_t> primes;
    if (n_max >= 1) spf[1] = 1;
    for (std::uint64_t i = 2; i <= n_max; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            std::uint64_t m = i * p;
            if (p > spf[i] || m > n_max) break;
            spf[m] = p;
        }
    }
    return spf;
}

}  // namespace

ArithmeticSequence liouville(std::uint64_t n_max, std::uint64_t limit) {
    auto spf = smallest_prime_factors(n_max, limit);
    ArithmeticSequence s;
    s.kind = ArithmeticKind::Liouville;
    s.values.resize(n_max);
    s.values[0] = 1;
    for (std::uint64_t n = 2; n <= n_max; ++n) s.values[n - 1] = static_cast<std::int8_t>(-s.values[n / spf[n] - 1]);
    return s;
}

ArithmeticSequence mobius(std::uint64_t n_max, std::uint64_t limit) {
    auto spf = smallest_prime_factors(n_max, limit);
    ArithmeticSequence s;
    s.kind = ArithmeticKind::Mobius;
    s.values.resize(n_max);
    s.values[0] = 1;
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        std::uint64_t p = spf[n], m = n / p;
        s.values[n - 1] = spf[m] == p ? 0 : static_cast<std::int8_t>(-s.values[m - 1]);
    }
    return s;
}

ArithmeticSequence custom_sequence(std::vector<std::int8_t> values) {
    for (auto v : values)
        if (v < -1 || v > 1) throw std::invalid_argument("custom sequence values must lie in {-1,0,1}");
    ArithmeticSequence s;
    s.kind = ArithmeticKind::Custom;
    s.values = std::move(values);
    return s;
}

std::uint64_t window_count(std::span<const Symbol> s, std::uint32_t alphabet_size, std::size_t n) {
    if (n == 0 || n > s.size()) throw std::invalid_argument("window length out of range");
    unsigned bits = 1;
    while ((1u << bits) < alphabet_size) ++bits;
    if (static_cast<std::size_t>(bits) * n <= 60) {
        // Pack each window into an integer code, then count distinct codes.
        const std::uint64_t mask = (std::uint64_t{1} << (bits * n)) - 1;
        std::uint64_t code = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) code = (code << bits) | s[i];
        if (bits * n <= 28) {
            std::vector<bool> seen(std::size_t{1} << (bits * n), false);
            std::uint64_t distinct = 0;
            for (std::size_t i = n - 1; i < s.size(); ++i) {
                code = ((code << bits) | s[i]) & mask;
                if (!seen[code]) {
                    seen[code] = true;
                    ++distinct;
                }
            }
            return distinct;
        }
        std::vector<std::uint64_t> codes;
        codes.reserve(s.size() - n + 1);
        for (std::size_t i = n - 1; i < s.size(); ++i) {
            code = ((code << bits) | s[i]) & mask;
            codes.push_back(code);
        }
        std::sort(codes.begin(), codes.end());
        return static_cast<std::uint64_t>(std::unique(codes.begin(), codes.end()) - codes.begin());
    }
    detail::WindowHasher hasher(n);
    detail::DistinctWindows seen(n);
    std::vector<std::uint64_t> hashes;
    hasher.all(s, hashes);
    for (std::size_t i = 0; i < hashes.size(); ++i) seen.insert(s.subspan(i, n), hashes[i]);
    return seen.size();
}

std::uint64_t seq_complexity(const ArithmeticSequence& s, std::size_t n) {
    auto sym = s.symbols();
    return window_count(sym, s.alphabet().size(), n);
}

std::vector<GrowthRow> growth_report(const ArithmeticSequence& s, std::size_t n_lo, std::size_t n_hi,
                                     unsigned threads) {
    std::vector<GrowthRow> rows;
    if (n_lo > n_hi) return rows;
    if (n_lo == 0) throw std::invalid_argument("growth_report: n starts at 1");
    rows.resize(n_hi - n_lo + 1);
    const auto sym = s.symbols();
    const std::uint32_t a = s.alphabet().size();
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
            GrowthRow& r = rows[i];
            r.n = n_lo + i;
            r.count = window_count(sym, a, r.n);
            r.per_n = Rational(static_cast<unsigned long>(r.count), static_cast<unsigned long>(r.n));
            r.per_n.canonicalize();
            r.per_n2 = Rational(static_cast<unsigned long>(r.count), static_cast<unsigned long>(r.n * r.n));
            r.per_n2.canonicalize();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

std::string growth_csv(const std::vector<GrowthRow>& rows) {
    std::ostringstream out;
    out << "n,count,count_over_n,count_over_n2\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.count << ',' << to_string(r.per_n) << ',' << to_string(r.per_n2) << '\n';
    return out.str();
}

namespace {
constexpr char kMagic[4] = {'S', 'D', 'S', 'Q'};
constexpr std::uint8_t kCacheVersion = 1;
}  // namespace

void write_cache(const std::string& path, const ArithmeticSequence& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write sequence cache " + path);
    out.write(kMagic, 4);
    out.put(static_cast<char>(kCacheVersion));
    out.put(static_cast<char>(s.kind));
    std::uint64_t n = s.n_max();
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>(n >> (8 * i) & 0xff));
    out.write(reinterpret_cast<const char*>(s.values.data()), static_cast<std::streamsize>(s.values.size()));
    if (!out) throw std::runtime_error("failed writing sequence cache " + path);
}

ArithmeticSequence read_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read sequence cache " + path);
    char header[14];
    if (!in.read(header, sizeof header) || !std::equal(kMagic, kMagic + 4, header))
        throw std::runtime_error("not a sequence cache: " + path);
    if (static_cast<std::uint8_t>(header[4]) != kCacheVersion)
        throw std::runtime_error("unsupported sequence cache version in " + path);
    const auto kind = static_cast<std::uint8_t>(header[5]);
    if (kind < 1 || kind > 3) throw std::runtime_error("bad sequence kind in " + path);
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(header[6 + i])) << (8 * i);
    ArithmeticSequence s;
    s.kind = static_cast<ArithmeticKind>(kind);
    s.values.resize(n);
    if (!in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(n)))
        throw std::runtime_error("truncated sequence cache " + path);
    if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("trailing bytes in " + path);
    for (auto v : s.values)
        if (v < -1 || v > 1) throw std::runtime_error("value outside {-1,0,1} in " + path);
    return s;
}

}  // namespace symdyn
