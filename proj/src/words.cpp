#include "symdyn/words.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <unordered_map>

#include "window_hash.hpp"

namespace symdyn {

Alphabet::Alphabet(std::uint32_t size) : size_(size) {
    if (size == 0) throw std::invalid_argument("alphabet must be nonempty");
}

Word::Word(Alphabet alphabet, std::vector<Symbol> symbols)
    : alphabet_(alphabet), symbols_(std::move(symbols)) {
    for (Symbol s : symbols_) {
        if (!alphabet_.contains(s))
            throw std::invalid_argument("symbol " + std::to_string(s) + " outside alphabet of size " +
                                        std::to_string(alphabet_.size()));
    }
}

Word::Word(Alphabet alphabet, std::initializer_list<Symbol> symbols)
    : Word(alphabet, std::vector<Symbol>(symbols)) {}

Word Word::slice(std::size_t pos, std::size_t len) const {
    if (pos > size() || len > size() - pos) throw std::out_of_range("slice outside word");
    Word out;
    out.alphabet_ = alphabet_;
    out.symbols_.assign(symbols_.begin() + pos, symbols_.begin() + pos + len);
    return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
    auto c = std::lexicographical_compare_three_way(a.symbols_.begin(), a.symbols_.end(),
                                                    b.symbols_.begin(), b.symbols_.end());
    if (c != 0) return c;
    return a.alphabet_.size() <=> b.alphabet_.size();
}

Word concat(std::span<const Word> parts) {
    if (parts.empty()) return Word();
    const Alphabet a = parts.front().alphabet();
    std::size_t total = 0;
    for (const Word& p : parts) {
        if (p.alphabet() != a) throw std::invalid_argument("concat: mixed alphabets");
        total += p.size();
    }
    std::vector<Symbol> out;
    out.reserve(total);
    for (const Word& p : parts) out.insert(out.end(), p.begin(), p.end());
    return Word(a, std::move(out));
}

Word concat(std::initializer_list<Word> parts) {
    return concat(std::span<const Word>(parts.begin(), parts.size()));
}

Word repeat(const Word& w, std::size_t times) {
    std::vector<Symbol> out;
    out.reserve(w.size() * times);
    for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
    return Word(w.alphabet(), std::move(out));
}

std::size_t mismatches(const Word& u, const Word& v) {
    if (u.size() != v.size()) throw std::invalid_argument("hamming: unequal lengths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < u.size(); ++i) d += u[i] != v[i];
    return d;
}

Rational hamming(const Word& u, const Word& v) {
    std::size_t d = mismatches(u, v);
    if (u.empty()) return Rational(0);
    Rational q(static_cast<unsigned long>(d), static_cast<unsigned long>(u.size()));
    q.canonicalize();
    return q;
}

WordSet subwords(const Word& w, std::size_t n) {
    if (n == 0 || n > w.size())
        throw std::out_of_range("subwords: n=" + std::to_string(n) + " outside [1, " +
                                std::to_string(w.size()) + "]");
    WordSet out;
    for (std::size_t i = 0; i + n <= w.size(); ++i) out.insert(w.slice(i, n));
    return out;
}

std::size_t least_rotation_index(std::span<const Symbol> s) {
    const std::size_t n = s.size();
    if (n == 0) return 0;
    std::vector<long> f(2 * n, -1);
    std::size_t k = 0;
    for (std::size_t j = 1; j < 2 * n; ++j) {
        Symbol sj = s[j % n];
        long i = f[j - k - 1];
        while (i != -1 && sj != s[(k + static_cast<std::size_t>(i) + 1) % n]) {
            if (sj < s[(k + static_cast<std::size_t>(i) + 1) % n]) k = j - static_cast<std::size_t>(i) - 1;
            i = f[static_cast<std::size_t>(i)];
        }
        if (i == -1 && sj != s[k % n]) {
            if (sj < s[k % n]) k = j;
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    return k % n;
}

Word canonical_rotation(const Word& w) {
    std::size_t k = least_rotation_index(w.symbols());
    std::vector<Symbol> out(w.begin() + k, w.end());
    out.insert(out.end(), w.begin(), w.begin() + k);
    return Word(w.alphabet(), std::move(out));
}

bool rotation_distinct(const Word& u, const Word& v) {
    if (u.size() != v.size()) throw std::invalid_argument("rotation_distinct: unequal lengths");
    if (u.alphabet() != v.alphabet()) throw std::invalid_argument("rotation_distinct: mixed alphabets");
    return canonical_rotation(u) != canonical_rotation(v);
}

bool shares_doubled_window(const Word& u, const Word& v) {
    if (u.size() != v.size()) throw std::invalid_argument("shares_doubled_window: unequal lengths");
    const std::size_t n = u.size();
    if (n == 0) return true;
    std::vector<Symbol> uu(u.begin(), u.end()), vv(v.begin(), v.end());
    uu.insert(uu.end(), u.begin(), u.end());
    vv.insert(vv.end(), v.begin(), v.end());
    detail::WindowHasher hasher(n);
    std::vector<std::uint64_t> hu, hv;
    hasher.all(uu, hu);
    hasher.all(vv, hv);
    // Windows are referenced by start position in uu, never copied.
    std::unordered_multimap<std::uint64_t, std::size_t> starts;
    starts.reserve(hu.size());
    for (std::size_t i = 0; i < hu.size(); ++i) starts.emplace(hu[i], i);
    for (std::size_t j = 0; j < hv.size(); ++j) {
        auto [lo, hi] = starts.equal_range(hv[j]);
        for (auto it = lo; it != hi; ++it)
            if (std::equal(vv.begin() + j, vv.begin() + j + n, uu.begin() + it->second)) return true;
    }
    return false;
}

Rational occurrence_frequency(const WordSet& patterns, const Word& w) {
    if (patterns.empty()) return Rational(0);
    const std::size_t n = patterns.begin()->size();
    for (const Word& p : patterns)
        if (p.size() != n) throw std::invalid_argument("occurrence_frequency: mixed pattern lengths");
    if (n == 0 || n > w.size()) throw std::domain_error("occurrence_frequency: word shorter than patterns");
    detail::WindowHasher hasher(n);
    detail::DistinctWindows table(n);
    for (const Word& p : patterns) table.insert(p.symbols(), hasher.hash(p.symbols()));
    std::vector<std::uint64_t> hw;
    hasher.all(w.symbols(), hw);
    unsigned long hits = 0;
    for (std::size_t i = 0; i < hw.size(); ++i)
        if (table.contains(w.symbols().subspan(i, n), hw[i])) ++hits;
    Rational q(hits, static_cast<unsigned long>(hw.size()));
    q.canonicalize();
    return q;
}

namespace {
constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";
}

std::string render(const Word& w, unsigned offset) {
    std::string out;
    if (w.alphabet().size() + offset <= kDigits.size()) {
        out.reserve(w.size());
        for (Symbol s : w) out.push_back(kDigits[s + offset]);
        return out;
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out.push_back('.');
        out += std::to_string(w[i] + offset);
    }
    return out;
}

Word parse_word(std::string_view text, Alphabet alphabet, unsigned offset) {
    std::vector<Symbol> out;
    auto take = [&](unsigned long v) {
        if (v < offset) throw std::invalid_argument("symbol below offset in '" + std::string(text) + "'");
        out.push_back(static_cast<Symbol>(v - offset));
    };
    if (text.find('.') != std::string_view::npos) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find('.', pos);
            if (end == std::string_view::npos) end = text.size();
            unsigned long v = 0;
            auto r = std::from_chars(text.data() + pos, text.data() + end, v);
            if (r.ec != std::errc() || r.ptr != text.data() + end)
                throw std::invalid_argument("bad symbol in '" + std::string(text) + "'");
            take(v);
            pos = end + 1;
        }
    } else {
        for (char c : text) {
            auto k = kDigits.find(c);
            if (k == std::string_view::npos)
                throw std::invalid_argument("bad symbol '" + std::string(1, c) + "'");
            take(k);
        }
    }
    return Word(alphabet, std::move(out));
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos) throw std::invalid_argument("bad rational '" + s + "'");
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t scale = s.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+")
            throw std::invalid_argument("bad rational '" + s + "'");
        if (digits[0] == '+') digits.erase(0, 1);
        mpz_class num;
        if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }
    Rational q;
    if (s[0] == '+') s.erase(0, 1);
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace symdyn
