#include "symdyn/codebook.hpp"

#include <bit>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "random.hpp"

namespace symdyn {

namespace {

constexpr double kGuard = 0x1.0p-20;

double log2_mpz(const mpz_class& v) {
    if (v <= 0) return -std::numeric_limits<double>::infinity();
    long exp = 0;
    double d = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log2(d) + static_cast<double>(exp);
}

mpz_class floor_q(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

mpz_class ceil_q(const Rational& q) {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

}  // namespace

void CodebookSpec::validate() const {
    if (alphabet_size < 2) throw std::invalid_argument("codebook alphabet needs at least 2 letters");
    if (length == 0) throw std::invalid_argument("codebook length must be positive");
    Rational limit(alphabet_size - 1, alphabet_size);
    if (alpha <= 0 || alpha >= limit)
        throw std::invalid_argument("alpha must lie in (0, (N-1)/N), got " + alpha.get_str());
    if (epsilon <= 0 || epsilon >= 1)
        throw std::invalid_argument("epsilon must lie in (0, 1), got " + epsilon.get_str());
}

std::size_t CodebookSpec::separation_radius() const {
    return floor_q(alpha * static_cast<unsigned long>(length)).get_ui();
}

std::size_t CodebookSpec::open_ball_radius() const {
    mpz_class c = ceil_q(alpha * static_cast<unsigned long>(length));
    return c == 0 ? 0 : c.get_ui() - 1;
}

mpz_class ball_volume(std::size_t n, std::size_t radius, std::uint32_t alphabet_size) {
    if (alphabet_size == 0) throw std::invalid_argument("ball_volume: empty alphabet");
    radius = std::min(radius, n);
    mpz_class total = 0, binom = 1, power = 1;
    for (std::size_t j = 0; j <= radius; ++j) {
        if (j > 0) {
            binom *= static_cast<unsigned long>(n - j + 1);
            binom /= static_cast<unsigned long>(j);
            power *= static_cast<unsigned long>(alphabet_size - 1);
        }
        total += binom * power;
    }
    return total;
}

double rate_function(double x, std::uint32_t alphabet_size) {
    if (alphabet_size < 2) throw std::domain_error("rate_function: alphabet needs at least 2 letters");
    if (x == 0) return 0;
    if (!(x > 0 && x < 1)) throw std::domain_error("rate_function: argument outside (0, 1)");
    return x * std::log2(static_cast<double>(alphabet_size - 1)) - x * std::log2(x) -
           (1 - x) * std::log2(1 - x);
}

double log2_floor_count_lower(const CodebookSpec& spec, const RateReport& r, std::size_t n) {
    const double N = static_cast<double>(spec.alphabet_size);
    const double one_minus_eps = 1.0 - spec.epsilon.get_d();
    const double delta = r.delta.get_d();
    double log2x = std::log2(one_minus_eps) + static_cast<double>(n) * std::log2(N) -
                   static_cast<double>(n) * (1 + delta) * r.f_alpha;
    log2x -= kGuard + 1e-12 * static_cast<double>(n) * std::log2(N);
    if (log2x < 1) return -std::numeric_limits<double>::infinity();
    // floor(X) >= X - 1
    double fl = log2x + std::log2(1 - std::exp2(-log2x));
    return fl - std::log2(static_cast<double>(n));
}

RateReport growth_params(const CodebookSpec& spec, std::size_t search_limit) {
    spec.validate();
    RateReport r;
    const double alpha = spec.alpha.get_d();
    const double log2N = std::log2(static_cast<double>(spec.alphabet_size));
    r.f_alpha = rate_function(alpha, spec.alphabet_size);
    bool found = false;
    for (unsigned j = 0; j <= 60; ++j) {
        double delta = std::ldexp(1.0, -static_cast<int>(j));
        if ((1 + delta) * r.f_alpha + kGuard < log2N) {
            r.delta_exponent = j;
            found = true;
            break;
        }
    }
    if (!found) throw std::domain_error("no dyadic delta satisfies (1+delta) f(alpha) < log2 N");
    mpz_class den = 1;
    den <<= r.delta_exponent;
    r.delta = Rational(mpz_class(1), den);
    r.g = log2N - (1 + r.delta.get_d()) * r.f_alpha;
    r.lambda = std::exp2(r.g / 2);
    {
        double safe = std::exp2(r.g / 2 - kGuard);
        mpz_class scaled(std::floor(std::ldexp(safe, 40)));
        mpz_class d = 1;
        d <<= 40;
        r.lambda_lower = Rational(scaled, d);
        r.lambda_lower.canonicalize();
        if (r.lambda_lower <= 1) throw std::domain_error("growth rate too close to 1 to certify");
    }

    const double exponent_rate = (1 + r.delta.get_d()) * r.f_alpha;
    const double log2_lambda = r.g / 2;
    std::size_t last_fail = 0;
    for (std::size_t n = 1; n <= search_limit; ++n) {
        CodebookSpec s = spec;
        s.length = n;
        double lv = log2_mpz(ball_volume(n, s.open_ball_radius(), spec.alphabet_size));
        double bound = static_cast<double>(n) * exponent_rate;
        bool volume_ok = lv + kGuard + 1e-12 * bound < bound;
        bool count_ok = log2_floor_count_lower(spec, r, n) >= static_cast<double>(n) * log2_lambda + kGuard;
        if (!(volume_ok && count_ok)) last_fail = n;
        if (n >= 2 * last_fail + 64) {
            r.threshold = last_fail + 1;
            return r;
        }
    }
    throw std::domain_error("growth threshold not found below search limit");
}

std::pair<std::size_t, std::size_t> balanced_count_range(std::size_t n, std::uint32_t alphabet_size,
                                                          const Rational& epsilon) {
    if (alphabet_size == 0) throw std::invalid_argument("balanced_count: empty alphabet");
    if (epsilon <= 0) throw std::invalid_argument("balanced_count: epsilon must be positive");
    Rational mean(static_cast<unsigned long>(n), alphabet_size);
    mean.canonicalize();
    mpz_class lo = floor_q((1 - epsilon) * mean) + 1;
    mpz_class hi = ceil_q((1 + epsilon) * mean) - 1;
    if (lo < 0) lo = 0;
    if (hi > static_cast<unsigned long>(n)) hi = static_cast<unsigned long>(n);
    if (hi < lo) return {1, 0};
    return {lo.get_ui(), hi.get_ui()};
}

mpz_class balanced_count(std::size_t n, std::uint32_t alphabet_size, const Rational& epsilon) {
    auto [lo, hi] = balanced_count_range(n, alphabet_size, epsilon);
    if (lo > hi) return 0;
    // dp[s]: ways to fill s positions using the letters seen so far.
    std::vector<mpz_class> dp(n + 1, 0);
    dp[0] = 1;
    for (std::uint32_t letter = 0; letter < alphabet_size; ++letter) {
        std::vector<mpz_class> next(n + 1, 0);
        for (std::size_t s = 0; s <= n; ++s) {
            for (std::size_t c = lo; c <= hi && c <= s; ++c) {
                if (dp[s - c] == 0) continue;
                mpz_class b;
                mpz_bin_uiui(b.get_mpz_t(), s, c);
                next[s] += dp[s - c] * b;
            }
        }
        dp.swap(next);
    }
    return dp[n];
}

bool is_balanced(const Word& w, const Rational& epsilon) {
    auto [lo, hi] = balanced_count_range(w.size(), w.alphabet().size(), epsilon);
    std::vector<std::size_t> counts(w.alphabet().size(), 0);
    for (Symbol s : w) ++counts[s];
    for (std::size_t c : counts)
        if (c < lo || c > hi) return false;
    return true;
}

std::string mode_name(CodebookMode m) {
    switch (m) {
        case CodebookMode::Auto: return "auto";
        case CodebookMode::Exhaustive: return "exhaustive";
        case CodebookMode::Sampling: return "sampling";
    }
    return "auto";
}

CodebookMode parse_mode(const std::string& s) {
    if (s == "auto") return CodebookMode::Auto;
    if (s == "exhaustive") return CodebookMode::Exhaustive;
    if (s == "sampling") return CodebookMode::Sampling;
    throw std::invalid_argument("unknown codebook mode '" + s + "'");
}

namespace {

// Accepted words in a flat layout suited to repeated distance scans.
class GreedyBook {
public:
    explicit GreedyBook(const CodebookSpec& spec)
        : n_(spec.length), N_(spec.alphabet_size), radius_(spec.separation_radius()),
          binary_(spec.alphabet_size == 2), blocks_((spec.length + 63) / 64) {
        auto range = balanced_count_range(n_, N_, spec.epsilon);
        lo_ = range.first;
        hi_ = range.second;
        counts_.resize(N_);
    }

    bool balanced(const std::vector<Symbol>& w) {
        if (lo_ > hi_) return false;
        std::fill(counts_.begin(), counts_.end(), 0);
        for (Symbol s : w) ++counts_[s];
        for (std::size_t c : counts_)
            if (c < lo_ || c > hi_) return false;
        return true;
    }

    // Tests a balanced candidate and accepts it when admissible.
    bool offer(const std::vector<Symbol>& w) {
        std::string key = rotation_key(w);
        if (classes_.count(key)) return false;
        if (binary_) {
            pack(w, scratch_);
            if (!far_binary(scratch_.data())) return false;
            bits_.insert(bits_.end(), scratch_.begin(), scratch_.end());
        } else {
            if (!far_general(w)) return false;
            symbols_.insert(symbols_.end(), w.begin(), w.end());
        }
        classes_.insert(std::move(key));
        ++size_;
        return true;
    }

    std::size_t size() const { return size_; }

    std::vector<Word> words(Alphabet a) const {
        std::vector<Word> out;
        out.reserve(size_);
        for (std::size_t j = 0; j < size_; ++j) {
            std::vector<Symbol> w(n_);
            if (binary_) {
                const std::uint64_t* p = bits_.data() + j * blocks_;
                for (std::size_t i = 0; i < n_; ++i) w[i] = (p[i / 64] >> (i % 64)) & 1;
            } else {
                std::copy_n(symbols_.data() + j * n_, n_, w.begin());
            }
            out.emplace_back(a, std::move(w));
        }
        return out;
    }

private:
    void pack(const std::vector<Symbol>& w, std::vector<std::uint64_t>& out) const {
        out.assign(blocks_, 0);
        for (std::size_t i = 0; i < n_; ++i)
            if (w[i]) out[i / 64] |= std::uint64_t{1} << (i % 64);
    }

    template <std::size_t B>
    bool far_fixed(const std::uint64_t* c) const {
        const std::uint64_t* p = bits_.data();
        for (std::size_t j = 0; j < size_; ++j, p += B) {
            std::size_t d = 0;
            for (std::size_t b = 0; b < B; ++b) d += std::popcount(p[b] ^ c[b]);
            if (d <= radius_) return false;
        }
        return true;
    }

    bool far_binary(const std::uint64_t* c) const {
        switch (blocks_) {
            case 1: return far_fixed<1>(c);
            case 2: return far_fixed<2>(c);
            case 3: return far_fixed<3>(c);
            case 4: return far_fixed<4>(c);
            default: break;
        }
        const std::uint64_t* p = bits_.data();
        for (std::size_t j = 0; j < size_; ++j, p += blocks_) {
            std::size_t d = 0;
            for (std::size_t b = 0; b < blocks_; ++b) d += std::popcount(p[b] ^ c[b]);
            if (d <= radius_) return false;
        }
        return true;
    }

    bool far_general(const std::vector<Symbol>& w) const {
        const Symbol* p = symbols_.data();
        for (std::size_t j = 0; j < size_; ++j, p += n_) {
            std::size_t d = 0;
            for (std::size_t i = 0; i < n_; ++i) d += p[i] != w[i];
            if (d <= radius_) return false;
        }
        return true;
    }

    std::string rotation_key(const std::vector<Symbol>& w) const {
        std::size_t k = least_rotation_index(w);
        std::string key;
        if (binary_) {
            key.assign((n_ + 7) / 8, '\0');
            for (std::size_t i = 0; i < n_; ++i)
                if (w[(k + i) % n_]) key[i / 8] = static_cast<char>(key[i / 8] | (1 << (i % 8)));
        } else {
            key.resize(n_ * sizeof(Symbol));
            for (std::size_t i = 0; i < n_; ++i) {
                Symbol s = w[(k + i) % n_];
                std::memcpy(key.data() + i * sizeof(Symbol), &s, sizeof(Symbol));
            }
        }
        return key;
    }

    std::size_t n_;
    std::uint32_t N_;
    std::size_t radius_;
    bool binary_;
    std::size_t blocks_;
    std::size_t lo_ = 0, hi_ = 0;
    std::vector<std::size_t> counts_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint64_t> scratch_;
    std::vector<Symbol> symbols_;
    std::unordered_set<std::string> classes_;
    std::size_t size_ = 0;

};

bool exhaustive_fits(const CodebookSpec& spec, std::uint64_t limit) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < spec.length; ++i) {
        if (total > limit / spec.alphabet_size) return false;
        total *= spec.alphabet_size;
    }
    return total <= limit;
}

}  // namespace

Codebook build_codebook(const CodebookSpec& spec, const CodebookOptions& options) {
    spec.validate();
    Codebook out;
    out.spec = spec;
    out.seed = options.seed;
    CodebookMode mode = options.mode;
    if (mode == CodebookMode::Auto)
        mode = exhaustive_fits(spec, options.exhaustive_limit) ? CodebookMode::Exhaustive
                                                               : CodebookMode::Sampling;
    if (mode == CodebookMode::Exhaustive && !exhaustive_fits(spec, options.exhaustive_limit))
        throw std::invalid_argument("exhaustive enumeration exceeds its limit; use sampling");
    out.mode = mode;

    GreedyBook book(spec);
    std::vector<Symbol> w(spec.length, 0);
    auto reached = [&] { return options.target_size && book.size() >= *options.target_size; };

    if (mode == CodebookMode::Exhaustive) {
        for (;;) {
            ++out.raw_samples;
            if (book.balanced(w)) {
                ++out.candidates_examined;
                book.offer(w);
                if (reached()) break;
            }
            std::size_t pos = spec.length;
            bool done = false;
            while (pos > 0) {
                --pos;
                if (++w[pos] < spec.alphabet_size) break;
                w[pos] = 0;
                if (pos == 0) done = true;
            }
            if (done) break;
        }
    } else {
        std::mt19937_64 rng(options.seed);
        const std::uint64_t raw_cap =
            options.raw_sample_cap ? options.raw_sample_cap : 64 * options.candidate_budget;
        while (!reached()) {
            if (out.candidates_examined >= options.candidate_budget || out.raw_samples >= raw_cap) {
                out.budget_exhausted = true;
                break;
            }
            ++out.raw_samples;
            if (spec.alphabet_size == 2) {
                std::uint64_t bits = 0;
                for (std::size_t i = 0; i < spec.length; ++i) {
                    if (i % 64 == 0) bits = rng();
                    w[i] = static_cast<Symbol>((bits >> (i % 64)) & 1);
                }
            } else {
                for (auto& s : w) s = static_cast<Symbol>(detail::uniform_below(rng, spec.alphabet_size));
            }
            if (!book.balanced(w)) continue;
            ++out.candidates_examined;
            book.offer(w);
        }
    }
    out.target_reached = reached();
    out.words = book.words(Alphabet(spec.alphabet_size));
    return out;
}

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string serialize_codebook(const Codebook& book, const std::optional<RateReport>& report) {
    std::ostringstream out;
    out << "# symdyn codebook\n";
    out << "# alphabet_size: " << book.spec.alphabet_size << '\n';
    out << "# length: " << book.spec.length << '\n';
    out << "# alpha: " << book.spec.alpha.get_str() << '\n';
    out << "# epsilon: " << book.spec.epsilon.get_str() << '\n';
    out << "# seed: " << book.seed << '\n';
    out << "# mode: " << mode_name(book.mode) << '\n';
    out << "# candidates_examined: " << book.candidates_examined << '\n';
    out << "# raw_samples: " << book.raw_samples << '\n';
    out << "# budget_exhausted: " << (book.budget_exhausted ? "true" : "false") << '\n';
    if (report) {
        out << "# rate.f_alpha: " << fmt_double(report->f_alpha) << '\n';
        out << "# rate.delta: " << report->delta.get_str() << '\n';
        out << "# rate.g: " << fmt_double(report->g) << '\n';
        out << "# rate.lambda: " << fmt_double(report->lambda) << '\n';
        out << "# rate.lambda_lower: " << report->lambda_lower.get_str() << '\n';
        out << "# rate.threshold: " << report->threshold << '\n';
    }
    out << "# words: " << book.words.size() << '\n';
    for (const Word& w : book.words) out << render(w) << '\n';
    return out.str();
}

Codebook parse_codebook(const std::string& text) {
    Codebook book;
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> body;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') {
            body.push_back(line);
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(2, colon - 2);
        std::string value = line.substr(colon + 2);
        if (key == "alphabet_size") book.spec.alphabet_size = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "length") book.spec.length = std::stoul(value);
        else if (key == "alpha") book.spec.alpha = parse_rational(value);
        else if (key == "epsilon") book.spec.epsilon = parse_rational(value);
        else if (key == "seed") book.seed = std::stoull(value);
        else if (key == "mode") book.mode = parse_mode(value);
        else if (key == "candidates_examined") book.candidates_examined = std::stoull(value);
        else if (key == "raw_samples") book.raw_samples = std::stoull(value);
        else if (key == "budget_exhausted") book.budget_exhausted = value == "true";
    }
    Alphabet a(book.spec.alphabet_size);
    for (const auto& b : body) {
        Word w = parse_word(b, a);
        if (w.size() != book.spec.length) throw std::invalid_argument("codebook word of wrong length");
        book.words.push_back(std::move(w));
    }
    return book;
}

}  // namespace symdyn
