#include "symdyn/measures.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "random.hpp"
#include "window_hash.hpp"

namespace symdyn {

Rational EmpiricalMeasure::freq(const Word& w) const {
    auto it = counts.find(w);
    if (it == counts.end() || total == 0) return Rational(0);
    Rational q(static_cast<unsigned long>(it->second), static_cast<unsigned long>(total));
    q.canonicalize();
    return q;
}

Rational EmpiricalMeasure::mass(const WordSet& words) const {
    if (total == 0) return Rational(0);
    std::uint64_t hits = 0;
    for (const auto& [w, c] : counts)
        if (words.count(w)) hits += c;
    Rational q(static_cast<unsigned long>(hits), static_cast<unsigned long>(total));
    q.canonicalize();
    return q;
}

std::string EmpiricalMeasure::to_csv(unsigned offset) const {
    std::ostringstream out;
    out << "word,numerator,denominator\n";
    for (const auto& [w, c] : counts) out << render(w, offset) << ',' << c << ',' << total << '\n';
    return out.str();
}

Word sample_point(const ConcatSubshift& x, std::size_t length, std::uint64_t seed,
                  const std::vector<Rational>& weights) {
    const auto& gens = x.generators();
    if (weights.size() != gens.size()) throw std::invalid_argument("sample_point: one weight per generator");
    Rational sum = 0;
    mpz_class den = 1;
    for (const Rational& w : weights) {
        if (w < 0) throw std::invalid_argument("sample_point: negative weight");
        sum += w;
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w.get_den_mpz_t());
    }
    if (sum != 1) throw std::invalid_argument("sample_point: weights must sum to 1");
    if (!den.fits_ulong_p()) throw std::invalid_argument("sample_point: weight denominators too large");
    std::vector<std::uint64_t> cumulative;
    std::uint64_t acc = 0;
    for (const Rational& w : weights) {
        mpz_class scaled = w.get_num() * (den / w.get_den());
        acc += scaled.get_ui();
        cumulative.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    std::vector<Symbol> out;
    out.reserve(length + x.block_length());
    while (out.size() < length) {
        std::uint64_t r = detail::uniform_below(rng, den.get_ui());
        std::size_t g = std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
        out.insert(out.end(), gens[g].begin(), gens[g].end());
    }
    out.resize(length);
    return Word(x.alphabet(), std::move(out));
}

Word sample_point(const ConcatSubshift& x, std::size_t length, std::uint64_t seed) {
    const auto k = static_cast<unsigned long>(x.generators().size());
    return sample_point(x, length, seed, std::vector<Rational>(k, Rational(1, k)));
}

EmpiricalMeasure empirical_measure(const Word& x, std::size_t n) {
    if (n == 0 || n > x.size()) throw std::invalid_argument("empirical_measure: window length out of range");
    detail::WindowHasher hasher(n);
    detail::DistinctWindows seen(n);
    std::vector<std::uint64_t> hashes;
    hasher.all(x.symbols(), hashes);
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        std::size_t id = seen.intern(x.symbols().subspan(i, n), hashes[i]);
        if (id == counts.size()) counts.push_back(0);
        ++counts[id];
    }
    EmpiricalMeasure m;
    m.n = n;
    m.total = hashes.size();
    for (std::size_t id = 0; id < seen.size(); ++id) {
        auto w = seen.member(id);
        m.counts.emplace(Word(x.alphabet(), std::vector<Symbol>(w.begin(), w.end())), counts[id]);
    }
    m.provenance["sample_length"] = x.size();
    return m;
}

nlohmann::json QuietCertificate::to_json() const {
    return {{"P", P},
            {"N", N},
            {"M", M},
            {"pattern_count", pattern_count},
            {"mass", to_string(mass)},
            {"bound", to_string(bound)},
            {"slack", to_string(slack)},
            {"holds", holds}};
}

Rational quiet_finite_slack(std::size_t P, std::size_t N, std::size_t M, std::uint64_t sample_length) {
    if (sample_length < P) throw std::invalid_argument("quiet_finite_slack: sample shorter than P");
    Rational s(mpz_class(static_cast<unsigned long>(P - 1)) * static_cast<unsigned long>(P > 1 ? P - 2 : 0),
               mpz_class(static_cast<unsigned long>(N * M)) * static_cast<unsigned long>(sample_length - P + 1));
    s.canonicalize();
    return s;
}

QuietCertificate quiet_bound_check(const EmpiricalMeasure& m, const std::vector<Word>& generators, std::size_t P,
                                   std::size_t N, std::size_t M, std::optional<Rational> slack) {
    if (m.n != P) throw std::invalid_argument("quiet_bound_check: measure window length differs from P");
    if (P < 1 || P >= N * M) throw std::invalid_argument("quiet_bound_check: requires 1 <= P < NM");
    for (const Word& v : generators)
        if (v.size() != N * M) throw std::invalid_argument("quiet_bound_check: generators must have length NM");

    detail::WindowHasher hasher(P);
    detail::DistinctWindows patterns(P);
    std::vector<std::uint64_t> hashes;
    for (const Word& v : generators) {
        hasher.all(v.symbols(), hashes);
        for (std::size_t i = 0; i < hashes.size(); ++i) patterns.insert(v.symbols().subspan(i, P), hashes[i]);
    }
    std::uint64_t hits = 0;
    for (const auto& [w, c] : m.counts)
        if (patterns.contains(w.symbols(), hasher.hash(w.symbols()))) hits += c;

    QuietCertificate q;
    q.P = P;
    q.N = N;
    q.M = M;
    q.pattern_count = patterns.size();
    q.mass = Rational(static_cast<unsigned long>(hits), static_cast<unsigned long>(std::max<std::uint64_t>(m.total, 1)));
    q.mass.canonicalize();
    q.bound = Rational(1) - Rational(static_cast<unsigned long>(P - 1), static_cast<unsigned long>(N * M));
    q.bound.canonicalize();
    q.slack = slack ? *slack : quiet_finite_slack(P, N, M, m.total + P - 1);
    q.holds = q.mass >= q.bound - q.slack;
    return q;
}

nlohmann::json CoverResult::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const Word& w : centers) c.push_back(render(w));
    return {{"K", centers.size()},
            {"centers", c},
            {"covered_mass", to_string(covered_mass)},
            {"epsilon", to_string(epsilon)},
            {"method", method == CoverMethod::Exact ? "exact" : "greedy"},
            {"universe_size", universe_size},
            {"success", success}};
}

namespace {

struct CoverInstance {
    std::vector<Word> centers;                     // universe in order
    std::vector<std::uint64_t> weight;             // per support atom
    std::vector<std::vector<std::size_t>> balls;  // atoms within each center's ball
    std::uint64_t need = 0;                        // covered count must reach this
};

CoverInstance make_instance(const EmpiricalMeasure& m, const Rational& eps, const WordSet& universe,
                            unsigned threads) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("covering_number: eps must lie in (0,1)");
    if (m.total == 0) throw std::invalid_argument("covering_number: empty measure");
    CoverInstance inst;
    inst.centers.assign(universe.begin(), universe.end());
    std::vector<const Word*> atoms;
    for (const auto& [w, c] : m.counts) {
        if (!universe.count(w)) throw std::invalid_argument("covering_number: universe misses a support word");
        atoms.push_back(&w);
        inst.weight.push_back(c);
    }
    for (const Word& u : inst.centers)
        if (u.size() != m.n) throw std::invalid_argument("covering_number: universe word of wrong length");

    // d_H(u, w) < eps  <=>  mismatches * den < num * n
    const mpz_class scaled_radius = eps.get_num() * static_cast<unsigned long>(m.n);
    inst.balls.resize(inst.centers.size());
    auto fill = [&](std::size_t from, std::size_t step) {
        for (std::size_t c = from; c < inst.centers.size(); c += step)
            for (std::size_t a = 0; a < atoms.size(); ++a)
                if (eps.get_den() * static_cast<unsigned long>(mismatches(inst.centers[c], *atoms[a])) < scaled_radius)
                    inst.balls[c].push_back(a);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(inst.centers.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(fill, t, workers);
    fill(0, workers);
    for (auto& th : pool) th.join();

    Rational target = (1 - eps) * static_cast<unsigned long>(m.total);
    mpz_class need;
    mpz_fdiv_q(need.get_mpz_t(), target.get_num_mpz_t(), target.get_den_mpz_t());
    inst.need = need.get_ui() + 1;
    return inst;
}

CoverResult finish(const EmpiricalMeasure& m, const Rational& eps, const CoverInstance& inst,
                   const std::vector<std::size_t>& chosen, CoverMethod method) {
    std::vector<bool> covered(inst.weight.size(), false);
    std::uint64_t mass = 0;
    CoverResult r;
    for (std::size_t c : chosen) {
        r.centers.push_back(inst.centers[c]);
        for (std::size_t a : inst.balls[c])
            if (!covered[a]) {
                covered[a] = true;
                mass += inst.weight[a];
            }
    }
    r.covered_mass = Rational(static_cast<unsigned long>(mass), static_cast<unsigned long>(m.total));
    r.covered_mass.canonicalize();
    r.epsilon = eps;
    r.method = method;
    r.universe_size = inst.centers.size();
    r.success = r.covered_mass > 1 - eps;
    return r;
}

std::vector<std::size_t> greedy_cover(const CoverInstance& inst) {
    std::vector<bool> covered(inst.weight.size(), false);
    std::vector<bool> used(inst.centers.size(), false);
    std::vector<std::size_t> chosen;
    std::uint64_t mass = 0;
    while (mass < inst.need) {
        std::size_t best = inst.centers.size();
        std::uint64_t best_gain = 0;
        for (std::size_t c = 0; c < inst.centers.size(); ++c) {
            if (used[c]) continue;
            std::uint64_t gain = 0;
            for (std::size_t a : inst.balls[c])
                if (!covered[a]) gain += inst.weight[a];
            if (gain > best_gain) {
                best_gain = gain;
                best = c;
            }
        }
        if (best == inst.centers.size()) break;
        used[best] = true;
        chosen.push_back(best);
        for (std::size_t a : inst.balls[best])
            if (!covered[a]) {
                covered[a] = true;
                mass += inst.weight[a];
            }
    }
    return chosen;
}

std::vector<std::size_t> exact_cover(const CoverInstance& inst) {
    const std::size_t u = inst.centers.size();
    std::vector<std::uint32_t> mask(u, 0);
    for (std::size_t c = 0; c < u; ++c)
        for (std::size_t a : inst.balls[c]) mask[c] |= std::uint32_t{1} << a;
    auto weight_of = [&](std::uint32_t bits) {
        std::uint64_t w = 0;
        for (std::size_t a = 0; bits; ++a, bits >>= 1)
            if (bits & 1) w += inst.weight[a];
        return w;
    };
    // suffix_union[c] covers every center from c on, for pruning.
    std::vector<std::uint32_t> suffix_union(u + 1, 0);
    for (std::size_t c = u; c-- > 0;) suffix_union[c] = suffix_union[c + 1] | mask[c];

    std::vector<std::size_t> pick;
    for (std::size_t k = 1; k <= u; ++k) {
        pick.clear();
        auto search = [&](auto&& self, std::size_t from, std::uint32_t have) -> bool {
            if (weight_of(have) >= inst.need) return true;
            if (pick.size() == k) return false;
            if (weight_of(have | suffix_union[from]) < inst.need) return false;
            for (std::size_t c = from; c < u; ++c) {
                if ((mask[c] | have) == have) continue;
                pick.push_back(c);
                if (self(self, c + 1, have | mask[c])) return true;
                pick.pop_back();
            }
            return false;
        };
        if (search(search, 0, 0)) return pick;
    }
    return pick;
}

}  // namespace

CoverResult covering_number(const EmpiricalMeasure& m, const Rational& eps, const WordSet& universe,
                            CoverMethod method, std::size_t exact_limit, unsigned threads) {
    if (method == CoverMethod::Exact && universe.size() > std::min<std::size_t>(exact_limit, 32))
        throw CoverLimitExceeded("exact covering is limited to " + std::to_string(exact_limit) +
                                 " universe words, got " + std::to_string(universe.size()) + "; use greedy");
    CoverInstance inst = make_instance(m, eps, universe, threads);
    auto chosen = method == CoverMethod::Exact ? exact_cover(inst) : greedy_cover(inst);
    return finish(m, eps, inst, chosen, method);
}

CommonPoint find_common_point(const std::vector<std::vector<std::size_t>>& sets, std::size_t n) {
    if (sets.empty() || sets.size() % 2 == 0)
        throw std::invalid_argument("find_common_point: needs an odd number 2k-1 of sets");
    if (n == 0) throw std::invalid_argument("find_common_point: n must be positive");
    const std::size_t k = (sets.size() + 1) / 2;
    std::vector<std::size_t> multiplicity(n + 1, 0);
    std::vector<std::vector<bool>> member(sets.size(), std::vector<bool>(n + 1, false));
    std::size_t total = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::size_t size = 0;
        for (std::size_t x : sets[i]) {
            if (x < 1 || x > n) throw std::invalid_argument("find_common_point: element outside {1..n}");
            if (!member[i][x]) {
                member[i][x] = true;
                ++multiplicity[x];
                ++size;
            }
        }
        if (2 * size < n)
            throw std::invalid_argument("lemma hypothesis |A_i| >= n/2 fails at i = " + std::to_string(i + 1));
        total += size;
    }
    std::size_t s = 1;
    for (std::size_t x = 2; x <= n; ++x)
        if (multiplicity[x] > multiplicity[s]) s = x;
    if (multiplicity[s] < k) {
        // Every point in at most k-1 sets forces sum |A_i| <= n(k-1), while
        // the hypothesis gives 2 sum |A_i| >= (2k-1) n > 2n(k-1).
        std::size_t level_sum = std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0});
        throw std::logic_error("find_common_point: counting contradiction, sum |A_i| = " + std::to_string(total) +
                               " = " + std::to_string(level_sum) + " <= n(k-1) = " + std::to_string(n * (k - 1)));
    }
    CommonPoint out;
    out.s = s;
    out.multiplicity = multiplicity[s];
    for (std::size_t i = 0; i < sets.size() && out.indices.size() < k; ++i)
        if (member[i][s]) out.indices.push_back(i + 1);
    return out;
}

std::vector<SlowEntropyRow> slow_entropy_report(const std::vector<KEstimate>& ks, const IntegerSequence& a,
                                                const IntegerSequence& b) {
    std::vector<SlowEntropyRow> rows;
    for (const KEstimate& e : ks) {
        SlowEntropyRow r;
        r.estimate = e;
        r.a = a.at(mpz_class(static_cast<unsigned long>(e.n)));
        r.b = b.at(mpz_class(static_cast<unsigned long>(e.n)));
        r.ratio_a = Rational(e.K, r.a);
        r.ratio_a.canonicalize();
        r.ratio_b = Rational(e.K, r.b);
        r.ratio_b.canonicalize();
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string slow_entropy_csv(const std::vector<SlowEntropyRow>& rows) {
    std::ostringstream out;
    out << "n,eps,K,a_n,b_n,K_over_a,K_over_b\n";
    for (const auto& r : rows)
        out << r.estimate.n << ',' << to_string(r.estimate.eps) << ',' << r.estimate.K.get_str() << ','
            << r.a.get_str() << ',' << r.b.get_str() << ',' << to_string(r.ratio_a) << ','
            << to_string(r.ratio_b) << '\n';
    return out.str();
}

}  // namespace symdyn
