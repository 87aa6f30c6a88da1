#include "symdyn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symdyn/arithmetic.hpp"
#include "symdyn/codebook.hpp"
#include "symdyn/language.hpp"
#include "symdyn/measures.hpp"
#include "symdyn/thm1.hpp"
#include "symdyn/thm2.hpp"

namespace symdyn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::vector<std::string> kCommands = {"thm1-build", "thm1-verify", "thm2-ledger", "thm2-build",
                                            "thm2-certify", "codebook", "complexity", "cover",
                                            "quiet-check", "liouville", "report"};

// Configuration problems: exit 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    json config;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    fs::path out_dir;
    fs::path config_dir;
    std::map<std::string, std::string> artifacts;  // name -> text
    json summary = json::object();
    bool certified = true;
    std::vector<std::string> failures;

    void write(const std::string& name, std::string text) { artifacts[name] = std::move(text); }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
    void fail(const std::string& why) {
        certified = false;
        failures.push_back(why);
    }
};

void allow_keys(const json& cfg, std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    ok.insert("seed");
    for (const auto& [k, v] : cfg.items())
        if (!ok.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

Rational get_rational(const json& cfg, const char* key, const std::string& fallback) {
    if (!cfg.contains(key)) return parse_rational(fallback);
    const json& v = cfg.at(key);
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw ConfigError(std::string("'") + key + "' must be an integer or a \"p/q\" string");
}

template <class T>
T get(const json& cfg, const char* key, T fallback) {
    if (!cfg.contains(key)) return fallback;
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::vector<Word> get_words(const json& cfg, const char* key, std::uint32_t alphabet) {
    if (!cfg.contains(key) || !cfg.at(key).is_array() || cfg.at(key).empty())
        throw ConfigError(std::string("'") + key + "' must be a nonempty array of words");
    std::vector<Word> out;
    for (const auto& w : cfg.at(key)) out.push_back(parse_word(w.get<std::string>(), Alphabet(alphabet)));
    return out;
}

std::uint32_t alphabet_of(const json& cfg, const char* key) {
    std::uint32_t top = 1;
    if (cfg.contains(key) && cfg.at(key).is_array())
        for (const auto& w : cfg.at(key))
            for (char c : w.get<std::string>())
                if (c >= '0' && c <= '9') top = std::max<std::uint32_t>(top, static_cast<std::uint32_t>(c - '0'));
    return get<std::uint32_t>(cfg, "alphabet", top + 1);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path resolve(const Run& r, const std::string& p) {
    fs::path q(p);
    return q.is_absolute() ? q : r.config_dir / q;
}

std::string words_text(const std::vector<Word>& ws) {
    std::string s;
    for (const Word& w : ws) s += render(w) + "\n";
    return s;
}

// ---- commands --------------------------------------------------------------

void cmd_liouville(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"kind", "n_max", "n_lo", "n_hi", "sieve_limit", "cache"});
    const std::string kind = get<std::string>(c, "kind", "liouville");
    const auto n_max = get<std::uint64_t>(c, "n_max", 100000);
    const auto n_lo = get<std::size_t>(c, "n_lo", 1), n_hi = get<std::size_t>(c, "n_hi", 16);
    const auto limit = get<std::uint64_t>(c, "sieve_limit", kDefaultSieveLimit);
    ArithmeticSequence s;
    if (kind == "liouville")
        s = liouville(n_max, limit);
    else if (kind == "mobius")
        s = mobius(n_max, limit);
    else
        throw ConfigError("kind must be liouville or mobius");
    if (n_hi > n_max) throw ConfigError("n_hi exceeds n_max");
    auto rows = growth_report(s, n_lo, n_hi, r.threads);
    bool nondecreasing = true, submultiplicative = true;
    std::map<std::size_t, std::uint64_t> p;
    for (const auto& row : rows) p[row.n] = row.count;
    for (std::size_t i = 1; i < rows.size(); ++i) nondecreasing = nondecreasing && rows[i].count >= rows[i - 1].count;
    for (const auto& [a, pa] : p)
        for (const auto& [b, pb] : p)
            if (p.count(a + b)) submultiplicative = submultiplicative && p[a + b] <= pa * pb;
    if (!nondecreasing) r.fail("window counts decrease");
    if (!submultiplicative) r.fail("window counts are not submultiplicative");
    std::uint64_t sum = 0;
    for (auto v : s.values) sum += static_cast<std::uint64_t>(v + 1);
    r.write("growth.csv", growth_csv(rows));
    r.write_json("sequence.json", {{"kind", kind},
                                   {"n_max", n_max},
                                   {"value_sum_plus_n", sum},
                                   {"nondecreasing", nondecreasing},
                                   {"submultiplicative", submultiplicative}});
    if (c.contains("cache")) {
        const fs::path cache = r.out_dir / get<std::string>(c, "cache", "");
        write_cache(cache.string(), s);
    }
    r.summary = {{"rows", rows.size()}, {"nondecreasing", nondecreasing}, {"submultiplicative", submultiplicative}};
}

void cmd_complexity(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"generators", "alphabet", "n_lo", "n_hi", "budget", "language"});
    ConcatSubshift x(get_words(c, "generators", alphabet_of(c, "generators")));
    const auto n_lo = get<std::size_t>(c, "n_lo", 1), n_hi = get<std::size_t>(c, "n_hi", 8);
    const auto budget = get<std::uint64_t>(c, "budget", kDefaultWindowBudget);
    if (n_lo < 1 || n_lo > n_hi) throw ConfigError("need 1 <= n_lo <= n_hi");
    std::vector<std::pair<std::size_t, std::uint64_t>> rows;
    for (std::size_t n = n_lo; n <= n_hi; ++n) rows.emplace_back(n, complexity(x, n, budget));
    r.write("complexity.csv", complexity_csv(rows));
    if (get<bool>(c, "language", false)) r.write("language.txt", language_dump(language(x, n_hi, budget)));
    json counts = json::array();
    for (const auto& [n, p] : rows) counts.push_back({{"n", n}, {"count", p}});
    r.summary = {{"counts", counts}};
    r.write_json("complexity.json", r.summary);
}

void cmd_codebook(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"alphabet", "length", "alpha", "epsilon", "mode", "candidate_budget", "exhaustive_limit",
                   "target_size"});
    CodebookSpec spec{get<std::uint32_t>(c, "alphabet", 2), get<std::size_t>(c, "length", 16),
                      get_rational(c, "alpha", "1/4"), get_rational(c, "epsilon", "1/2")};
    spec.validate();
    CodebookOptions opt;
    opt.mode = parse_mode(get<std::string>(c, "mode", "auto"));
    opt.candidate_budget = get<std::uint64_t>(c, "candidate_budget", opt.candidate_budget);
    opt.exhaustive_limit = get<std::uint64_t>(c, "exhaustive_limit", opt.exhaustive_limit);
    if (c.contains("target_size")) opt.target_size = get<std::size_t>(c, "target_size", 0);
    opt.seed = r.seed;
    opt.threads = r.threads;
    Codebook book = build_codebook(spec, opt);
    CodebookAudit audit = audit_codebook(book.words, spec.alpha, spec.epsilon, r.threads);
    if (!audit.ok()) r.fail("codebook audit: " + audit.first_failure);

    // floor((1-eps) N^n / V) / n with V the open ball {d_H < alpha}.
    mpz_class total;
    mpz_ui_pow_ui(total.get_mpz_t(), spec.alphabet_size, spec.length);
    const mpz_class vol = ball_volume(spec.length, spec.open_ball_radius(), spec.alphabet_size);
    const Rational ratio = (1 - spec.epsilon) * Rational(total) / Rational(vol);
    const mpz_class floor_count = mpz_class(ratio.get_num() / ratio.get_den()) / static_cast<unsigned long>(spec.length);
    const bool floor_met = mpz_class(static_cast<unsigned long>(book.words.size())) >= floor_count;
    if (book.mode == CodebookMode::Exhaustive && !floor_met) r.fail("codebook smaller than the counting floor");

    std::optional<RateReport> rate;
    try {
        rate = growth_params(spec);
    } catch (const std::domain_error&) {
    }
    r.write("codebook.txt", serialize_codebook(book, rate));
    r.summary = {{"size", book.words.size()},
                 {"mode", mode_name(book.mode)},
                 {"candidates_examined", book.candidates_examined},
                 {"ball_volume", integer_to_text(vol)},
                 {"floor", integer_to_text(floor_count)},
                 {"floor_met", floor_met},
                 {"audit",
                  {{"balanced", audit.balanced},
                   {"separated", audit.separated},
                   {"rotation_distinct", audit.rotation_distinct},
                   {"min_mismatches", audit.min_mismatches}}}};
    if (rate) r.summary["rate"] = {{"g", rate->g}, {"delta", to_string(rate->delta)}, {"threshold", rate->threshold}};
    r.write_json("codebook.json", r.summary);
}

Thm1Params thm1_params_from(const Run& r, const json& c) {
    if (c.contains("params")) {
        const json& p = c.at("params");
        if (p.is_string()) return Thm1Params::from_json(json::parse(read_text(resolve(r, p.get<std::string>()))));
        return Thm1Params::from_json(p);
    }
    IntegerSequence p = c.contains("p") ? IntegerSequence::from_json(c.at("p")) : IntegerSequence::polynomial(Rational(1), 2);
    DeltaSchedule delta = c.contains("delta") ? DeltaSchedule::from_json(c.at("delta")) : DeltaSchedule{};
    return auto_params(p, get<unsigned>(c, "levels", 2), delta, get<bool>(c, "balanced", false),
                       get<std::uint64_t>(c, "horizon", kDefaultHorizon));
}

void cmd_thm1_build(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"p", "levels", "balanced", "horizon", "delta", "params", "materialize"});
    Thm1Params params = thm1_params_from(r, c);
    const unsigned levels = get<unsigned>(c, "levels", static_cast<unsigned>(params.levels.size()));
    json checks = json::array();
    for (const auto& q : check_params(params)) {
        checks.push_back(q.to_json());
        if (!q.holds) r.fail("level " + std::to_string(q.level) + ": " + q.name);
    }
    r.write_json("thm1_params.json", params.to_json());
    r.write_json("thm1_checks.json", checks);
    json lengths = json::array();
    if (get<bool>(c, "materialize", true)) {
        auto fams = build_families(params, levels);
        for (const auto& f : fams) {
            r.write("thm1_words_level" + std::to_string(f.level) + ".txt", words_text(f.words));
            lengths.push_back(f.length());
        }
    }
    r.summary = {{"levels", params.levels.size()}, {"materialized_lengths", lengths}};
}

void cmd_thm1_verify(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"p", "levels", "balanced", "horizon", "delta", "params", "budget"});
    Thm1Params params = thm1_params_from(r, c);
    const unsigned levels = get<unsigned>(c, "levels", static_cast<unsigned>(params.levels.size()));
    const auto budget = get<std::uint64_t>(c, "budget", kDefaultWindowBudget);
    auto fams = build_families(params, levels);
    json cert = json::object();
    std::string csv = "level,n,exact,structural_bound,headline_bound,corrected_bound\n";
    json per_level = json::array();
    for (std::size_t k = 0; k < fams.size(); ++k) {
        json lv;
        DistinctCertificate d = verify_distinct_subwords(fams[k], r.threads);
        lv["distinct"] = d.to_json();
        if (!d.ok) r.fail("level " + std::to_string(k + 1) + ": shared doubled-word windows");
        if (k > 0) {
            ContainmentCertificate ct = verify_containment(fams[k - 1], fams[k]);
            lv["containment"] = ct.to_json();
            if (!ct.ok) r.fail("level " + std::to_string(k + 1) + ": containment");
        }
        ComplexityCertificate cc = complexity_certificate(fams[k], k ? &fams[k - 1] : nullptr, budget);
        lv["complexity"] = cc.to_json();
        if (!cc.ok()) r.fail("level " + std::to_string(k + 1) + ": complexity bound");
        if (cc.level_one_equality && !*cc.level_one_equality)
            lv["note"] = "level-1 count differs from 4n-2; the bound 4n-2 is checked as an upper bound";
        auto opt = [](const std::optional<mpz_class>& z) { return z ? integer_to_text(*z) : std::string(); };
        csv += std::to_string(k + 1) + "," + std::to_string(cc.n) + "," + (cc.exact ? std::to_string(*cc.exact) : "") +
               "," + opt(cc.structural_bound) + "," + opt(cc.headline_bound) + "," + integer_to_text(cc.corrected_bound) +
               "\n";
        per_level.push_back(lv);
    }
    cert["levels"] = per_level;
    cert["ok"] = r.certified;
    r.write_json("thm1_certificate.json", cert);
    r.write("thm1_complexity.csv", csv);
    r.summary = {{"levels", fams.size()}, {"ok", r.certified}};
}

Thm2Params thm2_params_from(const Run& r) {
    json c = r.config;
    c["seed"] = r.seed;
    c["threads"] = r.threads;
    return Thm2Params::from_json(c);
}

void certify_into(Run& r, const PhaseLedger& ledger, const std::vector<const LevelWords*>& words) {
    LedgerCertificate cert = certify_ledger(ledger, words, r.threads);
    if (!cert.ok()) r.fail("thm2 ledger certificate");
    r.write_json("thm2_certificate.json", cert.to_json());
    json statuses = json::object();
    for (const auto& lv : cert.levels)
        for (const char* cond : {"c1", "c2", "c3", "c4", "c5", "c6", "quiet"})
            statuses[std::to_string(lv.level)][cond] = status_name(lv.condition(cond));
    r.summary = {{"ok", cert.ok()}, {"levels", statuses}};
}

void cmd_thm2(Run& r, bool with_words) {
    allow_keys(r.config, {"a", "b", "schedules", "levels", "materialize_budget", "candidate_factor", "search_min",
                          "search_max", "threads"});
    Thm2Params params = thm2_params_from(r);
    Thm2Run run = build_thm2(params);
    std::vector<const LevelWords*> ws;
    for (auto& w : run.words) {
        Thm2Level& L = run.ledger.levels.at(w.level - 1);
        if (with_words) {
            const std::string name = "thm2_words_level" + std::to_string(w.level) + ".txt";
            const std::string text = serialize_codebook(w.letters, std::nullopt);
            L.words_file = name;
            L.words_checksum = text_checksum(text);
            r.write(name, text);
            ws.push_back(&w);
        } else {
            L.words_file.clear();
            L.words_checksum.clear();
        }
    }
    r.write("thm2_ledger.json", run.ledger.to_json().dump() + "\n");
    certify_into(r, run.ledger, ws);
}

void cmd_thm2_certify(Run& r) {
    allow_keys(r.config, {"ledger"});
    if (!r.config.contains("ledger")) throw ConfigError("thm2-certify needs 'ledger'");
    const fs::path path = resolve(r, r.config.at("ledger").get<std::string>());
    PhaseLedger ledger = PhaseLedger::from_json(json::parse(read_text(path)));
    std::vector<LevelWords> words;
    for (const auto& L : ledger.levels) {
        if (L.words_file.empty()) continue;
        const std::string text = read_text(path.parent_path() / L.words_file);
        if (text_checksum(text) != L.words_checksum) {
            r.fail("level " + std::to_string(L.level) + ": words file checksum mismatch");
            continue;
        }
        LevelWords w;
        w.level = L.level;
        w.letters = parse_codebook(text);
        w.words = w.letters.words;
        words.push_back(std::move(w));
    }
    std::vector<const LevelWords*> ws;
    for (const auto& w : words) ws.push_back(&w);
    const bool files_ok = r.certified;
    certify_into(r, ledger, ws);
    if (!files_ok) r.summary["ok"] = false;
}

void cmd_quiet_check(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"words", "alphabet", "M", "P", "sample_length", "slack"});
    std::vector<Word> ws = get_words(c, "words", alphabet_of(c, "words"));
    for (const Word& w : ws)
        if (w.size() != ws.front().size()) throw ConfigError("quiet-check words must share one length");
    const auto M = get<std::size_t>(c, "M", 10), P = get<std::size_t>(c, "P", 2 * ws.front().size());
    const auto len = get<std::uint64_t>(c, "sample_length", 100000);
    std::optional<Rational> slack;
    if (c.contains("slack")) slack = get_rational(c, "slack", "0");
    QuietCertificate q = quiet_sample_check(ws, M, P, len, r.seed, slack);
    if (!q.holds) r.fail("quiet mass below 1 - (P-1)/(NM) - slack");
    r.summary = q.to_json();
    r.write_json("quiet.json", r.summary);
}

void cmd_cover(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"generators", "alphabet", "sample_length", "n", "eps", "method", "exact_limit", "universe"});
    const std::uint32_t A = alphabet_of(c, "generators");
    ConcatSubshift x(get_words(c, "generators", A));
    const auto len = get<std::size_t>(c, "sample_length", 10000);
    const auto n = get<std::size_t>(c, "n", x.block_length());
    const std::string method = get<std::string>(c, "method", "greedy");
    if (method != "greedy" && method != "exact") throw ConfigError("method must be greedy or exact");
    const auto limit = get<std::size_t>(c, "exact_limit", kExactCoverLimit);
    std::vector<Rational> eps;
    for (const auto& e : c.value("eps", json::array({"1/10", "1/5", "3/10"})))
        eps.push_back(e.is_string() ? parse_rational(e.get<std::string>()) : Rational(e.get<long>()));
    std::sort(eps.begin(), eps.end());
    Word sample = sample_point(x, len, r.seed);
    EmpiricalMeasure m = empirical_measure(sample, n);
    WordSet universe;
    if (c.contains("universe"))
        for (const Word& w : get_words(c, "universe", A)) universe.insert(w);
    else
        for (const auto& kv : m.counts) universe.insert(kv.first);
    json results = json::array();
    std::optional<std::size_t> prev;
    bool monotone = true;
    for (const Rational& e : eps) {
        CoverResult res = covering_number(m, e, universe, method == "exact" ? CoverMethod::Exact : CoverMethod::Greedy,
                                          limit, r.threads);
        if (prev && res.size() > *prev) monotone = false;
        prev = res.size();
        results.push_back(res.to_json());
    }
    if (method == "exact" && !monotone) r.fail("covering number increases with epsilon");
    r.write("measure.csv", m.to_csv());
    r.summary = {{"method", method}, {"universe_size", universe.size()}, {"results", results}, {"monotone", monotone}};
    r.write_json("cover.json", r.summary);
}

void cmd_report(Run& r) {
    const json& c = r.config;
    allow_keys(c, {"a", "b", "estimates"});
    IntegerSequence a = c.contains("a") ? IntegerSequence::from_json(c.at("a")) : IntegerSequence::log();
    IntegerSequence b = c.contains("b") ? IntegerSequence::from_json(c.at("b")) : IntegerSequence::polynomial(Rational(1), 2);
    std::vector<KEstimate> ks;
    for (const auto& e : c.value("estimates", json::array())) {
        KEstimate k;
        k.n = e.at("n").get<std::size_t>();
        k.eps = e.at("eps").is_string() ? parse_rational(e.at("eps").get<std::string>()) : Rational(e.at("eps").get<long>());
        k.K = e.at("K").is_string() ? integer_from_text(e.at("K").get<std::string>()) : mpz_class(e.at("K").get<long>());
        ks.push_back(k);
    }
    auto rows = slow_entropy_report(ks, a, b);
    r.write("slow_entropy.csv", slow_entropy_csv(rows));
    r.summary = {{"rows", rows.size()}};
}

void dispatch(Run& r) {
    const std::string& c = r.command;
    if (c == "liouville") return cmd_liouville(r);
    if (c == "complexity") return cmd_complexity(r);
    if (c == "codebook") return cmd_codebook(r);
    if (c == "thm1-build") return cmd_thm1_build(r);
    if (c == "thm1-verify") return cmd_thm1_verify(r);
    if (c == "thm2-ledger") return cmd_thm2(r, false);
    if (c == "thm2-build") return cmd_thm2(r, true);
    if (c == "thm2-certify") return cmd_thm2_certify(r);
    if (c == "quiet-check") return cmd_quiet_check(r);
    if (c == "cover") return cmd_cover(r);
    if (c == "report") return cmd_report(r);
    throw ConfigError("unknown command '" + c + "'");
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symbolic dynamics constructions with exact certificates"};
    app.set_version_flag("--version", kVersion);
    std::string config_path, out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed, overriding the config");
    app.add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
    std::string command;
    app.add_option("command", command, "one of: thm1-build thm1-verify thm2-ledger thm2-build thm2-certify "
                                        "codebook complexity cover quiet-check liouville report")
        ->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    Run r;
    r.command = command;
    r.out_dir = out_dir;
    r.threads = threads;
    json record = {{"tool", "symdyn"}, {"version", kVersion}, {"command", command}, {"threads", threads}};
    int code = kExitOk;
    json reason;
    try {
        fs::create_directories(r.out_dir);
    } catch (const fs::filesystem_error& e) {
        err << "cannot create output directory: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
            throw ConfigError("unknown command '" + command + "'");
        r.config = json::object();
        if (!config_path.empty()) {
            r.config_dir = fs::path(config_path).parent_path();
            try {
                r.config = json::parse(read_text(config_path));
            } catch (const json::parse_error& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            if (!r.config.is_object()) throw ConfigError("config must be a JSON object");
        }
        r.seed = seed ? *seed : get<std::uint64_t>(r.config, "seed", 0);
        record["config"] = r.config;
        record["seed"] = r.seed;
        dispatch(r);
        if (!r.certified) {
            code = kExitCertificate;
            reason = {{"kind", "certificate"}, {"failures", r.failures}};
        }
    } catch (const BudgetExceeded& e) {
        code = kExitBudget;
        reason = {{"kind", "budget"}, {"message", e.what()}, {"required", e.required()}, {"budget", e.budget()}};
    } catch (const CoverLimitExceeded& e) {
        code = kExitBudget;
        reason = {{"kind", "budget"}, {"message", e.what()}};
    } catch (const SearchHorizonExceeded& e) {
        code = kExitBudget;
        reason = {{"kind", "budget"}, {"message", e.what()}};
    } catch (const std::overflow_error& e) {
        code = kExitBudget;
        reason = {{"kind", "budget"}, {"message", e.what()}};
    } catch (const std::bad_alloc&) {
        code = kExitBudget;
        reason = {{"kind", "budget"}, {"message", "out of memory"}};
    } catch (const std::exception& e) {
        code = kExitUsage;
        reason = {{"kind", "config"}, {"message", e.what()}};
    }

    json artifacts = json::object();
    if (code == kExitOk || code == kExitCertificate) {
        for (const auto& [name, text] : r.artifacts) {
            std::ofstream f(r.out_dir / name, std::ios::binary);
            f << text;
            if (!f) {
                err << "cannot write " << (r.out_dir / name).string() << "\n";
                return kExitUsage;
            }
            artifacts[name] = text_checksum(text);
        }
    }
    record["artifacts"] = artifacts;
    record["exit_code"] = code;
    record["status"] = code == kExitOk ? "ok" : code == kExitCertificate ? "certificate-failure"
                                               : code == kExitBudget   ? "budget-exceeded"
                                                                       : "usage-error";
    if (!reason.is_null()) record["reason"] = reason;
    record["summary"] = r.summary;
    record["timestamp"] = timestamp();
    std::ofstream(r.out_dir / "run_record.json") << record.dump(2) << "\n";

    if (!reason.is_null() && reason.contains("message")) err << command << ": " << reason["message"].get<std::string>() << "\n";
    for (const auto& f : r.failures) err << "certificate failure: " << f << "\n";
    out << command << ": " << record["status"].get<std::string>() << " (" << r.out_dir.string() << ")\n";
    return code;
}

}  // namespace symdyn
