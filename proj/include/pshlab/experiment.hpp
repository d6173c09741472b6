#pragma once

// Config-driven campaigns over sets, corpora and probe regions. Each scenario
// turns its items into report rows; items run on a worker pool and rows are
// written in input order.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pshlab/envelope.hpp"
#include "pshlab/error.hpp"
#include "pshlab/functionals.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/psh_corpus.hpp"
#include "pshlab/report.hpp"
#include "pshlab/serialize.hpp"
#include "pshlab/siciak.hpp"

namespace pshlab {

struct ScenarioInfo {
    std::string_view name;
    std::string_view anchor;
};

inline constexpr std::array<ScenarioInfo, 8> kScenarios{{
    {"capacity", "Siciak capacity gamma = exp(-Robin constant) via transfinite diameter; gamma(disk(c,t)) = t"},
    {"extremal", "relative extremal function u_{E,Omega}: -1 on E, 0 on the boundary of Omega, maximal in between"},
    {"h-bounds", "two-sided bound V_E / sup_Omega V_A <= h_E <= (u_{E,Omega} + 1) / |sup_A u_{E,Omega}|"},
    {"conjecture-scan", "conjectured floor |sup_A u_{E,Omega}| * sup_Omega V_E >= C_{a,n} > 0"},
    {"claims", "log(1/gamma) <= sup_A V_E <= 2e^2 n log(n/gamma); sup_A u + 1 <= 2 sup_A V_E / sup_Omega V_E; "
               "Klimek bound sup_R u + 1 <= sup_R V_E / inf_{boundary} V_E; Alexander-Taylor comparison"},
    {"brudnyi", "sup_B f <= c log(d |B| / |E|) + sup_E f for real subsets E of an interval B (n = 1)"},
    {"bernstein", "doubling inequality sup_{B(x,st)} f - sup_{B(x,t)} f <= c log s"},
    {"product-case", "product sets: u_{E_1 x E_2} = max of factor envelopes on polydisks; gamma = smallest factor radius"},
}};

inline bool known_scenario(std::string_view name) {
    return std::any_of(kScenarios.begin(), kScenarios.end(), [&](const auto& s) { return s.name == name; });
}

inline std::string list_scenarios() {
    std::string out;
    for (const auto& s : kScenarios) {
        out += std::string(s.name) + "\t" + std::string(s.anchor) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct RandomSetSpec {
    int count = 0;
    /// every generated set lies in the closed disk of this radius
    double max_radius = 0.9;
    double min_size = 0.05;
};

struct ProductCaseSpec {
    std::vector<CompactSetSpec> factors;
    DomainSpec omega = DomainSpec::polydisk(2, 2.0);
    DomainSpec a = DomainSpec::polydisk(2, 1.0);
    std::string label;
};

struct BernsteinSpec {
    std::vector<Complex> centers{{0.0, 0.0}, {0.3, 0.0}, {0.0, -0.4}};
    std::vector<double> t_values{0.05, 0.1};
    int s_points = 8;
};

struct BrudnyiSpec {
    double x = 0.0;
    double t = 0.5;
    int train_patterns = 16;
    int test_patterns = 16;
    int test_count = 32;
    double d = 4.0;
};

struct Tolerances {
    double bounds = 0.03;
    double claims = 0.03;
    double klimek = 0.05;
    double capacity = 0.03;
    double toric = 0.02;
    double stability = 0.10;
};

struct ExperimentConfig {
    std::string scenario;
    std::uint64_t seed = 1;
    int resolution = 128;
    std::optional<int> refine_resolution;
    DomainSpec a = DomainSpec::disk({}, 1.0);
    DomainSpec omega = DomainSpec::disk({}, 2.0);
    std::vector<CompactSetSpec> sets;
    RandomSetSpec random_sets;
    SolverOptions solver;
    std::size_t leja_k = 128;
    SiciakSource siciak = SiciakSource::ClosedFormWhenExact;
    CorpusConfig corpus;
    /// corpus seed; derived from `seed` when absent
    std::optional<std::uint64_t> corpus_seed;
    /// add the normalized Leja polynomial of E to the h-bounds corpus
    bool include_recipe = true;
    /// Klimek probe disks per set
    int probes = 10;
    std::optional<double> conjecture_floor;
    std::vector<ProductCaseSpec> products;
    /// 0: a quarter of the envelope resolution, at least 64
    int toric_resolution = 0;
    BernsteinSpec bernstein;
    BrudnyiSpec brudnyi;
    Tolerances tol;
    /// 0: one worker per hardware thread
    int threads = 0;
    std::string output = "pshlab-run";

    std::uint64_t effective_corpus_seed() const { return corpus_seed ? *corpus_seed : seed + 101; }
    std::vector<int> resolutions() const {
        std::vector<int> r{resolution};
        if (refine_resolution && *refine_resolution != resolution) r.push_back(*refine_resolution);
        return r;
    }
};

namespace detail {

inline void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
        }
    }
}

inline std::vector<double> number_list(const Json& j, const std::string& path) {
    std::vector<double> out;
    const auto& a = io::array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(io::number(a[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline int positive_int(const Json& j, const std::string& key, int fallback, const std::string& path, int lo = 1) {
    const long long v = io::integer_or(j, key, fallback, path);
    if (v < lo || v > 1'000'000'000) {
        throw ConfigError(path.empty() ? key : path + "." + key, "must be >= " + std::to_string(lo));
    }
    return static_cast<int>(v);
}

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
    using detail::check_keys;
    check_keys(j, {"scenario", "seed", "resolution", "refine_resolution", "a", "omega", "sets", "random_sets", "solver",
                   "leja_k", "siciak_source", "corpus", "include_recipe", "probes", "conjecture_floor", "products",
                   "toric_resolution", "bernstein", "brudnyi", "tolerances", "threads", "output"},
               "");
    ExperimentConfig c;
    c.scenario = io::text(io::field(j, "scenario", ""), "scenario");
    if (!known_scenario(c.scenario)) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");
    const long long seed = io::integer_or(j, "seed", 1, "");
    if (seed < 0) throw ConfigError("seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.resolution = detail::positive_int(j, "resolution", c.resolution, "", 16);
    if (j.contains("refine_resolution")) c.refine_resolution = detail::positive_int(j, "refine_resolution", 0, "", 16);
    if (j.contains("a")) c.a = domain_from_json(j.at("a"), "a");
    if (j.contains("omega")) c.omega = domain_from_json(j.at("omega"), "omega");
    if (j.contains("sets")) {
        const auto& s = io::array(j.at("sets"), "sets");
        for (std::size_t i = 0; i < s.size(); ++i) c.sets.push_back(set_from_json(s[i], "sets[" + std::to_string(i) + "]"));
    }
    if (j.contains("random_sets")) {
        const auto& r = j.at("random_sets");
        check_keys(r, {"count", "max_radius", "min_size"}, "random_sets");
        c.random_sets.count = detail::positive_int(r, "count", 0, "random_sets", 0);
        c.random_sets.max_radius = io::number_or(r, "max_radius", c.random_sets.max_radius, "random_sets");
        c.random_sets.min_size = io::number_or(r, "min_size", c.random_sets.min_size, "random_sets");
        if (!(c.random_sets.min_size > 0.0) || !(c.random_sets.max_radius > 4.0 * c.random_sets.min_size)) {
            throw ConfigError("random_sets", "need 0 < min_size < max_radius / 4");
        }
    }
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, {"tol", "max_iter", "method"}, "solver");
        c.solver.tol = io::number_or(s, "tol", c.solver.tol, "solver");
        if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
        c.solver.max_iter = static_cast<std::size_t>(detail::positive_int(s, "max_iter", 0, "solver", 0));
        const std::string m = io::text_or(s, "method", "multigrid", "solver");
        if (m == "multigrid") c.solver.method = SweepMethod::Multigrid;
        else if (m == "jacobi") c.solver.method = SweepMethod::Jacobi;
        else if (m == "red-black") c.solver.method = SweepMethod::RedBlack;
        else throw ConfigError("solver.method", "unknown method '" + m + "'");
    }
    c.leja_k = static_cast<std::size_t>(detail::positive_int(j, "leja_k", static_cast<int>(c.leja_k), "", 32));
    const std::string src = io::text_or(j, "siciak_source", "closed-form-when-exact", "");
    if (src == "closed-form-when-exact") c.siciak = SiciakSource::ClosedFormWhenExact;
    else if (src == "leja") c.siciak = SiciakSource::Leja;
    else throw ConfigError("siciak_source", "expected closed-form-when-exact or leja");
    if (j.contains("corpus")) {
        const auto& s = j.at("corpus");
        check_keys(s, {"seed", "count", "max_degree", "placement"}, "corpus");
        if (s.contains("seed")) {
            const long long v = io::integer(s.at("seed"), "corpus.seed");
            if (v < 0) throw ConfigError("corpus.seed", "must be >= 0");
            c.corpus_seed = static_cast<std::uint64_t>(v);
        }
        c.corpus.count = detail::positive_int(s, "count", c.corpus.count, "corpus");
        c.corpus.max_degree = detail::positive_int(s, "max_degree", c.corpus.max_degree, "corpus");
        c.corpus.placement = placement_from_string(io::text_or(s, "placement", "mixed", "corpus"), "corpus.placement");
    }
    if (j.contains("include_recipe")) {
        if (!j.at("include_recipe").is_boolean()) throw ConfigError("include_recipe", "expected true or false");
        c.include_recipe = j.at("include_recipe").get<bool>();
    }
    c.probes = detail::positive_int(j, "probes", c.probes, "", 0);
    if (j.contains("conjecture_floor")) {
        c.conjecture_floor = io::number(j.at("conjecture_floor"), "conjecture_floor");
        if (!(*c.conjecture_floor > 0.0)) throw ConfigError("conjecture_floor", "must be positive");
    }
    if (j.contains("products")) {
        const auto& p = io::array(j.at("products"), "products");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const std::string path = "products[" + std::to_string(i) + "]";
            check_keys(p[i], {"factors", "omega", "a", "label"}, path);
            ProductCaseSpec pc;
            const auto& f = io::array(io::field(p[i], "factors", path), path + ".factors");
            for (std::size_t k = 0; k < f.size(); ++k) {
                pc.factors.push_back(set_from_json(f[k], path + ".factors[" + std::to_string(k) + "]"));
            }
            if (pc.factors.empty()) throw ConfigError(path + ".factors", "needs at least one factor");
            const int n = static_cast<int>(pc.factors.size());
            pc.omega = p[i].contains("omega") ? domain_from_json(p[i].at("omega"), path + ".omega")
                                              : DomainSpec::polydisk(n, 2.0);
            pc.a = p[i].contains("a") ? domain_from_json(p[i].at("a"), path + ".a") : DomainSpec::polydisk(n, 1.0);
            pc.label = io::text_or(p[i], "label", "", path);
            c.products.push_back(std::move(pc));
        }
    }
    c.toric_resolution = detail::positive_int(j, "toric_resolution", 0, "", 0);
    if (j.contains("bernstein")) {
        const auto& b = j.at("bernstein");
        check_keys(b, {"centers", "t_values", "s_points"}, "bernstein");
        if (b.contains("centers")) {
            c.bernstein.centers.clear();
            const auto& a = io::array(b.at("centers"), "bernstein.centers");
            for (std::size_t i = 0; i < a.size(); ++i) {
                c.bernstein.centers.push_back(io::point(a[i], "bernstein.centers[" + std::to_string(i) + "]"));
            }
        }
        if (b.contains("t_values")) c.bernstein.t_values = detail::number_list(b.at("t_values"), "bernstein.t_values");
        c.bernstein.s_points = detail::positive_int(b, "s_points", c.bernstein.s_points, "bernstein");
        for (Complex x : c.bernstein.centers) {
            for (double t : c.bernstein.t_values) {
                if (!(t > 0.0) || std::abs(x) + 1.01 * t > 1.0) {
                    throw ConfigError("bernstein", "every B(x, t) must lie well inside the unit disk");
                }
            }
        }
    }
    if (j.contains("brudnyi")) {
        const auto& b = j.at("brudnyi");
        check_keys(b, {"x", "t", "train_patterns", "test_patterns", "test_count", "d"}, "brudnyi");
        c.brudnyi.x = io::number_or(b, "x", c.brudnyi.x, "brudnyi");
        c.brudnyi.t = io::number_or(b, "t", c.brudnyi.t, "brudnyi");
        c.brudnyi.train_patterns = detail::positive_int(b, "train_patterns", c.brudnyi.train_patterns, "brudnyi");
        c.brudnyi.test_patterns = detail::positive_int(b, "test_patterns", c.brudnyi.test_patterns, "brudnyi");
        c.brudnyi.test_count = detail::positive_int(b, "test_count", c.brudnyi.test_count, "brudnyi");
        c.brudnyi.d = io::number_or(b, "d", c.brudnyi.d, "brudnyi");
        if (!(c.brudnyi.t > 0.0) || std::abs(c.brudnyi.x) + c.brudnyi.t > 1.0) {
            throw ConfigError("brudnyi", "the interval [x - t, x + t] must lie in [-1, 1]");
        }
        if (!(c.brudnyi.d >= 1.0)) throw ConfigError("brudnyi.d", "must be >= 1");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, {"bounds", "claims", "klimek", "capacity", "toric", "stability"}, "tolerances");
        auto rd = [&](const char* key, double& dst) {
            dst = io::number_or(t, key, dst, "tolerances");
            if (!(dst >= 0.0)) throw ConfigError(std::string("tolerances.") + key, "must be >= 0");
        };
        rd("bounds", c.tol.bounds);
        rd("claims", c.tol.claims);
        rd("klimek", c.tol.klimek);
        rd("capacity", c.tol.capacity);
        rd("toric", c.tol.toric);
        rd("stability", c.tol.stability);
    }
    c.threads = detail::positive_int(j, "threads", 0, "", 0);
    c.output = io::text_or(j, "output", c.output, "");
    return c;
}

/// Parses config text; syntax errors report line and column.
inline ExperimentConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col), msg);
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

inline Json to_json(const ExperimentConfig& c) {
    Json j;
    j["scenario"] = c.scenario;
    j["seed"] = c.seed;
    j["resolution"] = c.resolution;
    if (c.refine_resolution) j["refine_resolution"] = *c.refine_resolution;
    j["a"] = to_json(c.a);
    j["omega"] = to_json(c.omega);
    Json sets = Json::array();
    for (const auto& s : c.sets) sets.push_back(to_json(s));
    j["sets"] = sets;
    j["random_sets"] = {{"count", c.random_sets.count},
                        {"max_radius", c.random_sets.max_radius},
                        {"min_size", c.random_sets.min_size}};
    const char* method = c.solver.method == SweepMethod::Multigrid ? "multigrid"
                         : c.solver.method == SweepMethod::Jacobi  ? "jacobi"
                                                                    : "red-black";
    j["solver"] = {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}, {"method", method}};
    j["leja_k"] = c.leja_k;
    j["siciak_source"] = c.siciak == SiciakSource::Leja ? "leja" : "closed-form-when-exact";
    j["corpus"] = {{"seed", c.effective_corpus_seed()},
                   {"count", c.corpus.count},
                   {"max_degree", c.corpus.max_degree},
                   {"placement", to_string(c.corpus.placement)}};
    j["include_recipe"] = c.include_recipe;
    j["probes"] = c.probes;
    if (c.conjecture_floor) j["conjecture_floor"] = *c.conjecture_floor;
    Json products = Json::array();
    for (const auto& p : c.products) {
        Json f = Json::array();
        for (const auto& s : p.factors) f.push_back(to_json(s));
        Json pj{{"factors", f}, {"omega", to_json(p.omega)}, {"a", to_json(p.a)}};
        if (!p.label.empty()) pj["label"] = p.label;
        products.push_back(pj);
    }
    j["products"] = products;
    j["toric_resolution"] = c.toric_resolution;
    Json centers = Json::array();
    for (Complex x : c.bernstein.centers) centers.push_back(io::to_json(x));
    j["bernstein"] = {{"centers", centers}, {"t_values", c.bernstein.t_values}, {"s_points", c.bernstein.s_points}};
    j["brudnyi"] = {{"x", c.brudnyi.x},
                    {"t", c.brudnyi.t},
                    {"train_patterns", c.brudnyi.train_patterns},
                    {"test_patterns", c.brudnyi.test_patterns},
                    {"test_count", c.brudnyi.test_count},
                    {"d", c.brudnyi.d}};
    j["tolerances"] = {{"bounds", c.tol.bounds},     {"claims", c.tol.claims}, {"klimek", c.tol.klimek},
                       {"capacity", c.tol.capacity}, {"toric", c.tol.toric},   {"stability", c.tol.stability}};
    j["threads"] = c.threads;
    j["output"] = c.output;
    return j;
}

// ---------------------------------------------------------------------------
// Random sets for scans
// ---------------------------------------------------------------------------

namespace detail {

inline CompactSetSpec random_part(Rng& rng, double max_r, double min_size, bool allow_compound) {
    const int kind = rng.integer(0, allow_compound ? 4 : 2);
    // thin sets need enough grid nodes for a Leja sequence: at 256 nodes per
    // unit, k = 32 after the quarter-pool cap needs 128 nodes
    const double min_len = std::max(3.0 * min_size, 0.3);
    switch (kind) {
        case 0: {
            const double r = rng.uniform(min_size, 0.5 * max_r);
            return CompactSetSpec::disk(rng.in_disk({}, max_r - r), r);
        }
        case 1: {
            const double len = rng.uniform(std::min(min_len, 1.6 * max_r), 1.6 * max_r);
            const Complex mid = rng.in_disk({}, max_r - 0.5 * len);
            const Complex dir = std::polar(0.5 * len, std::numbers::pi * rng.uniform());
            return CompactSetSpec::segment(mid - dir, mid + dir);
        }
        case 2: {
            const double outer = rng.uniform(std::max(2.0 * min_size, 0.1), 0.5 * max_r);
            const double inner = outer * rng.uniform(0.3, 0.8);
            return CompactSetSpec::annulus(rng.in_disk({}, max_r - outer), inner, outer);
        }
        case 3: {
            const int level = rng.integer(1, 2);
            // a level-l Cantor set keeps (2/3)^l of its length
            const double hi = 1.6 * max_r;
            const double len = rng.uniform(std::min(std::max(0.56 * std::pow(1.5, level), min_len), hi), hi);
            const Complex mid = rng.in_disk({}, max_r - 0.5 * len);
            const Complex dir = std::polar(0.5 * len, std::numbers::pi * rng.uniform());
            return CompactSetSpec::cantor(mid - dir, mid + dir, level);
        }
        default: {
            std::vector<CompactSetSpec> parts;
            const int count = rng.integer(2, 3);
            for (int i = 0; i < count; ++i) parts.push_back(random_part(rng, max_r, min_size, false));
            return CompactSetSpec::set_union(std::move(parts));
        }
    }
}

}  // namespace detail

/// Seeded random planar sets inside |z| <= max_radius: disks, segments,
/// annuli, Cantor sets and unions of the first three.
inline std::vector<CompactSetSpec> random_scan_sets(const RandomSetSpec& spec, std::uint64_t seed) {
    Rng rng(seed ^ 0x5ca11ab1e5eedULL);
    std::vector<CompactSetSpec> out;
    for (int i = 0; i < spec.count; ++i) {
        auto s = detail::random_part(rng, spec.max_radius, spec.min_size, true);
        s.label = "scan" + std::to_string(i);
        out.push_back(std::move(s));
    }
    return out;
}

/// Explicit sets followed by the random ones.
inline std::vector<CompactSetSpec> experiment_sets(const ExperimentConfig& cfg) {
    std::vector<CompactSetSpec> out = cfg.sets;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].label.empty()) out[i].label = describe(out[i]);
    }
    auto rnd = random_scan_sets(cfg.random_sets, cfg.seed);
    out.insert(out.end(), rnd.begin(), rnd.end());
    return out;
}

// ---------------------------------------------------------------------------
// Worker pool
// ---------------------------------------------------------------------------

/// Runs f(0) .. f(n-1) on up to `threads` workers; f must not throw.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

struct HardCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    Table table;
    Json summary;
    std::vector<HardCheck> checks;
    std::size_t row_failures = 0;
    std::size_t row_errors = 0;

    bool hard_pass() const {
        return row_failures == 0 && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }
};

namespace detail {

using ItemFn = std::function<std::vector<Row>(std::size_t item, int resolution)>;

inline void run_items(Table& table, std::size_t n, const ExperimentConfig& cfg,
                      const std::function<std::string(std::size_t)>& label, const ItemFn& fn) {
    const auto res = cfg.resolutions();
    std::vector<std::vector<Row>> slots(n * res.size());
    parallel_for(slots.size(), cfg.threads, [&](std::size_t k) {
        const std::size_t item = k / res.size();
        const int r = res[k % res.size()];
        auto fail = [&](std::string status, std::string what) {
            Row row = table.make_row(item, label(item), r);
            row.status = std::move(status);
            row.note = std::move(what);
            slots[k] = {std::move(row)};
        };
        try {
            slots[k] = fn(item, r);
        } catch (const Error& e) {
            fail(std::string(to_string(e.kind())), e.what());
        } catch (const std::exception& e) {
            fail("internal-error", e.what());
        }
    });
    for (auto& s : slots) {
        for (auto& row : s) table.add(std::move(row));
    }
}

inline int pass_flag(bool ok) { return ok ? 1 : 0; }

inline double rel_residual(const InequalityReport& r) {
    const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
    return scale > 0 ? r.residual / scale : 0.0;
}

inline CaseOptions case_options(const ExperimentConfig& cfg) {
    CaseOptions o;
    o.solver = cfg.solver;
    o.leja_k = cfg.leja_k;
    o.siciak = cfg.siciak;
    return o;
}

inline std::optional<double> exact_capacity(const CompactSetSpec& s) {
    if (const auto* d = std::get_if<shape::Disk>(&s.shape)) return d->radius;
    if (const auto* g = std::get_if<shape::Segment>(&s.shape)) return std::abs(g->b - g->a) / 4.0;
    if (const auto* a = std::get_if<shape::Annulus>(&s.shape)) return a->outer;
    return std::nullopt;
}

// --- capacity --------------------------------------------------------------

inline void scenario_capacity(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("capacity", {
        {"k", "number of Leja points"},
        {"pool", "candidate nodes for the Leja sequence"},
        {"diameter", "diameter of the rasterized set"},
        {"gamma", "capacity from the extrapolated transfinite-diameter sequence"},
        {"gamma_spread", "relative spread of the extrapolated tail"},
        {"gamma_converged", "1 if the spread is below the 1% band"},
        {"robin", "-log gamma"},
        {"robin_field", "Robin constant fitted from sup_{|z|=s} V_E - log s"},
        {"gamma_field", "exp(-robin_field)"},
        {"field_rel_diff", "|gamma_field - gamma| / gamma"},
        {"field_monotone", "1 if sup_{|z|=s} V_E - log s is non-increasing in s"},
        {"gamma_exact", "closed-form capacity (disk radius, segment length / 4, annulus outer radius)"},
        {"gamma_rel_err", "(gamma - gamma_exact) / gamma_exact"},
    });
    const auto sets = experiment_sets(cfg);
    run_items(out.table, sets.size(), cfg, [&](std::size_t i) { return sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, sets[i].label, res);
                  auto grid = build_grid(cfg.omega, res);
                  const SetMask mask = rasterize_set(sets[i], grid);
                  const std::size_t pool = leja_pool(mask, cfg.leja_k).size();
                  const std::size_t k = leja_degree(mask, cfg.leja_k);
                  const SiciakEstimator est = make_siciak_estimator(mask, k);
                  const CapacityEstimate cap = transfinite_diameter(est.leja);
                  const Box b = est.bounds;
                  const double reach = std::max({std::abs(b.lo), std::abs(b.hi), std::abs(Complex(b.lo.real(), b.hi.imag())),
                                                 std::abs(Complex(b.hi.real(), b.lo.imag()))});
                  const double base = std::max(2.5 * est.diameter, 1.25 * reach);
                  const std::vector<double> radii{base, 1.6 * base, 3.2 * base, 6.4 * base, 12.8 * base};
                  const RobinEstimate rf = robin_from_field(est, radii);
                  t.set(row, "k", static_cast<double>(k));
                  t.set(row, "pool", static_cast<double>(pool));
                  t.set(row, "diameter", est.diameter);
                  t.set(row, "gamma", cap.gamma);
                  t.set(row, "gamma_spread", cap.spread);
                  t.set(row, "gamma_converged", cap.converged ? 1 : 0);
                  t.set(row, "robin", cap.robin);
                  t.set(row, "robin_field", rf.robin);
                  const double gf = std::exp(-rf.robin);
                  t.set(row, "gamma_field", gf);
                  t.set(row, "field_rel_diff", std::abs(gf - cap.gamma) / cap.gamma);
                  t.set(row, "field_monotone", rf.monotone ? 1 : 0);
                  if (const auto ex = exact_capacity(sets[i])) {
                      t.set(row, "gamma_exact", *ex);
                      t.set(row, "gamma_rel_err", (cap.gamma - *ex) / *ex);
                  }
                  // every planar compact set has capacity at most half its diameter
                  row.pass = pass_flag(cap.gamma > 0.0 && cap.gamma <= 0.5 * est.diameter * (1.0 + cfg.tol.capacity) &&
                                       std::abs(gf - cap.gamma) <= cfg.tol.capacity * cap.gamma && rf.monotone);
                  return std::vector<Row>{row};
              });
}

// --- extremal --------------------------------------------------------------

inline void scenario_extremal(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("extremal", {
        {"nodes", "grid nodes"},
        {"mask_nodes", "nodes of the rasterized set"},
        {"iterations", "solver iterations"},
        {"residual", "obstacle fixed-point defect sup |min(psi, mean) - u|"},
        {"converged", "1 if the residual is below the tolerance"},
        {"sup_a_u", "sup of u_{E,Omega} over A"},
        {"min_u", "minimum of u over the grid"},
        {"max_u", "maximum of u over the grid"},
        {"mask_error", "max |u + 1| over the set nodes"},
        {"mask_oscillation", "max u + 1 over free nodes next to the set"},
        {"laplacian_mass", "discrete Laplacian mass of u (condenser capacity)"},
        {"mass_exact", "2 pi / log(R / t) for a disk concentric with Omega"},
        {"closed_form_err", "sup |u - closed form| for a disk concentric with Omega"},
    });
    const auto sets = experiment_sets(cfg);
    run_items(out.table, sets.size(), cfg, [&](std::size_t i) { return sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, sets[i].label, res);
                  auto grid = build_grid(cfg.omega, res);
                  const SetMask mask = rasterize_set(sets[i], grid);
                  const ExtremalSolution u = relative_extremal(mask, cfg.omega, cfg.solver);
                  t.set(row, "nodes", static_cast<double>(grid->size()));
                  t.set(row, "mask_nodes", static_cast<double>(mask.count()));
                  t.set(row, "iterations", static_cast<double>(u.iterations));
                  t.set(row, "residual", u.residual);
                  t.set(row, "converged", u.converged ? 1 : 0);
                  t.set(row, "sup_a_u", region_sup(u, cfg.a).value);
                  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
                  t.set(row, "min_u", *lo);
                  t.set(row, "max_u", *hi);
                  t.set(row, "mask_oscillation", u.mask_oscillation);
                  double mask_err = 0.0;
                  for (std::size_t k : mask.nodes()) mask_err = std::max(mask_err, std::abs(u.values[k] + 1.0));
                  t.set(row, "mask_error", mask_err);
                  if (!u.converged) {
                      row.status = "unconverged";
                      return std::vector<Row>{row};
                  }
                  t.set(row, "laplacian_mass", laplacian_mass(u).mass);
                  const auto od = cfg.omega.as_disk();
                  const auto* d = std::get_if<shape::Disk>(&sets[i].shape);
                  if (od && d && d->center == od->center) {
                      t.set(row, "mass_exact", 2.0 * std::numbers::pi / std::log(od->radius / d->radius));
                      double err = 0.0;
                      for (std::size_t k = 0; k < grid->size(); ++k) {
                          if (grid->classify(k) == NodeClass::Exterior) continue;
                          const double r = std::abs(grid->node(k) - od->center);
                          if (r >= od->radius) continue;
                          err = std::max(err, std::abs(u.values[k] - concentric_disk_u(d->radius, od->radius, r)));
                      }
                      t.set(row, "closed_form_err", err);
                  }
                  row.pass = pass_flag(*lo >= -1.0 && *hi <= 0.0 && mask_err == 0.0);
                  return std::vector<Row>{row};
              });
}

// --- h-bounds --------------------------------------------------------------

inline void scenario_h_bounds(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("h-bounds", {
        {"sup_a_u", "sup_A u_{E,Omega}"},
        {"sup_omega_v_a", "sup_Omega V_A"},
        {"violation", "max(lower - upper) over Omega minus the mask, divided by max(upper)"},
        {"equality_indicator", "sup |upper - lower| over A minus E"},
        {"max_upper", "max of the upper field over Omega"},
        {"corpus_size", "normalized functions in the corpus"},
        {"probe_count", "probe nodes in A minus E"},
        {"emp_h_max", "max over probes of the empirical h_E"},
        {"excess_over_upper", "max over probes of (empirical h - upper) / max(upper)"},
        {"deficit_below_lower", "max over probes of (lower - empirical h) / max(upper), with the Siciak recipe in the corpus"},
        {"corpus_monotone", "1 if empirical h is non-decreasing over corpus prefixes"},
        {"iterations", "envelope solver iterations"},
        {"residual", "envelope residual"},
    });
    const auto sets = experiment_sets(cfg);
    const auto opt = case_options(cfg);
    run_items(out.table, sets.size(), cfg, [&](std::size_t i) { return sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, sets[i].label, res);
                  const ExtremalCase c = prepare_case(sets[i], cfg.a, cfg.omega, res, opt);
                  const BoundsReport b = lemma1_bounds(c);
                  t.set(row, "sup_a_u", b.sup_a_u);
                  t.set(row, "sup_omega_v_a", b.sup_omega_v_a);
                  t.set(row, "violation", b.violation);
                  t.set(row, "equality_indicator", b.equality_indicator);
                  t.set(row, "max_upper", b.max_upper);
                  t.set(row, "iterations", static_cast<double>(c.u.iterations));
                  t.set(row, "residual", c.u.residual);

                  CorpusConfig cc = cfg.corpus;
                  cc.seed = cfg.effective_corpus_seed() + i;
                  cc.e = sets[i];
                  cc.a_radius = c.a.as_disk()->radius;
                  cc.outer_radius = c.omega.as_disk()->radius;
                  const auto raw = sample_psh(cc);
                  auto corpus = normalize_corpus(raw, cfg.omega, cfg.a);
                  if (cfg.include_recipe) {
                      corpus.push_back(normalize_to_class(model_recipe(sets[i], *c.mask, cfg.leja_k), cfg.omega, cfg.a));
                  }
                  t.set(row, "corpus_size", static_cast<double>(corpus.size()));

                  const Grid& g = *c.grid;
                  const auto ad = *c.a.as_disk();
                  const long stride = std::max(1, res / 16);
                  std::vector<Complex> probes;
                  std::vector<std::size_t> probe_nodes;
                  for (std::size_t k = 0; k < g.size(); ++k) {
                      if (g.classify(k) == NodeClass::Exterior || c.mask->contains(k)) continue;
                      if ((g.column(k) + g.i_origin()) % stride != 0 || (g.row(k) + g.j_origin()) % stride != 0) continue;
                      if (std::abs(g.node(k) - ad.center) > ad.radius) continue;
                      probes.push_back(g.node(k));
                      probe_nodes.push_back(k);
                  }
                  t.set(row, "probe_count", static_cast<double>(probes.size()));
                  if (probes.empty()) throw Error(ErrorKind::EmptyRegion, "no probe nodes in A outside E");
                  const auto e_nodes = c.mask->points();
                  const auto h = empirical_h(corpus, e_nodes, probes);
                  double excess = -std::numeric_limits<double>::infinity();
                  double deficit = -std::numeric_limits<double>::infinity();
                  double hmax = -std::numeric_limits<double>::infinity();
                  for (std::size_t p = 0; p < probes.size(); ++p) {
                      hmax = std::max(hmax, h[p]);
                      excess = std::max(excess, (h[p] - b.upper[probe_nodes[p]]) / b.max_upper);
                      deficit = std::max(deficit, (b.lower[probe_nodes[p]] - h[p]) / b.max_upper);
                  }
                  t.set(row, "emp_h_max", hmax);
                  t.set(row, "excess_over_upper", excess);
                  if (cfg.include_recipe) t.set(row, "deficit_below_lower", deficit);

                  bool monotone = true;
                  std::vector<double> prev;
                  for (std::size_t size : {corpus.size() / 4, corpus.size() / 2, corpus.size()}) {
                      if (size == 0) continue;
                      const auto hp = empirical_h(std::span(corpus).first(size), e_nodes, probes);
                      for (std::size_t p = 0; p < prev.size(); ++p) monotone = monotone && hp[p] >= prev[p];
                      prev = hp;
                  }
                  t.set(row, "corpus_monotone", monotone ? 1 : 0);
                  const double tol = cfg.tol.bounds;
                  row.note = c.v->closed_form() ? "V:closed-form" : "V:leja";
                  row.pass = pass_flag(b.violation <= tol && excess <= tol && monotone &&
                                       (!cfg.include_recipe || deficit <= tol));
                  return std::vector<Row>{row};
              });
}

// --- conjecture-scan -------------------------------------------------------

inline void scenario_conjecture(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("conjecture-scan", {
        {"product", "|sup_A u_{E,Omega}| * sup_Omega V_E"},
        {"sup_a_u_abs", "|sup_A u_{E,Omega}|"},
        {"sup_omega_v", "sup_Omega V_E"},
        {"gamma", "capacity of E"},
        {"case3", "1 if E lies in the disk of radius gamma^tau_1 about the centre of A"},
        {"case3_margin", "gamma^tau_1 minus the largest distance from E to the centre of A"},
        {"closed_form", "1 if V_E is the closed disk formula, 0 for the Leja estimator"},
        {"iterations", "envelope solver iterations"},
        {"residual", "envelope residual"},
        {"grid_h", "grid spacing"},
    });
    const auto sets = experiment_sets(cfg);
    const auto opt = case_options(cfg);
    run_items(out.table, sets.size(), cfg, [&](std::size_t i) { return sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, sets[i].label, res);
                  const ExtremalCase c = prepare_case(sets[i], cfg.a, cfg.omega, res, opt);
                  const ConjectureRecord r = conjecture_quantity(c);
                  const Case3Result c3 = case3_condition(*c.mask, r.gamma, c.a.as_disk()->center, 1);
                  t.set(row, "product", r.product);
                  t.set(row, "sup_a_u_abs", r.sup_a_u_abs);
                  t.set(row, "sup_omega_v", r.sup_omega_v);
                  t.set(row, "gamma", r.gamma);
                  t.set(row, "case3", c3.holds ? 1 : 0);
                  t.set(row, "case3_margin", c3.margin);
                  t.set(row, "closed_form", c.v->closed_form() ? 1 : 0);
                  t.set(row, "iterations", static_cast<double>(r.iterations));
                  t.set(row, "residual", r.residual);
                  t.set(row, "grid_h", r.grid_h);
                  row.pass = pass_flag(r.product > 0.0);
                  return std::vector<Row>{row};
              });

    const double a = cfg.omega.as_disk()->radius / cfg.a.as_disk()->radius;
    Json fitted = Json::object();
    std::vector<double> mins;
    const std::size_t col = out.table.column("product");
    for (int res : cfg.resolutions()) {
        const Row* best = nullptr;
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& r : out.table.rows()) {
            if (r.resolution != res || r.status != "ok" || !std::isfinite(r.values[col])) continue;
            if (!best || r.values[col] < best->values[col]) best = &r;
            hi = std::max(hi, r.values[col]);
        }
        const std::string key = std::to_string(res);
        if (!best) {
            out.checks.push_back({"min product positive at " + key, false, "no set evaluated"});
            continue;
        }
        const double floor = best->values[col];
        mins.push_back(floor);
        fitted[key] = {{"min_product", floor},
                       {"max_product", hi},
                       {"argmin_label", best->label},
                       {"argmin_set", to_json(sets[best->item])},
                       {"corollary_constant", floor > 0 ? Json(corollary_constant(floor, a)) : Json(nullptr)},
                       {"log_a", std::log(a)}};
        out.checks.push_back({"min product positive at " + key, floor > 0.0, format_number(floor)});
    }
    if (mins.size() == 2) {
        fitted["min_product_relative_change"] = std::abs(mins[1] - mins[0]) / std::max(mins[0], mins[1]);
    }
    out.summary["fitted"] = fitted;
}

// --- claims ----------------------------------------------------------------

inline std::vector<domain::Disk> klimek_probes(const DomainSpec& omega, int count, std::uint64_t seed) {
    const auto od = *omega.as_disk();
    Rng rng(seed);
    std::vector<domain::Disk> out;
    for (int p = 0; p < count; ++p) {
        const double r = od.radius * rng.uniform(0.05, 0.3);
        out.push_back({od.center + rng.in_disk({}, 0.95 * od.radius - r) , r});
    }
    return out;
}

inline void scenario_claims(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("claims", {
        {"gamma", "capacity of E"},
        {"sup_a_v", "sup_A V_E"},
        {"claim1_lower_lhs", "log(1/gamma)"},
        {"claim1_lower_rel", "(sup_A V_E - log(1/gamma)) / max of the two sides"},
        {"claim1_upper_rhs", "2 e^2 n log(n/gamma)"},
        {"claim1_upper_rel", "(2 e^2 n log(n/gamma) - sup_A V_E) / max of the two sides"},
        {"claim2_lhs", "sup_A u + 1"},
        {"claim2_rhs", "2 sup_A V_E / sup_Omega V_E"},
        {"claim2_rel", "(rhs - lhs) / max of the two sides"},
        {"klimek_probes", "probe disks evaluated"},
        {"klimek_pass", "probe disks where the Klimek bound holds within tolerance"},
        {"klimek_skipped", "probe disks skipped because inf V on the boundary of Omega is tiny"},
        {"klimek_worst_rel", "smallest relative residual of the Klimek bound over the probes"},
        {"cap", "Laplacian mass of u (relative capacity)"},
        {"at_product", "sup_A V_E * cap, the Alexander-Taylor constant of the set"},
        {"cap_ratio", "cap / |sup_A u|"},
        {"corollary_lower_pass", "1 if the lower corollary bracket holds (needs conjecture_floor)"},
        {"corollary_upper_pass", "1 if the upper corollary bracket holds (needs conjecture_floor)"},
    });
    const auto sets = experiment_sets(cfg);
    const auto opt = case_options(cfg);
    run_items(out.table, sets.size(), cfg, [&](std::size_t i) { return sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, sets[i].label, res);
                  const ExtremalCase c = prepare_case(sets[i], cfg.a, cfg.omega, res, opt);
                  const Claim1Report c1 = claim1_check(c, cfg.tol.claims);
                  const InequalityReport c2 = claim2_check(c, cfg.tol.claims);
                  bool ok = true;
                  t.set(row, "gamma", c.gamma());
                  t.set(row, "sup_a_v", c.sup_a_v);
                  if (!c1.lower.skipped) {
                      t.set(row, "claim1_lower_lhs", c1.lower.lhs);
                      t.set(row, "claim1_lower_rel", rel_residual(c1.lower));
                      t.set(row, "claim1_upper_rhs", c1.upper.rhs);
                      t.set(row, "claim1_upper_rel", rel_residual(c1.upper));
                      ok = ok && c1.lower.pass && c1.upper.pass;
                  }
                  t.set(row, "claim2_lhs", c2.lhs);
                  t.set(row, "claim2_rhs", c2.rhs);
                  t.set(row, "claim2_rel", rel_residual(c2));
                  ok = ok && c2.pass;

                  int passed = 0, skipped = 0;
                  double worst = std::numeric_limits<double>::infinity();
                  const auto probes = klimek_probes(cfg.omega, cfg.probes, cfg.seed * 7919 + i);
                  for (const auto& p : probes) {
                      const auto k = klimek_check(c, p, cfg.tol.klimek);
                      if (k.skipped) {
                          ++skipped;
                          continue;
                      }
                      passed += k.pass ? 1 : 0;
                      worst = std::min(worst, rel_residual(k));
                  }
                  t.set(row, "klimek_probes", static_cast<double>(probes.size()));
                  t.set(row, "klimek_pass", passed);
                  t.set(row, "klimek_skipped", skipped);
                  if (std::isfinite(worst)) t.set(row, "klimek_worst_rel", worst);
                  ok = ok && passed + skipped == static_cast<int>(probes.size());

                  const CapacityRecord cr = capacity_record(c);
                  t.set(row, "cap", cr.cap);
                  t.set(row, "at_product", cr.product);
                  t.set(row, "cap_ratio", cr.cap_ratio);
                  if (cfg.conjecture_floor && !c1.lower.skipped) {
                      const auto cor = corollary2_bounds(c, cfg.conjecture_floor, cfg.tol.claims);
                      t.set(row, "corollary_lower_pass", cor.lower.pass ? 1 : 0);
                      t.set(row, "corollary_upper_pass", cor.upper.pass ? 1 : 0);
                      ok = ok && cor.pass;
                  }
                  row.note = c.v->closed_form() ? "V:closed-form" : "V:leja";
                  if (c1.lower.skipped) row.note += "; claim1_check skipped: " + c1.lower.note;
                  row.pass = pass_flag(ok);
                  return std::vector<Row>{row};
              });

    Json fitted = Json::object();
    for (int res : cfg.resolutions()) {
        std::vector<CapacityRecord> recs;
        for (const auto& r : out.table.rows()) {
            if (r.resolution != res || r.status != "ok") continue;
            CapacityRecord cr;
            cr.label = r.label;
            cr.sup_a_v = out.table.get(r, "sup_a_v");
            cr.cap = out.table.get(r, "cap");
            cr.product = out.table.get(r, "at_product");
            if (std::isfinite(cr.product)) recs.push_back(cr);
        }
        if (recs.empty()) continue;
        const auto f = fit_alexander_taylor(recs);
        fitted[std::to_string(res)] = {{"alexander_taylor_c_lower", f.c_lower},
                                       {"alexander_taylor_c_upper", f.c_upper},
                                       {"records", f.records}};
    }
    out.summary["fitted"] = fitted;
}

// --- bernstein -------------------------------------------------------------

inline void scenario_bernstein(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("bernstein", {
        {"x_re", "centre x, real part"},
        {"x_im", "centre x, imaginary part"},
        {"t", "inner radius"},
        {"s_max", "largest dilation factor, (1 - |x|) / t"},
        {"c_hat", "corpus-wide max of (sup_{B(x,st)} f - sup_{B(x,t)} f) / log s"},
        {"c_hat_doubled", "the same over a corpus twice as large"},
        {"rel_change", "|c_hat_doubled - c_hat| / c_hat_doubled"},
        {"argmax_function", "index of the maximizing function in the doubled corpus"},
        {"argmax_s", "maximizing dilation factor in the doubled corpus"},
        {"finite", "1 if the ratio maximum is finite"},
        {"corpus_size", "normalized functions in the smaller corpus, anchors included"},
        {"c_hat_sampled", "c_hat over the sampled functions of the doubled corpus alone, without anchors"},
    });
    CorpusConfig cc = cfg.corpus;
    cc.seed = cfg.effective_corpus_seed();
    cc.a_radius = cfg.a.as_disk() ? cfg.a.as_disk()->radius : 1.0;
    cc.outer_radius = cfg.omega.as_disk() ? cfg.omega.as_disk()->radius : 2.0;
    cc.count = 2 * cfg.corpus.count;
    const auto& bs = cfg.bernstein;
    // the ratio is driven by roots close to x, so inside-E roots go to the inner balls
    if (!cc.e) {
        const double t_max = *std::max_element(bs.t_values.begin(), bs.t_values.end());
        std::vector<CompactSetSpec> balls;
        for (Complex x : bs.centers) balls.push_back(CompactSetSpec::disk(x, t_max));
        cc.e = balls.size() == 1 ? balls[0] : CompactSetSpec::set_union(std::move(balls));
    }
    const auto raw = sample_psh(cc);
    // log|z - x| for every centre leads both corpora; it attains the single-root maximum
    std::vector<PshFunctionSpec> anchors;
    for (Complex x : bs.centers) anchors.push_back(log_poly({x}, 1.0, "anchor"));
    auto with_anchors = [&](std::span<const PshFunctionSpec> sampled) {
        std::vector<PshFunctionSpec> all = anchors;
        all.insert(all.end(), sampled.begin(), sampled.end());
        return normalize_corpus(all, cfg.omega, cfg.a);
    };
    const auto half = with_anchors(std::span(raw).first(raw.size() / 2));
    const auto full = with_anchors(raw);
    const auto sampled = normalize_corpus(raw, cfg.omega, cfg.a);
    const std::size_t n = bs.centers.size() * bs.t_values.size();
    auto label = [&](std::size_t i) {
        const Complex x = bs.centers[i / bs.t_values.size()];
        return "x=" + format_number(x.real()) + (x.imag() < 0 ? "" : "+") + format_number(x.imag()) +
               "i,t=" + format_number(bs.t_values[i % bs.t_values.size()]);
    };
    run_items(out.table, n, cfg, label, [&](std::size_t i, int res) {
        const Table& t = out.table;
        Row row = t.make_row(i, label(i), res);
        const Complex x = bs.centers[i / bs.t_values.size()];
        const double tt = bs.t_values[i % bs.t_values.size()];
        const double s_max = (1.0 - std::abs(x)) / tt;
        std::vector<double> s_grid;
        for (int k = 1; k <= bs.s_points; ++k) s_grid.push_back(std::pow(s_max, static_cast<double>(k) / bs.s_points));
        const auto small = bernstein_check(half, x, tt, s_grid);
        const auto big = bernstein_check(full, x, tt, s_grid);
        const auto only_sampled = bernstein_check(sampled, x, tt, s_grid);
        t.set(row, "x_re", x.real());
        t.set(row, "x_im", x.imag());
        t.set(row, "t", tt);
        t.set(row, "s_max", s_max);
        t.set(row, "c_hat", small.c_hat);
        t.set(row, "c_hat_doubled", big.c_hat);
        const double rel = std::abs(big.c_hat - small.c_hat) / std::abs(big.c_hat);
        t.set(row, "rel_change", rel);
        t.set(row, "argmax_function", static_cast<double>(big.argmax_function));
        t.set(row, "argmax_s", big.argmax_s);
        t.set(row, "finite", small.finite && big.finite ? 1 : 0);
        t.set(row, "corpus_size", static_cast<double>(half.size()));
        t.set(row, "c_hat_sampled", only_sampled.c_hat);
        row.pass = pass_flag(small.finite && big.finite && rel <= cfg.tol.stability);
        return std::vector<Row>{row};
    });
}

// --- brudnyi ---------------------------------------------------------------

inline void scenario_brudnyi(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("brudnyi", {
        {"measure", "length of the held-out subset E"},
        {"log_ratio", "log(d |B| / |E|)"},
        {"pairs", "held-out functions checked on this subset"},
        {"violations", "functions with sup_B f > c log(d |B| / |E|) + sup_E f"},
        {"worst_margin", "smallest rhs - lhs over the held-out functions"},
    });
    const auto& bs = cfg.brudnyi;
    const std::uint64_t seed = cfg.effective_corpus_seed();
    CorpusConfig cc = cfg.corpus;
    cc.seed = seed;
    cc.a_radius = cfg.a.as_disk() ? cfg.a.as_disk()->radius : 1.0;
    cc.outer_radius = cfg.omega.as_disk() ? cfg.omega.as_disk()->radius : 2.0;
    const auto train = normalize_corpus(sample_psh(cc), cfg.omega, cfg.a);
    const auto train_sets = brudnyi_patterns(bs.x, bs.t, bs.train_patterns, seed + 1);
    const BrudnyiFit fit = brudnyi_fit(train, bs.x, bs.t, train_sets);
    cc.seed = seed + 2;
    cc.count = bs.test_count;
    const auto test = normalize_corpus(sample_psh(cc), cfg.omega, cfg.a);
    const auto test_sets = brudnyi_patterns(bs.x, bs.t, bs.test_patterns, seed + 3);
    run_items(out.table, test_sets.size(), cfg, [&](std::size_t i) { return test_sets[i].label; },
              [&](std::size_t i, int res) {
                  const Table& t = out.table;
                  Row row = t.make_row(i, test_sets[i].label, res);
                  const auto v = brudnyi_check(test, bs.x, bs.t, std::span(test_sets).subspan(i, 1), fit.c_hat, bs.d);
                  const double m = measure_1d(test_sets[i]);
                  t.set(row, "measure", m);
                  t.set(row, "log_ratio", std::log(bs.d * 2.0 * bs.t / m));
                  t.set(row, "pairs", static_cast<double>(v.pairs));
                  t.set(row, "violations", static_cast<double>(v.violations));
                  t.set(row, "worst_margin", v.worst_margin);
                  row.pass = pass_flag(v.violations == 0);
                  return std::vector<Row>{row};
              });
    out.summary["fitted"] = {{"c_hat", fit.c_hat},
                             {"d_hat", bs.d},
                             {"train_pairs", fit.pairs},
                             {"train_functions", train.size()},
                             {"test_functions", test.size()}};
}

// --- product-case ----------------------------------------------------------

inline std::optional<RadiusInterval> toric_interval(const CompactSetSpec& s) {
    // a disk and the annulus between half its radius and its radius have the
    // same envelope on a polydisk centred at the origin
    if (const auto* d = std::get_if<shape::Disk>(&s.shape); d && d->center == Complex{}) {
        return RadiusInterval{0.5 * d->radius, d->radius};
    }
    if (const auto* a = std::get_if<shape::Annulus>(&s.shape); a && a->center == Complex{}) {
        return RadiusInterval{a->inner, a->outer};
    }
    return std::nullopt;
}

inline void scenario_product(const ExperimentConfig& cfg, RunResult& out) {
    out.table = Table("product-case", {
        {"n", "number of factors"},
        {"r", "radius of the intermediate polydisk D(0,r)^n"},
        {"exact", "1 if Omega is the polydisk itself"},
        {"product", "|sup_A u| * sup_Omega V_E from the factor composition"},
        {"sup_a_u_abs", "min over factors of |sup_A u_j|"},
        {"sup_omega_v", "max over factors of sup V_j"},
        {"gamma", "min over factors of gamma_j"},
        {"gamma_min_radius", "smallest factor radius when every factor is a disk"},
        {"gamma_error", "|gamma - gamma_min_radius|"},
        {"toric_error", "sup |u_toric - max_j u_j closed form| over sampled moduli"},
        {"toric_iterations", "toric solver sweeps"},
        {"toric_converged", "1 if the toric solver met its tolerance"},
    });
    std::vector<ProductCaseSpec> items = cfg.products;
    if (items.empty()) {
        items.push_back({{CompactSetSpec::disk({}, 0.3), CompactSetSpec::disk({}, 0.3)},
                         DomainSpec::polydisk(2, 2.0),
                         DomainSpec::polydisk(2, 1.0),
                         "disk(0,0.3)^2"});
    }
    auto label = [&](std::size_t i) {
        if (!items[i].label.empty()) return items[i].label;
        std::string l;
        for (const auto& f : items[i].factors) l += (l.empty() ? "" : " x ") + describe(f);
        return l;
    };
    const auto opt = case_options(cfg);
    run_items(out.table, items.size(), cfg, label, [&](std::size_t i, int res) {
        const Table& t = out.table;
        const auto& pc = items[i];
        Row row = t.make_row(i, label(i), res);
        const ProductRecord pr = product_compose(pc.factors, pc.omega, pc.a, res, opt);
        t.set(row, "n", static_cast<double>(pc.factors.size()));
        t.set(row, "r", pr.r);
        t.set(row, "exact", pr.exact ? 1 : 0);
        t.set(row, "product", pr.record.product);
        t.set(row, "sup_a_u_abs", pr.record.sup_a_u_abs);
        t.set(row, "sup_omega_v", pr.record.sup_omega_v);
        t.set(row, "gamma", pr.record.gamma);
        bool ok = pr.record.product > 0.0;
        bool all_disks = true;
        double min_r = std::numeric_limits<double>::infinity();
        for (const auto& f : pc.factors) {
            const auto* d = std::get_if<shape::Disk>(&f.shape);
            all_disks = all_disks && d;
            if (d) min_r = std::min(min_r, d->radius);
        }
        if (all_disks && cfg.siciak == SiciakSource::ClosedFormWhenExact) {
            t.set(row, "gamma_min_radius", min_r);
            t.set(row, "gamma_error", std::abs(pr.record.gamma - min_r));
            ok = ok && pr.record.gamma == min_r;
        }
        const auto* pd = std::get_if<domain::Polydisk>(&pc.omega.shape);
        if (pc.factors.size() == 2 && pd) {
            const auto i0 = toric_interval(pc.factors[0]);
            const auto i1 = toric_interval(pc.factors[1]);
            if (i0 && i1 && pd->centers[0] == Complex{} && pd->centers[1] == Complex{}) {
                const int tres = cfg.toric_resolution > 0 ? cfg.toric_resolution : std::max(64, res / 4);
                const auto ts = toric_relative_extremal({*i0, *i1}, pc.omega, tres);
                double err = 0.0;
                constexpr int samples = 41;
                for (int a = 0; a < samples; ++a) {
                    for (int b = 0; b < samples; ++b) {
                        const double r1 = 0.98 * pd->radii[0] * a / (samples - 1);
                        const double r2 = 0.98 * pd->radii[1] * b / (samples - 1);
                        const double exact = std::max(concentric_disk_u(i0->hi, pd->radii[0], r1),
                                                      concentric_disk_u(i1->hi, pd->radii[1], r2));
                        err = std::max(err, std::abs(toric_value(ts, r1, r2) - exact));
                    }
                }
                t.set(row, "toric_error", err);
                t.set(row, "toric_iterations", static_cast<double>(ts.iterations));
                t.set(row, "toric_converged", ts.converged ? 1 : 0);
                ok = ok && err <= cfg.tol.toric;
            }
        }
        row.pass = pass_flag(ok);
        return std::vector<Row>{row};
    });
}

}  // namespace detail

/// Executes the configured scenario and assembles rows and summary.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult out;
    out.summary = Json::object();
    if (cfg.scenario == "capacity") detail::scenario_capacity(cfg, out);
    else if (cfg.scenario == "extremal") detail::scenario_extremal(cfg, out);
    else if (cfg.scenario == "h-bounds") detail::scenario_h_bounds(cfg, out);
    else if (cfg.scenario == "conjecture-scan") detail::scenario_conjecture(cfg, out);
    else if (cfg.scenario == "claims") detail::scenario_claims(cfg, out);
    else if (cfg.scenario == "bernstein") detail::scenario_bernstein(cfg, out);
    else if (cfg.scenario == "brudnyi") detail::scenario_brudnyi(cfg, out);
    else if (cfg.scenario == "product-case") detail::scenario_product(cfg, out);
    else throw ConfigError("scenario", "unknown scenario '" + cfg.scenario + "'");

    for (const auto& r : out.table.rows()) {
        if (r.pass == 0) ++out.row_failures;
        if (r.status != "ok") ++out.row_errors;
    }
    const auto res = cfg.resolutions();
    Json s;
    s["scenario"] = cfg.scenario;
    s["seed"] = cfg.seed;
    s["resolutions"] = res;
    s["rows"] = out.table.rows().size();
    s["row_failures"] = out.row_failures;
    s["row_errors"] = out.row_errors;
    s["columns"] = column_docs(out.table);
    Json stats = Json::object();
    for (int r : res) stats[std::to_string(r)] = column_stats(out.table, r);
    s["stats"] = stats;
    if (res.size() == 2) {
        s["refinement"] = {{"from", res[0]}, {"to", res[1]}, {"columns", refinement_changes(out.table, res[0], res[1])}};
    }
    s["fitted"] = out.summary.contains("fitted") ? out.summary["fitted"] : Json::object();
    Json checks = Json::array();
    for (const auto& c : out.checks) checks.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    s["hard_checks"] = checks;
    s["pass"] = out.hard_pass();
    s["config"] = to_json(cfg);
    out.summary = std::move(s);
    return out;
}

/// Writes <prefix>.csv and <prefix>.summary.json.
inline void write_outputs(const RunResult& r, const std::string& prefix) {
    write_text(prefix + ".csv", to_csv(r.table));
    write_text(prefix + ".summary.json", r.summary.dump(2) + "\n");
}

}  // namespace pshlab
