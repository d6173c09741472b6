#pragma once

// Normalized subharmonic test functions built from logs of polynomial
// moduli, and the empirical campaigns that run over them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pshlab/error.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/siciak.hpp"

namespace pshlab {

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// mt19937_64 with a fixed double conversion, so corpora do not depend on
/// the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Integer in [lo, hi].
    int integer(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }
    /// Uniform point in the disk (c, r).
    Complex in_disk(Complex c, double r) {
        const double rho = r * std::sqrt(uniform());
        return c + std::polar(rho, 2.0 * std::numbers::pi * uniform());
    }
    std::uint64_t next() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

/// Uniform-ish point of a planar set (area for 2D parts, length for thin parts).
inline Complex sample_in_set(const CompactSetSpec& spec, Rng& rng) {
    return std::visit(
        [&](const auto& s) -> Complex {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                return rng.in_disk(s.center, s.radius);
            } else if constexpr (std::is_same_v<T, shape::Segment>) {
                return s.a + rng.uniform() * (s.b - s.a);
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                const double r = std::sqrt(rng.uniform(s.inner * s.inner, s.outer * s.outer));
                return s.center + std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                const auto segs = cantor_segments(s.a, s.b, s.level);
                const auto& [p, q] = segs[static_cast<std::size_t>(rng.integer(0, static_cast<int>(segs.size()) - 1))];
                return p + rng.uniform() * (q - p);
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                std::vector<std::size_t> on;
                for (std::size_t i = 0; i < s.bits.size(); ++i) {
                    if (s.bits[i]) on.push_back(i);
                }
                if (on.empty()) throw Error(ErrorKind::EmptySet, "raster has no pixels");
                const std::size_t i = on[static_cast<std::size_t>(rng.integer(0, static_cast<int>(on.size()) - 1))];
                const double x = static_cast<double>(i % static_cast<std::size_t>(s.width)) + rng.uniform();
                const double y = static_cast<double>(i / static_cast<std::size_t>(s.width)) + rng.uniform();
                return s.origin + s.pixel * Complex(x, y);
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                return sample_in_set(s.parts[static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.parts.size()) - 1))],
                                     rng);
            } else {
                throw Error(ErrorKind::UnsupportedSet, "cannot sample a product set in the plane");
            }
        },
        spec.shape);
}

// ---------------------------------------------------------------------------
// Function recipes
// ---------------------------------------------------------------------------

enum class FunctionClass { Raw, Fr, Ra };

struct PshFunctionSpec;

namespace recipe {
/// scale * log|prod (z - root)|
struct LogPoly {
    std::vector<Complex> roots;
    double scale = 1.0;
};
struct Max {
    std::vector<PshFunctionSpec> children;
};
struct Shifted {
    std::shared_ptr<const PshFunctionSpec> child;
    double constant = 0.0;
};
}  // namespace recipe

/// f(z) = multiplier * recipe(z) + offset, multiplier > 0.
struct PshFunctionSpec {
    std::variant<recipe::LogPoly, recipe::Max, recipe::Shifted> recipe;
    double multiplier = 1.0;
    double offset = 0.0;
    FunctionClass tag = FunctionClass::Raw;
    /// r for F_r, a for R_a
    double class_parameter = 0.0;
    std::optional<double> sup_omega;
    std::optional<double> sup_a;
    std::string label;
};

inline double evaluate(const PshFunctionSpec& f, Complex z) {
    const double base = std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, recipe::LogPoly>) {
                double s = 0.0;
                for (Complex root : r.roots) s += std::log(std::abs(z - root));
                return r.scale * s;
            } else if constexpr (std::is_same_v<T, recipe::Max>) {
                double m = -std::numeric_limits<double>::infinity();
                for (const auto& c : r.children) m = std::max(m, evaluate(c, z));
                return m;
            } else {
                return evaluate(*r.child, z) + r.constant;
            }
        },
        f.recipe);
    return f.multiplier * base + f.offset;
}

inline PshFunctionSpec log_poly(std::vector<Complex> roots, double scale, std::string label = {}) {
    PshFunctionSpec f;
    f.recipe = recipe::LogPoly{std::move(roots), scale};
    f.label = std::move(label);
    return f;
}

inline PshFunctionSpec max_of(std::vector<PshFunctionSpec> children, std::string label = {}) {
    PshFunctionSpec f;
    f.recipe = recipe::Max{std::move(children)};
    f.label = std::move(label);
    return f;
}

inline PshFunctionSpec shifted(PshFunctionSpec child, double constant, std::string label = {}) {
    PshFunctionSpec f;
    f.recipe = recipe::Shifted{std::make_shared<const PshFunctionSpec>(std::move(child)), constant};
    f.label = std::move(label);
    return f;
}

/// Normalized Leja polynomial: (1/k) log|omega_k| - (1/k) log||omega_k||_E.
inline PshFunctionSpec leja_recipe(const SiciakEstimator& est) {
    const double k = static_cast<double>(est.degree());
    PshFunctionSpec f = log_poly(est.leja.points, 1.0 / k, "leja-estimator");
    f.offset = -est.log_sup_norm.back() / k;
    return f;
}

inline constexpr std::size_t kSegmentRecipePool = 4096;

/// A recipe that reproduces the Siciak model of E as closely as the recipe
/// family allows: exact for a disk (or an annulus through its outer disk),
/// Leja points on a dense sampling of the true segment for a segment, and the
/// grid estimator otherwise.
inline PshFunctionSpec model_recipe(const CompactSetSpec& spec, const SetMask& mask, std::size_t k) {
    if (const auto* d = std::get_if<shape::Disk>(&spec.shape)) {
        PshFunctionSpec f = log_poly({d->center}, 1.0, "siciak-disk");
        f.offset = -std::log(d->radius);
        return f;
    }
    if (const auto* r = std::get_if<shape::Annulus>(&spec.shape)) {
        PshFunctionSpec f = log_poly({r->center}, 1.0, "siciak-disk");
        f.offset = -std::log(r->outer);
        return f;
    }
    if (const auto* s = std::get_if<shape::Segment>(&spec.shape)) {
        std::vector<Complex> pool(kSegmentRecipePool);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            pool[i] = s->a + (s->b - s->a) * (static_cast<double>(i) / static_cast<double>(pool.size() - 1));
        }
        const auto est = make_siciak_estimator(leja_points(pool, std::min(k, pool.size() / 4)), pool);
        return leja_recipe(est);
    }
    return leja_recipe(make_siciak_estimator(mask, leja_degree(mask, k)));
}

// ---------------------------------------------------------------------------
// Suprema
// ---------------------------------------------------------------------------

namespace detail {
/// Golden-section refinement of a sampled maximum of g on [lo, hi].
template <class G>
double refine_max(G&& g, double lo, double hi, double best) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int i = 0; i < 40; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = g(x1);
        }
    }
    return std::max({best, f1, f2});
}
}  // namespace detail

/// sup of f over the closed disk (c, r); f is subharmonic, so the circle
/// carries it. 512 samples, then a local refinement around the best one.
inline double disk_sup(const PshFunctionSpec& f, Complex c, double r) {
    auto g = [&](double th) { return evaluate(f, c + std::polar(r, th)); };
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int i = 0; i < kCircleSamples; ++i) {
        const double v = g(2.0 * std::numbers::pi * i / kCircleSamples);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    const double step = 2.0 * std::numbers::pi / kCircleSamples;
    const double th = arg * step;
    return detail::refine_max(g, th - step, th + step, best);
}

/// sup of f over the real interval [lo, hi].
inline double interval_sup(const PshFunctionSpec& f, double lo, double hi) {
    auto g = [&](double x) { return evaluate(f, Complex(x, 0.0)); };
    const int n = std::max(257, static_cast<int>(std::ceil((hi - lo) * 2048.0)) + 1);
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int i = 0; i < n; ++i) {
        const double v = g(lo + (hi - lo) * i / (n - 1));
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    const double step = (hi - lo) / (n - 1);
    const double x = lo + arg * step;
    return detail::refine_max(g, std::max(lo, x - step), std::min(hi, x + step), best);
}

inline double intervals_sup(const PshFunctionSpec& f, std::span<const std::pair<double, double>> iv) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : iv) best = std::max(best, interval_sup(f, lo, hi));
    return best;
}

inline double domain_sup(const PshFunctionSpec& f, const DomainSpec& d) {
    const auto disk = d.as_disk();
    if (!disk) throw Error(ErrorKind::InvalidDomain, "function suprema are taken over planar disks");
    return disk_sup(f, disk->center, disk->radius);
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

enum class RootPlacement { InsideE, InsideA, Annular, Mixed };

struct CorpusConfig {
    std::uint64_t seed = 1;
    int count = 16;
    int max_degree = 4;
    RootPlacement placement = RootPlacement::Mixed;
    /// E for inside-E placement
    std::optional<CompactSetSpec> e;
    /// radius of A (roots for inside-A land in |z| <= a_radius)
    double a_radius = 1.0;
    /// outer radius of the annular zone a_radius <= |z| <= outer_radius
    double outer_radius = 2.0;
};

namespace detail {
inline Complex place_root(RootPlacement p, const CorpusConfig& cfg, Rng& rng) {
    switch (p) {
        case RootPlacement::InsideE:
            if (!cfg.e) throw Error(ErrorKind::InvalidConfig, "inside-E placement needs a set");
            return sample_in_set(*cfg.e, rng);
        case RootPlacement::InsideA:
            return rng.in_disk({}, cfg.a_radius);
        case RootPlacement::Annular: {
            const double r = rng.uniform(cfg.a_radius, cfg.outer_radius);
            return std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
        }
        case RootPlacement::Mixed:
            break;
    }
    const int choices = cfg.e ? 3 : 2;
    const int pick = rng.integer(0, choices - 1);
    const RootPlacement sub = pick == 0 ? RootPlacement::InsideA
                              : pick == 1 ? RootPlacement::Annular
                                          : RootPlacement::InsideE;
    return place_root(sub, cfg, rng);
}

inline PshFunctionSpec random_log_poly(const CorpusConfig& cfg, Rng& rng) {
    const int degree = rng.integer(1, cfg.max_degree);
    // mixed placement picks one zone per function so that inside-E functions
    // keep all their roots near E
    RootPlacement zone = cfg.placement;
    if (zone == RootPlacement::Mixed) {
        const int choices = cfg.e ? 3 : 2;
        const int pick = rng.integer(0, choices - 1);
        zone = pick == 0 ? RootPlacement::InsideA : pick == 1 ? RootPlacement::Annular : RootPlacement::InsideE;
    }
    std::vector<Complex> roots;
    for (int i = 0; i < degree; ++i) roots.push_back(place_root(zone, cfg, rng));
    return log_poly(std::move(roots), rng.uniform(0.5, 2.0));
}
}  // namespace detail

/// Deterministic corpus: mostly single log-polynomials, with some maxima of
/// two and some constant shifts.
inline std::vector<PshFunctionSpec> sample_psh(const CorpusConfig& cfg) {
    if (cfg.count < 1) throw Error(ErrorKind::InvalidConfig, "corpus count must be >= 1");
    if (cfg.max_degree < 1) throw Error(ErrorKind::InvalidConfig, "max degree must be >= 1");
    Rng rng(cfg.seed);
    std::vector<PshFunctionSpec> out;
    out.reserve(static_cast<std::size_t>(cfg.count));
    for (int i = 0; i < cfg.count; ++i) {
        const double kind = rng.uniform();
        PshFunctionSpec f;
        if (kind < 0.2) {
            f = max_of({detail::random_log_poly(cfg, rng), detail::random_log_poly(cfg, rng)});
        } else if (kind < 0.35) {
            f = shifted(detail::random_log_poly(cfg, rng), rng.uniform(-1.0, 1.0));
        } else {
            f = detail::random_log_poly(cfg, rng);
        }
        f.label = "f" + std::to_string(i);
        out.push_back(std::move(f));
    }
    return out;
}

inline constexpr double kNearConstant = 1e-9;

/// g = (f - sup_Omega f) / (sup_Omega f - sup_A f): sup_Omega g = 0, sup_A g = -1.
inline PshFunctionSpec normalize_to_class(const PshFunctionSpec& f, const DomainSpec& omega, const DomainSpec& a,
                                          FunctionClass cls = FunctionClass::Ra) {
    const double so = domain_sup(f, omega);
    const double sa = domain_sup(f, a);
    const double d = so - sa;
    if (!(d >= kNearConstant) || !std::isfinite(d)) {
        throw Error(ErrorKind::NearConstant, "sup over Omega minus sup over A is " + std::to_string(d));
    }
    PshFunctionSpec g = f;
    g.multiplier = f.multiplier / d;
    g.offset = (f.offset - so) / d;
    g.tag = cls;
    g.class_parameter = omega.as_disk()->radius / a.as_disk()->radius;
    g.sup_omega = 0.0;
    g.sup_a = -1.0;
    return g;
}

/// Normalizes every function that is not near-constant; the others are dropped.
inline std::vector<PshFunctionSpec> normalize_corpus(std::span<const PshFunctionSpec> raw, const DomainSpec& omega,
                                                     const DomainSpec& a, FunctionClass cls = FunctionClass::Ra) {
    std::vector<PshFunctionSpec> out;
    for (const auto& f : raw) {
        try {
            out.push_back(normalize_to_class(f, omega, a, cls));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NearConstant) throw;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Empirical h_E
// ---------------------------------------------------------------------------

/// max over the corpus of f(z) - sup_E f at each probe, with sup_E taken over
/// the given nodes of E. Every entry is a lower bound for h_E.
inline std::vector<double> empirical_h(std::span<const PshFunctionSpec> corpus, std::span<const Complex> e_nodes,
                                       std::span<const Complex> probes) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus is empty");
    if (e_nodes.empty()) throw Error(ErrorKind::EmptySet, "E has no nodes");
    std::vector<double> h(probes.size(), -std::numeric_limits<double>::infinity());
    for (const auto& f : corpus) {
        double se = -std::numeric_limits<double>::infinity();
        for (Complex z : e_nodes) se = std::max(se, evaluate(f, z));
        for (std::size_t i = 0; i < probes.size(); ++i) h[i] = std::max(h[i], evaluate(f, probes[i]) - se);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Bernstein doubling campaign
// ---------------------------------------------------------------------------

struct BernsteinReport {
    /// corpus-wide max of (sup_{B(x,st)} f - sup_{B(x,t)} f) / log s
    double c_hat = -std::numeric_limits<double>::infinity();
    std::size_t argmax_function = 0;
    double argmax_s = 0.0;
    std::size_t ratios = 0;
    bool finite = false;
    std::vector<double> per_function;
};

/// The disks B(x, s t), s in the grid, must sit in the unit disk.
inline BernsteinReport bernstein_check(std::span<const PshFunctionSpec> corpus, Complex x, double t,
                                       std::span<const double> s_grid) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus is empty");
    if (!(t > 0.0) || s_grid.empty()) throw Error(ErrorKind::Geometry, "need t > 0 and a non-empty s grid");
    const double s_max = *std::max_element(s_grid.begin(), s_grid.end());
    for (double s : s_grid) {
        if (s < 1.0) throw Error(ErrorKind::Geometry, "s values must be >= 1");
    }
    if (std::abs(x) + s_max * t > 1.0 + 1e-12) {
        throw Error(ErrorKind::Geometry, "B(x, a t) is not inside the unit disk");
    }
    BernsteinReport r;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const double base = disk_sup(corpus[i], x, t);
        double worst = -std::numeric_limits<double>::infinity();
        for (double s : s_grid) {
            if (s <= 1.0) continue;  // log s = 0: the inequality is vacuous
            const double ratio = (disk_sup(corpus[i], x, s * t) - base) / std::log(s);
            ++r.ratios;
            worst = std::max(worst, ratio);
            if (ratio > r.c_hat) {
                r.c_hat = ratio;
                r.argmax_function = i;
                r.argmax_s = s;
            }
        }
        r.per_function.push_back(worst);
    }
    r.finite = r.ratios > 0 && std::isfinite(r.c_hat);
    return r;
}

// ---------------------------------------------------------------------------
// Brudnyi campaign (n = 1)
// ---------------------------------------------------------------------------

struct BrudnyiFit {
    /// corpus-wide max of (sup_B f - sup_E f) / log(|B| / |E|)
    double c_hat = 0.0;
    std::size_t pairs = 0;
    std::size_t skipped_full = 0;
};

struct BrudnyiVerification {
    double c_hat = 0.0;
    double d_hat = 4.0;
    std::size_t pairs = 0;
    std::size_t violations = 0;
    /// smallest rhs - lhs over all pairs
    double worst_margin = std::numeric_limits<double>::infinity();
};

namespace detail {
inline std::vector<std::pair<double, double>> brudnyi_subset(const CompactSetSpec& e, double lo, double hi,
                                                             double& measure) {
    auto iv = real_intervals(e);
    measure = 0.0;
    for (const auto& [a, b] : iv) {
        if (a < lo - 1e-12 || b > hi + 1e-12) throw Error(ErrorKind::Geometry, "subset leaves the interval");
        measure += b - a;
    }
    if (!(measure > 0.0)) throw Error(ErrorKind::ZeroMeasure, "subset has zero length");
    return iv;
}
}  // namespace detail

/// Fits c over the corpus for B = [x - t, x + t] and the given subsets.
inline BrudnyiFit brudnyi_fit(std::span<const PshFunctionSpec> corpus, double x, double t,
                              std::span<const CompactSetSpec> subsets) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus is empty");
    BrudnyiFit fit;
    const double lo = x - t, hi = x + t;
    for (const auto& e : subsets) {
        double m = 0.0;
        const auto iv = detail::brudnyi_subset(e, lo, hi, m);
        const double log_ratio = std::log(2.0 * t / m);
        for (const auto& f : corpus) {
            if (log_ratio <= 1e-12) {
                ++fit.skipped_full;
                continue;
            }
            const double ratio = (interval_sup(f, lo, hi) - intervals_sup(f, iv)) / log_ratio;
            fit.c_hat = std::max(fit.c_hat, ratio);
            ++fit.pairs;
        }
    }
    return fit;
}

/// sup_B f <= c log(d |B| / |E|) + sup_E f for every (f, E).
inline BrudnyiVerification brudnyi_check(std::span<const PshFunctionSpec> corpus, double x, double t,
                                         std::span<const CompactSetSpec> subsets, double c_hat, double d_hat = 4.0) {
    if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "corpus is empty");
    BrudnyiVerification v;
    v.c_hat = c_hat;
    v.d_hat = d_hat;
    const double lo = x - t, hi = x + t;
    for (const auto& e : subsets) {
        double m = 0.0;
        const auto iv = detail::brudnyi_subset(e, lo, hi, m);
        for (const auto& f : corpus) {
            const double lhs = interval_sup(f, lo, hi);
            const double rhs = c_hat * std::log(d_hat * 2.0 * t / m) + intervals_sup(f, iv);
            ++v.pairs;
            v.worst_margin = std::min(v.worst_margin, rhs - lhs);
            if (lhs > rhs) ++v.violations;
        }
    }
    return v;
}

/// Subsets of [x - t, x + t]: unions of 1 to 4 random subintervals with total
/// length between 1/64 and 1 of the interval.
inline std::vector<CompactSetSpec> brudnyi_patterns(double x, double t, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CompactSetSpec> out;
    const double lo = x - t, len = 2.0 * t;
    for (int p = 0; p < count; ++p) {
        const double fraction = std::pow(2.0, -rng.uniform(0.0, 6.0));
        const int pieces = rng.integer(1, 4);
        // split the fraction into pieces and spread them over disjoint slots
        std::vector<CompactSetSpec> parts;
        const double slot = len / pieces;
        for (int i = 0; i < pieces; ++i) {
            const double piece = fraction * len / pieces;
            const double start = lo + i * slot + rng.uniform() * (slot - piece);
            parts.push_back(CompactSetSpec::segment({start, 0.0}, {start + piece, 0.0}));
        }
        out.push_back(CompactSetSpec::set_union(std::move(parts), "pattern" + std::to_string(p)));
    }
    return out;
}

}  // namespace pshlab
