#pragma once

// Two-sided bounds for the local growth function h_E, the conjecture
// quantity |sup_A u_{E,Omega}| sup_Omega V_E, and the auxiliary inequalities
// that surround them, assembled from the envelope and Siciak solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pshlab/envelope.hpp"
#include "pshlab/error.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/siciak.hpp"

namespace pshlab {

/// Where V_E comes from when a case is prepared.
enum class SiciakSource {
    /// Closed form for disks, segments and annuli, Leja estimator otherwise.
    ClosedFormWhenExact,
    /// Leja estimator for every set, disks included.
    Leja,
};

struct CaseOptions {
    SolverOptions solver;
    std::size_t leja_k = 128;
    SiciakSource siciak = SiciakSource::ClosedFormWhenExact;
};

/// One set E with its domains, grid solution u_{E,Omega} and model of V_E,
/// plus the suprema every functional needs.
struct ExtremalCase {
    CompactSetSpec set;
    DomainSpec a;
    DomainSpec omega;
    int resolution = 0;
    std::shared_ptr<const Grid> grid;
    std::optional<SetMask> mask;
    ExtremalSolution u;
    std::optional<SiciakModel> v;
    RegionSup sup_a_u;
    double sup_a_v = 0.0;
    double sup_omega_v = 0.0;
    /// sup_Omega V_A from the disk formula.
    double sup_omega_v_a = 0.0;

    double gamma() const { return v->gamma(); }
    double log_a() const { return std::log(omega.as_disk()->radius / a.as_disk()->radius); }
};

namespace detail {
inline domain::Disk require_disk(const DomainSpec& d, const char* what) {
    d.validate();
    const auto disk = d.as_disk();
    if (!disk) throw Error(ErrorKind::InvalidDomain, std::string(what) + " must be a planar disk");
    return *disk;
}
}  // namespace detail

/// sup over Omega of V_A for disks A and Omega.
inline double sup_omega_v_disk(const domain::Disk& a, const domain::Disk& omega) {
    return std::max(0.0, std::log((std::abs(omega.center - a.center) + omega.radius) / a.radius));
}

inline ExtremalCase prepare_case(const CompactSetSpec& set, const DomainSpec& a, const DomainSpec& omega, int resolution,
                                 const CaseOptions& opt = {}) {
    const auto ad = detail::require_disk(a, "A");
    const auto od = detail::require_disk(omega, "Omega");
    if (std::abs(ad.center - od.center) + ad.radius >= od.radius) {
        throw Error(ErrorKind::NotCompactlyContained, "A must be compactly contained in Omega");
    }
    ExtremalCase c{set, a, omega, resolution, build_grid(omega, resolution), std::nullopt, {}, std::nullopt, {}, 0, 0, 0};
    c.mask = rasterize_set(set, c.grid);
    c.u = relative_extremal(*c.mask, omega, opt.solver);
    if (!c.u.converged) {
        throw Error(ErrorKind::Unconverged, describe(set) + ": envelope residual " + std::to_string(c.u.residual));
    }
    if (opt.siciak == SiciakSource::ClosedFormWhenExact) c.v = closed_form_model(set);
    if (!c.v) c.v = SiciakModel::leja(make_siciak_estimator(*c.mask, leja_degree(*c.mask, opt.leja_k)));
    c.sup_a_u = region_sup(c.u, a);
    c.sup_a_v = c.v->sup_over(ad);
    c.sup_omega_v = c.v->sup_over(od);
    c.sup_omega_v_a = sup_omega_v_disk(ad, od);
    return c;
}

// ---------------------------------------------------------------------------
// Two-sided sandwich for h_E
// ---------------------------------------------------------------------------

struct BoundsReport {
    std::shared_ptr<const Grid> grid;
    /// V_E(z) / sup_Omega V_A; NaN outside Omega.
    std::vector<double> lower;
    /// (u_{E,Omega}(z) + 1) / |sup_A u_{E,Omega}|; NaN outside Omega.
    std::vector<double> upper;
    std::vector<double> gap;
    double sup_a_u = 0.0;
    double sup_omega_v_a = 0.0;
    /// sup |gap| over probe nodes (A minus E); zero when the sandwich closes.
    double equality_indicator = 0.0;
    /// max(lower - upper) over Omega minus the mask, divided by max(upper).
    double violation = 0.0;
    double max_upper = 0.0;
    double mask_oscillation = 0.0;
};

inline BoundsReport lemma1_bounds(const ExtremalCase& c) {
    const Grid& g = *c.grid;
    BoundsReport r;
    r.grid = c.grid;
    r.sup_a_u = c.sup_a_u.value;
    r.sup_omega_v_a = c.sup_omega_v_a;
    r.mask_oscillation = c.u.mask_oscillation;
    if (!(r.sup_a_u < 0.0)) throw Error(ErrorKind::Unconverged, "sup_A u is not negative");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.lower.assign(g.size(), nan);
    r.upper.assign(g.size(), nan);
    r.gap.assign(g.size(), nan);
    const auto ad = *c.a.as_disk();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.classify(k) == NodeClass::Exterior) continue;
        const Complex z = g.node(k);
        r.lower[k] = (*c.v)(z) / r.sup_omega_v_a;
        r.upper[k] = (c.u.values[k] + 1.0) / std::abs(r.sup_a_u);
        r.gap[k] = r.upper[k] - r.lower[k];
        r.max_upper = std::max(r.max_upper, r.upper[k]);
        if (c.mask->contains(k)) continue;
        // mask nodes count as E: u = -1 there, while a closed-form V sees the
        // true set and can be positive on nodes the rasterization rounded in
        worst = std::max(worst, -r.gap[k]);
        if (std::abs(z - ad.center) <= ad.radius) {
            r.equality_indicator = std::max(r.equality_indicator, std::abs(r.gap[k]));
        }
    }
    r.violation = r.max_upper > 0 ? worst / r.max_upper : worst;
    return r;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct InequalityReport {
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
    std::vector<std::string> provenance;
};

/// lhs <= rhs up to rel * max(|lhs|, |rhs|).
inline InequalityReport make_report(std::string check, double lhs, double rhs, double rel,
                                    std::vector<std::string> provenance = {}) {
    InequalityReport r;
    r.check = std::move(check);
    r.lhs = lhs;
    r.rhs = rhs;
    r.residual = rhs - lhs;
    r.tolerance = rel * std::max(std::abs(lhs), std::abs(rhs));
    r.pass = std::isfinite(r.residual) && r.residual >= -r.tolerance;
    r.provenance = std::move(provenance);
    return r;
}

inline InequalityReport skipped_report(std::string check, std::string why) {
    InequalityReport r;
    r.check = std::move(check);
    r.skipped = true;
    r.note = std::move(why);
    return r;
}

// ---------------------------------------------------------------------------
// Conjecture quantity
// ---------------------------------------------------------------------------

struct ConjectureRecord {
    std::string label;
    double a = 0.0;
    int n = 1;
    double sup_a_u_abs = 0.0;
    double sup_omega_v = 0.0;
    double product = 0.0;
    double gamma = 0.0;
    double grid_h = 0.0;
    std::size_t iterations = 0;
    double residual = 0.0;
    bool case3 = false;
};

inline ConjectureRecord conjecture_quantity(const ExtremalCase& c) {
    ConjectureRecord r;
    r.label = c.set.label.empty() ? describe(c.set) : c.set.label;
    r.a = c.omega.as_disk()->radius / c.a.as_disk()->radius;
    r.n = 1;
    r.sup_a_u_abs = std::abs(c.sup_a_u.value);
    r.sup_omega_v = c.sup_omega_v;
    r.product = r.sup_a_u_abs * r.sup_omega_v;
    r.gamma = c.gamma();
    r.grid_h = c.grid->spacing();
    r.iterations = c.u.iterations;
    r.residual = c.u.residual;
    return r;
}

// ---------------------------------------------------------------------------
// Claims
// ---------------------------------------------------------------------------

struct Claim1Report {
    InequalityReport lower;  // log(1/gamma) <= sup_A V_E
    InequalityReport upper;  // sup_A V_E <= 2 e^2 n log(n/gamma)
};

inline double claim1_factor(int n) { return 2.0 * std::numbers::e * std::numbers::e * n; }

inline Claim1Report claim1_check(double sup_a_v, double gamma, int n, double rel_tol = 0.03) {
    if (n < 1) throw Error(ErrorKind::Arity, "dimension must be >= 1");
    if (!(gamma > 0.0) || gamma >= 1.0) {
        const std::string why = "capacity estimate " + std::to_string(gamma) + " is not in (0,1)";
        return {skipped_report("claim1-lower", why), skipped_report("claim1-upper", why)};
    }
    Claim1Report r;
    r.lower = make_report("claim1-lower", std::log(1.0 / gamma), sup_a_v, rel_tol);
    r.upper = make_report("claim1-upper", sup_a_v, claim1_factor(n) * std::log(n / gamma), rel_tol);
    return r;
}

inline Claim1Report claim1_check(const ExtremalCase& c, double rel_tol = 0.03) {
    auto r = claim1_check(c.sup_a_v, c.gamma(), 1, rel_tol);
    r.lower.provenance = r.upper.provenance = {describe(c.set), c.v->closed_form() ? "V:closed-form" : "V:leja"};
    return r;
}

/// sup_A u + 1 <= 2 sup_A V_E / sup_Omega V_E.
inline InequalityReport claim2_check(const ExtremalCase& c, double rel_tol = 0.03) {
    return make_report("claim2", c.sup_a_u.value + 1.0, 2.0 * c.sup_a_v / c.sup_omega_v, rel_tol,
                       {describe(c.set), "u:grid", c.v->closed_form() ? "V:closed-form" : "V:leja"});
}

/// sup_R u + 1 <= sup_R V_E / inf_{boundary of Omega} V_E on a probe disk R.
inline InequalityReport klimek_check(const ExtremalCase& c, const domain::Disk& probe, double rel_tol = 0.05) {
    const auto od = *c.omega.as_disk();
    double inf_b = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kCircleSamples; ++i) {
        const double th = 2.0 * std::numbers::pi * i / kCircleSamples;
        inf_b = std::min(inf_b, (*c.v)(od.center + std::polar(od.radius, th)));
    }
    if (inf_b < 1e-3) return skipped_report("klimek", "inf of V on the boundary is below 1e-3");
    const double lhs = region_sup(c.u, DomainSpec::disk(probe.center, probe.radius)).value + 1.0;
    const double rhs = c.v->sup_over(probe) / inf_b;
    auto r = make_report("klimek", lhs, rhs, rel_tol, {describe(c.set)});
    r.note = "inf_boundary_V=" + std::to_string(inf_b);
    return r;
}

// ---------------------------------------------------------------------------
// Alexander-Taylor comparison (n = 1)
// ---------------------------------------------------------------------------

struct CapacityRecord {
    std::string label;
    double sup_a_v = 0.0;
    double cap = 0.0;
    double sup_a_u_abs = 0.0;
    /// sup_A V * cap
    double product = 0.0;
    /// cap / |sup_A u|, relative capacity against the envelope depth
    double cap_ratio = 0.0;
};

inline CapacityRecord capacity_record(const ExtremalCase& c) {
    CapacityRecord r;
    r.label = c.set.label.empty() ? describe(c.set) : c.set.label;
    r.sup_a_v = c.sup_a_v;
    r.cap = laplacian_mass(c.u).mass;
    r.sup_a_u_abs = std::abs(c.sup_a_u.value);
    r.product = r.sup_a_v * r.cap;
    r.cap_ratio = r.cap / r.sup_a_u_abs;
    return r;
}

struct AlexanderTaylorFit {
    /// largest c with c / cap <= sup_A V for every record
    double c_lower = 0.0;
    /// smallest c with sup_A V <= c / cap for every record
    double c_upper = 0.0;
    std::size_t records = 0;
    bool bracket = false;
};

inline AlexanderTaylorFit fit_alexander_taylor(const std::vector<CapacityRecord>& recs) {
    if (recs.empty()) throw Error(ErrorKind::EmptyCorpus, "no capacity records");
    AlexanderTaylorFit f;
    f.c_lower = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
        f.c_lower = std::min(f.c_lower, r.product);
        f.c_upper = std::max(f.c_upper, r.product);
    }
    f.records = recs.size();
    f.bracket = f.c_lower > 0.0 && std::isfinite(f.c_upper);
    return f;
}

/// Checks one record against a fitted constant pair; both exponents are 1 in
/// the plane.
inline std::pair<InequalityReport, InequalityReport> alexander_taylor_check(const CapacityRecord& r,
                                                                          const AlexanderTaylorFit& f,
                                                                          double rel_tol = 0.03) {
    return {make_report("alexander-taylor-lower", f.c_lower / r.cap, r.sup_a_v, rel_tol, {r.label}),
            make_report("alexander-taylor-upper", r.sup_a_v, f.c_upper / r.cap, rel_tol, {r.label})};
}

// ---------------------------------------------------------------------------
// Corollary bracket
// ---------------------------------------------------------------------------

/// Constant used in the corollary bracket, derived from the empirical floor
/// of the conjecture quantity.
inline double corollary_constant(double floor, double a) {
    if (!(floor > 0.0)) throw Error(ErrorKind::NeedsScan, "conjecture floor must be positive");
    return std::max(std::log(a), 1.0 / floor);
}

struct CorollaryReport {
    /// bracket of sup_A h_E from the two sandwich fields
    double h_lower = 0.0;
    double h_upper = 0.0;
    double constant = 0.0;
    InequalityReport lower;  // (1/C) log(1/gamma) <= h_lower
    InequalityReport upper;  // h_upper <= C log(n/gamma)
    bool pass = false;
    std::string label = "conditional on the conjecture";
};

inline CorollaryReport corollary2_bounds(const ExtremalCase& c, std::optional<double> scan_floor,
                                         double rel_tol = 0.03) {
    if (!scan_floor) throw Error(ErrorKind::NeedsScan, "run a conjecture scan first to obtain the floor");
    CorollaryReport r;
    const double a = c.omega.as_disk()->radius / c.a.as_disk()->radius;
    r.constant = corollary_constant(*scan_floor, a);
    r.h_lower = c.sup_a_v / c.sup_omega_v_a;
    r.h_upper = (c.sup_a_u.value + 1.0) / std::abs(c.sup_a_u.value);
    const double g = c.gamma();
    r.lower = make_report("corollary-lower", std::log(1.0 / g) / r.constant, r.h_lower, rel_tol, {describe(c.set)});
    r.upper = make_report("corollary-upper", r.h_upper, r.constant * std::log(1.0 / g), rel_tol, {describe(c.set)});
    r.pass = r.lower.pass && r.upper.pass;
    return r;
}

// ---------------------------------------------------------------------------
// Small-set and product-set reductions
// ---------------------------------------------------------------------------

inline double tau(int n) { return 1.0 - 1.0 / (8.0 * std::numbers::e * std::numbers::e * n); }

struct Case3Result {
    bool holds = false;
    /// gamma^tau_n - max |node - z0|
    double margin = 0.0;
    double radius = 0.0;
};

/// Whether every mask node lies in the disk of radius gamma^{tau_n} about z0.
inline Case3Result case3_condition(const SetMask& mask, double gamma, Complex z0, int n) {
    if (n < 1) throw Error(ErrorKind::Arity, "dimension must be >= 1");
    Case3Result r;
    r.radius = std::pow(gamma, tau(n));
    double far = 0.0;
    for (Complex z : mask.points()) far = std::max(far, std::abs(z - z0));
    r.margin = r.radius - far;
    r.holds = r.margin >= 0.0;
    return r;
}

struct ProductRecord {
    ConjectureRecord record;
    /// disk radius r of the intermediate polydisk D(0,r)^n
    double r = 0.0;
    /// true when Omega is itself the polydisk and the product is exact
    bool exact = false;
    std::vector<double> factor_sup_u;
    std::vector<double> factor_sup_v;
    std::vector<double> factor_gamma;
};

/// Product sets E_1 x ... x E_n. u on the polydisk B = D(0,r)^n is the max of
/// the factor functions, so |sup_A u_{E,B}| sup_Omega V_E bounds the
/// conjecture quantity from below (and equals it when Omega = B).
inline ProductRecord product_compose(const std::vector<CompactSetSpec>& factors, const DomainSpec& omega,
                                     const DomainSpec& a, int resolution, const CaseOptions& opt = {}) {
    const std::size_t n = factors.size();
    if (n == 0) throw Error(ErrorKind::Arity, "product needs at least one factor");
    omega.validate();
    a.validate();
    if (omega.dimension() != static_cast<int>(n) || a.dimension() != static_cast<int>(n)) {
        throw Error(ErrorKind::Arity, "domains must have one coordinate per factor");
    }
    auto equal_radius = [](const DomainSpec& d, const char* what) {
        if (const auto* b = std::get_if<domain::Ball>(&d.shape)) return b->radius;
        const auto* p = std::get_if<domain::Polydisk>(&d.shape);
        if (!p) throw Error(ErrorKind::InvalidDomain, std::string(what) + " must be a ball or polydisk");
        for (std::size_t j = 0; j < p->radii.size(); ++j) {
            if (p->centers[j] != Complex{} || p->radii[j] != p->radii[0]) {
                throw Error(ErrorKind::InvalidDomain, std::string(what) + " must be centred with equal radii");
            }
        }
        return p->radii[0];
    };
    const double big = equal_radius(omega, "Omega");
    const double unit = equal_radius(a, "A");
    const bool omega_ball = std::holds_alternative<domain::Ball>(omega.shape);
    const double ratio = big / unit;

    ProductRecord out;
    if (omega_ball) {
        // A (ball or polydisk of radius `unit`) sits inside D(0,r)^n, which
        // fits into the ball when r sqrt(n) <= big.
        out.r = big / std::sqrt(static_cast<double>(n));
        if (!(out.r > unit)) {
            throw Error(ErrorKind::SandwichUnavailable,
                        "a = " + std::to_string(ratio) + " does not exceed sqrt(n); no polydisk fits between A and Omega");
        }
    } else {
        out.r = big;
        out.exact = true;
        if (!(big > unit)) throw Error(ErrorKind::NotCompactlyContained, "A must be inside Omega");
    }

    const DomainSpec unit_disk = DomainSpec::disk({}, unit);
    const DomainSpec factor_omega = DomainSpec::disk({}, out.r);
    double min_abs_u = std::numeric_limits<double>::infinity();
    double max_v = 0.0;
    double min_gamma = std::numeric_limits<double>::infinity();
    double h = 0.0;
    std::size_t iters = 0;
    double resid = 0.0;
    for (const auto& f : factors) {
        if (f.dimension() != 1) throw Error(ErrorKind::UnsupportedSet, "factors must be planar");
        const ExtremalCase c = prepare_case(f, unit_disk, factor_omega, resolution, opt);
        // projection of Omega onto each coordinate is the disk of radius `big`
        const double sup_v = c.v->sup_over(domain::Disk{{}, big});
        out.factor_sup_u.push_back(c.sup_a_u.value);
        out.factor_sup_v.push_back(sup_v);
        out.factor_gamma.push_back(c.gamma());
        min_abs_u = std::min(min_abs_u, std::abs(c.sup_a_u.value));
        max_v = std::max(max_v, sup_v);
        min_gamma = std::min(min_gamma, c.gamma());
        h = c.grid->spacing();
        iters = std::max(iters, c.u.iterations);
        resid = std::max(resid, c.u.residual);
    }
    auto& r = out.record;
    for (std::size_t j = 0; j < n; ++j) {
        r.label += (j ? " x " : "") + (factors[j].label.empty() ? describe(factors[j]) : factors[j].label);
    }
    r.a = ratio;
    r.n = static_cast<int>(n);
    r.sup_a_u_abs = min_abs_u;
    r.sup_omega_v = max_v;
    r.product = min_abs_u * max_v;
    r.gamma = min_gamma;
    r.grid_h = h;
    r.iterations = iters;
    r.residual = resid;
    return out;
}

/// Step-1 estimate in the plane with the real interval I = [-1, 1] (fattened
/// on the grid) in the role of the real unit ball:
///   |sup_A u_{E,Omega}| >= |sup_A u_{I,Omega}| * |sup_I u_{E,Omega}|.
inline InequalityReport step1_check(const CompactSetSpec& set, double a, int resolution, double rel_tol = 0.05,
                                    const SolverOptions& solver = {}) {
    const DomainSpec omega = DomainSpec::disk({}, a);
    const DomainSpec unit = DomainSpec::disk({}, 1.0);
    auto grid = build_grid(omega, resolution);
    const SetMask e = rasterize_set(set, grid);
    const SetMask interval = rasterize_set(CompactSetSpec::segment({-1, 0}, {1, 0}), grid);
    const auto u_e = relative_extremal(e, omega, solver);
    const auto u_i = relative_extremal(interval, omega, solver);
    if (!u_e.converged || !u_i.converged) throw Error(ErrorKind::Unconverged, "envelope did not converge");
    const double lhs = std::abs(region_sup(u_i, unit).value) * std::abs(region_sup(u_e, interval).value);
    const double rhs = std::abs(region_sup(u_e, unit).value);
    return make_report("step1", lhs, rhs, rel_tol, {describe(set)});
}

}  // namespace pshlab
