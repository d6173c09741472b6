#pragma once

// Relative extremal function u_{E,Omega} as the largest discrete subharmonic
// function below the obstacle psi = -1 on E, 0 elsewhere, with zero on the
// boundary of Omega.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pshlab/error.hpp"
#include "pshlab/geometry.hpp"
#include "pshlab/multigrid.hpp"

namespace pshlab {

enum class ExtremalKind { Relative, SiciakGrid, Toric };

/// How the obstacle iteration is carried out.
///  - Jacobi: u <- min(psi, 4-neighbour average), all nodes at once.
///  - RedBlack: the same update in place, red nodes first.
///  - Multigrid: solves the Dirichlet problem the fixed point reduces to
///    (u = -1 on the mask, harmonic elsewhere) with MG-preconditioned CG.
enum class SweepMethod { Jacobi, RedBlack, Multigrid };

struct SolverOptions {
    double tol = 1e-8;
    /// 0 selects 20 * (nodes per side)^2.
    std::size_t max_iter = 0;
    SweepMethod method = SweepMethod::Multigrid;
};

/// Extra geometry carried by solutions of the toric path. Node (i, j) of the
/// solution grid represents the torus {|z_1| = e^{s_1}, |z_2| = e^{s_2}}.
struct ToricFrame {
    DomainSpec omega;
    std::array<double, 2> s_lo{};
    std::array<double, 2> s_hi{};
};

struct ExtremalSolution {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
    std::size_t iterations = 0;
    double residual = 0.0;
    double tol = 0.0;
    bool converged = false;
    ExtremalKind kind = ExtremalKind::Relative;
    SweepMethod method = SweepMethod::Multigrid;
    /// Largest increase any sweep made at any node (sweep methods only).
    std::optional<double> max_sweep_increase;
    /// Largest u + 1 over free nodes touching the mask; a heuristic for how
    /// sharply the discrete envelope detaches from E.
    double mask_oscillation = 0.0;
    std::vector<std::uint8_t> mask;
    std::optional<ToricFrame> toric;

    double at(std::size_t k) const { return values[k]; }
};

// ---------------------------------------------------------------------------

namespace detail {

inline double obstacle_defect(const Grid& g, const std::vector<std::uint8_t>& mask, const std::vector<double>& u) {
    const std::size_t nx = static_cast<std::size_t>(g.nx());
    double d = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (g.classify(k) != NodeClass::Interior) continue;
        const double psi = mask[k] ? -1.0 : 0.0;
        const double avg = 0.25 * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx]);
        d = std::max(d, std::abs(std::min(psi, avg) - u[k]));
    }
    return d;
}

inline double mask_oscillation(const Grid& g, const std::vector<std::uint8_t>& mask, const std::vector<double>& u) {
    const std::size_t nx = static_cast<std::size_t>(g.nx());
    double osc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (g.classify(k) != NodeClass::Interior || mask[k]) continue;
        if (mask[k - 1] || mask[k + 1] || mask[k - nx] || mask[k + nx]) osc = std::max(osc, u[k] + 1.0);
    }
    return osc;
}

inline void sweep_solve(const Grid& g, const std::vector<std::uint8_t>& mask, std::vector<double>& u,
                        const SolverOptions& opt, std::size_t max_iter, ExtremalSolution& out) {
    const std::size_t nx = static_cast<std::size_t>(g.nx());
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (g.classify(k) == NodeClass::Interior && !mask[k]) free.push_back(k);
    }
    std::vector<double> prev;
    double increase = 0.0;
    std::size_t it = 0;
    double change = std::numeric_limits<double>::infinity();
    while (it < max_iter && change > opt.tol) {
        ++it;
        change = 0.0;
        if (opt.method == SweepMethod::Jacobi) {
            prev = u;
            for (std::size_t k : free) {
                const double v = std::min(0.0, 0.25 * (prev[k - 1] + prev[k + 1] + prev[k - nx] + prev[k + nx]));
                increase = std::max(increase, v - prev[k]);
                change = std::max(change, std::abs(v - prev[k]));
                u[k] = v;
            }
        } else {
            for (int colour = 0; colour < 2; ++colour) {
                for (std::size_t k : free) {
                    if (((g.column(k) + g.row(k)) & 1) != colour) continue;
                    const double v = std::min(0.0, 0.25 * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx]));
                    increase = std::max(increase, v - u[k]);
                    change = std::max(change, std::abs(v - u[k]));
                    u[k] = v;
                }
            }
        }
    }
    out.iterations = it;
    out.max_sweep_increase = increase;
}

}  // namespace detail

/// Discrete relative extremal function of the masked set in omega.
/// Non-convergence within max_iter is reported through `converged`.
inline ExtremalSolution relative_extremal(const SetMask& mask, const DomainSpec& omega, const SolverOptions& opt = {}) {
    const Grid& g = mask.grid();
    if (!g.omega().same_geometry(omega)) {
        throw Error(ErrorKind::InvalidDomain, "mask grid was built for a different domain");
    }
    if (mask.count() == 0) throw Error(ErrorKind::EmptySet, "mask has no nodes");
    for (std::size_t k : mask.nodes()) {
        if (g.classify(k) != NodeClass::Interior) {
            throw Error(ErrorKind::NotCompactlyContained, "mask touches the boundary of the domain");
        }
    }
    const std::size_t side = static_cast<std::size_t>(std::max(g.nx(), g.ny()));
    const std::size_t max_iter = opt.max_iter ? opt.max_iter : 20 * side * side;

    ExtremalSolution sol;
    sol.grid = mask.grid_ptr();
    sol.kind = ExtremalKind::Relative;
    sol.method = opt.method;
    sol.tol = opt.tol;
    sol.mask.assign(mask.flags().begin(), mask.flags().end());

    // Start from the obstacle.
    std::vector<double> u(g.size(), 0.0);
    for (std::size_t k : mask.nodes()) u[k] = -1.0;

    if (opt.method == SweepMethod::Multigrid) {
        std::vector<std::uint8_t> free(g.size(), 0);
        std::vector<double> rhs(g.size(), 0.0);
        const std::size_t nx = static_cast<std::size_t>(g.nx());
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.classify(k) != NodeClass::Interior || sol.mask[k]) continue;
            free[k] = 1;
            rhs[k] = -static_cast<double>(sol.mask[k - 1] + sol.mask[k + 1] + sol.mask[k - nx] + sol.mask[k + nx]);
        }
        detail::MultigridPoisson mg(g.nx(), g.ny(), free);
        std::vector<double> x(g.size(), 0.0);
        double defect = 0.0;
        // Drive the linear defect well below tol so that pointwise comparisons
        // between solves are limited by tol rather than by conditioning.
        const double target = std::max(opt.tol * 1e-4, 1e-14);
        sol.iterations = mg.solve(x, rhs, target, std::min<std::size_t>(max_iter, 500), defect);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (free[k]) u[k] = std::clamp(x[k], -1.0, 0.0);
        }
    } else {
        detail::sweep_solve(g, sol.mask, u, opt, max_iter, sol);
    }
    sol.residual = detail::obstacle_defect(g, sol.mask, u);
    sol.converged = sol.residual <= opt.tol;
    sol.mask_oscillation = detail::mask_oscillation(g, sol.mask, u);
    sol.values = std::move(u);
    return sol;
}

/// Closed form for E = disk(0, t), Omega = disk(0, a):
/// max(-1, log(|z|/a) / log(a/t)), clamped to 0 outside Omega.
inline double concentric_disk_u(double t, double a, Complex z) {
    if (!(t > 0.0) || !(a > 0.0) || t >= a) throw Error(ErrorKind::InvalidRadii, "need 0 < t < a");
    const double r = std::abs(z);
    if (r <= t) return -1.0;
    if (r >= a) return 0.0;
    return std::max(-1.0, std::log(r / a) / std::log(a / t));
}

// ---------------------------------------------------------------------------

struct CapacityMass {
    /// Total of the discrete Laplacian times h^2; tends to the condenser
    /// charge 2 pi / log(a/t) for concentric disks.
    double mass = 0.0;
    /// Five-point Laplacian (sum of neighbours - 4u) / h^2 per node.
    std::vector<double> density;
};

inline CapacityMass laplacian_mass(const ExtremalSolution& sol) {
    if (sol.kind != ExtremalKind::Relative) {
        throw Error(ErrorKind::Unconverged, "laplacian mass needs a relative extremal solution");
    }
    if (!sol.converged) throw Error(ErrorKind::Unconverged, "solution residual exceeds its tolerance");
    const Grid& g = *sol.grid;
    const std::size_t nx = static_cast<std::size_t>(g.nx());
    const double h2 = g.spacing() * g.spacing();
    CapacityMass out;
    out.density.assign(g.size(), 0.0);
    const auto& u = sol.values;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (g.classify(k) != NodeClass::Interior) continue;
        const double lap = u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k];
        out.density[k] = lap / h2;
        out.mass += lap;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct RegionSup {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t node = 0;
    Complex z;
};

namespace detail {
inline bool toric_node_in(const DomainSpec& region, double s1, double s2) {
    const double r1 = std::exp(s1);
    const double r2 = std::exp(s2);
    constexpr double slack = 1e-12;
    if (const auto* b = std::get_if<domain::Ball>(&region.shape)) {
        return r1 * r1 + r2 * r2 <= b->radius * b->radius * (1 + slack);
    }
    if (const auto* p = std::get_if<domain::Polydisk>(&region.shape)) {
        if (p->radii.size() != 2) throw Error(ErrorKind::Arity, "toric regions live in C^2");
        return r1 <= p->radii[0] * (1 + slack) && r2 <= p->radii[1] * (1 + slack);
    }
    throw Error(ErrorKind::UnsupportedToric, "toric region must be a ball or polydisk");
}
}  // namespace detail

/// Maximum of the solution over the nodes that lie in the region.
inline RegionSup region_sup(const ExtremalSolution& sol, const DomainSpec& region) {
    const Grid& g = *sol.grid;
    RegionSup best;
    bool any = false;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Complex z = g.node(k);
        bool in;
        if (sol.toric) {
            if (z.real() > sol.toric->s_hi[0] || z.imag() > sol.toric->s_hi[1] || z.real() < sol.toric->s_lo[0] ||
                z.imag() < sol.toric->s_lo[1]) {
                continue;
            }
            in = detail::toric_node_in(region, z.real(), z.imag());
        } else {
            if (g.classify(k) == NodeClass::Exterior) continue;
            in = region.is_planar() ? region.contains(z) || region.boundary_gap(z) >= -1e-12 * g.spacing()
                                    : false;
        }
        if (!in) continue;
        if (!any || sol.values[k] > best.value) {
            best = {sol.values[k], k, z};
            any = true;
        }
    }
    if (!any) throw Error(ErrorKind::EmptyRegion, "region contains no grid node");
    return best;
}

/// Maximum over the member nodes of a mask sharing the solution's grid.
inline RegionSup region_sup(const ExtremalSolution& sol, const SetMask& region) {
    if (region.flags().size() != sol.values.size()) throw Error(ErrorKind::EmptyRegion, "mask is on another grid");
    RegionSup best;
    for (std::size_t k : region.nodes()) {
        if (sol.values[k] > best.value) best = {sol.values[k], k, sol.grid->node(k)};
    }
    if (region.count() == 0) throw Error(ErrorKind::EmptyRegion, "region mask is empty");
    return best;
}

// ---------------------------------------------------------------------------
// Toric path for Reinhardt data in C^2
// ---------------------------------------------------------------------------

/// E = {lo_j <= |z_j| <= hi_j, j = 1, 2}.
struct RadiusInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ToricOptions {
    double tol = 1e-10;
    std::size_t max_iter = 20000;
    /// Convexity is imposed along every primitive lattice direction (a, b)
    /// with max(|a|, |b|) <= stencil. A level set of the discrete solution
    /// is a polygon whose edge slopes come from this set.
    int stencil = 3;
};

/// Largest function of (log|z_1|, log|z_2|) that is convex, non-decreasing in
/// each variable, <= 0 on the log-shadow of omega and <= -1 on that of E.
inline ExtremalSolution toric_relative_extremal(const std::array<RadiusInterval, 2>& set, const DomainSpec& omega,
                                                int resolution, const ToricOptions& opt = {}) {
    omega.validate();
    if (omega.dimension() != 2) throw Error(ErrorKind::UnsupportedToric, "toric path is implemented for n = 2");
    std::array<double, 2> cap{};
    bool is_ball = false;
    double ball_r = 0.0;
    if (const auto* p = std::get_if<domain::Polydisk>(&omega.shape)) {
        for (int j = 0; j < 2; ++j) {
            if (p->centers[static_cast<std::size_t>(j)] != Complex{}) {
                throw Error(ErrorKind::UnsupportedToric, "polydisk must be centred at the origin");
            }
            cap[static_cast<std::size_t>(j)] = p->radii[static_cast<std::size_t>(j)];
        }
    } else if (const auto* b = std::get_if<domain::Ball>(&omega.shape)) {
        is_ball = true;
        ball_r = b->radius;
        cap = {b->radius, b->radius};
    } else {
        throw Error(ErrorKind::UnsupportedToric, "omega must be a polydisk or ball");
    }
    for (const auto& iv : set) {
        if (!(iv.lo > 0.0)) throw Error(ErrorKind::UnsupportedToric, "E touches a coordinate axis");
        if (!(iv.hi >= iv.lo)) throw Error(ErrorKind::EmptySet, "radius interval is empty");
    }
    const bool inside = is_ball ? set[0].hi * set[0].hi + set[1].hi * set[1].hi < ball_r * ball_r
                                : set[0].hi < cap[0] && set[1].hi < cap[1];
    if (!inside) throw Error(ErrorKind::NotCompactlyContained, "E is not inside omega");

    const double h = 1.0 / resolution;
    std::array<double, 2> s_lo{}, s_hi{};
    for (std::size_t j = 0; j < 2; ++j) {
        s_lo[j] = std::log(set[j].lo) - 4.0 * h;
        s_hi[j] = std::log(cap[j]);
    }
    auto grid = build_grid(DomainSpec::rectangle(Complex(s_lo[0], s_lo[1]), Complex(s_hi[0], s_hi[1]), "log-shadow"),
                           resolution);
    const Grid& g = *grid;
    const int nx = g.nx();
    const int ny = g.ny();

    // fixed: outside the shadow (value 0); obstacle -1 on the log image of E
    std::vector<std::uint8_t> fixed(g.size(), 0);
    std::vector<double> phi(g.size(), 0.0);
    constexpr double eps = 1e-12;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Complex s = g.node(k);
        const bool in_shadow = is_ball ? std::exp(2 * s.real()) + std::exp(2 * s.imag()) < ball_r * ball_r
                                       : s.real() < s_hi[0] - eps && s.imag() < s_hi[1] - eps;
        if (!in_shadow) {
            fixed[k] = 1;
            continue;
        }
        const bool in_e = s.real() >= std::log(set[0].lo) - eps && s.real() <= std::log(set[0].hi) + eps &&
                          s.imag() >= std::log(set[1].lo) - eps && s.imag() <= std::log(set[1].hi) + eps;
        if (in_e) phi[k] = -1.0;
    }

    if (opt.stencil < 1) throw Error(ErrorKind::InvalidConfig, "toric stencil must be at least 1");
    std::vector<std::array<int, 2>> dirs;
    for (int a = 0; a <= opt.stencil; ++a) {
        for (int b = -opt.stencil; b <= opt.stencil; ++b) {
            if ((a == 0 && b <= 0) || std::gcd(a, std::abs(b)) != 1) continue;
            dirs.push_back({a, b});
        }
    }
    // Midpoint inequalities at dyadic multiples of each direction; discrete
    // convexity along a line implies all of them, so the fixed point is the
    // same and information travels across the grid in few sweeps.
    std::vector<std::array<int, 2>> steps;
    for (const auto& d : dirs) {
        for (int m = 1; m * std::max(std::abs(d[0]), std::abs(d[1])) < std::max(nx, ny); m *= 2) {
            steps.push_back({d[0] * m, d[1] * m});
        }
    }

    std::vector<double> u = phi;
    ExtremalSolution sol;
    sol.grid = grid;
    sol.kind = ExtremalKind::Toric;
    sol.tol = opt.tol;
    sol.toric = ToricFrame{omega, s_lo, s_hi};
    double increase = 0.0;
    std::size_t it = 0;
    double change = std::numeric_limits<double>::infinity();
    while (it < opt.max_iter && change > opt.tol) {
        ++it;
        change = 0.0;
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = g.index(i, j);
                if (fixed[k]) continue;
                // phi >= u throughout, so starting from u keeps every sweep
                // monotone and the projection cannot be undone
                double v = u[k];
                for (const auto& st : steps) {
                    const int ia = i + st[0], ja = j + st[1], ib = i - st[0], jb = j - st[1];
                    if (ia < 0 || ja < 0 || ib < 0 || jb < 0 || ia >= nx || ja >= ny || ib >= nx || jb >= ny) continue;
                    v = std::min(v, 0.5 * (u[g.index(ia, ja)] + u[g.index(ib, jb)]));
                }
                increase = std::max(increase, v - u[k]);
                change = std::max(change, std::abs(v - u[k]));
                u[k] = v;
            }
        }
        // projection onto functions non-decreasing in each log-modulus
        for (int j = ny - 1; j >= 0; --j) {
            for (int i = nx - 1; i >= 0; --i) {
                const std::size_t k = g.index(i, j);
                if (fixed[k]) continue;
                double v = u[k];
                if (i + 1 < nx) v = std::min(v, u[k + 1]);
                if (j + 1 < ny) v = std::min(v, u[k + static_cast<std::size_t>(nx)]);
                change = std::max(change, std::abs(v - u[k]));
                u[k] = v;
            }
        }
    }
    sol.iterations = it;
    sol.residual = change;
    sol.converged = change <= opt.tol;
    sol.max_sweep_increase = increase;
    sol.mask.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k) sol.mask[k] = phi[k] < 0.0 ? 1 : 0;
    sol.values = std::move(u);
    return sol;
}

/// Bilinear evaluation of a toric solution at (z_1, z_2).
inline double toric_value(const ExtremalSolution& sol, Complex z1, Complex z2) {
    if (!sol.toric) throw Error(ErrorKind::UnsupportedToric, "solution is not toric");
    const auto& fr = *sol.toric;
    const Grid& g = *sol.grid;
    // |z_j| = 0 clamps to the lower edge; the solution is monotone in each
    // log-modulus, so the edge value is the limit
    if (!detail::toric_node_in(fr.omega, std::log(std::max(std::abs(z1), 1e-300)),
                               std::log(std::max(std::abs(z2), 1e-300)))) {
        return 0.0;
    }
    const double h = g.spacing();
    auto coord = [&](double r, int axis) {
        const double s = std::log(std::max(r, 1e-300));
        return std::clamp(s, fr.s_lo[static_cast<std::size_t>(axis)], fr.s_hi[static_cast<std::size_t>(axis)]);
    };
    const double x = coord(std::abs(z1), 0) / h - static_cast<double>(g.i_origin());
    const double y = coord(std::abs(z2), 1) / h - static_cast<double>(g.j_origin());
    const int i = std::clamp(static_cast<int>(std::floor(x)), 0, g.nx() - 2);
    const int j = std::clamp(static_cast<int>(std::floor(y)), 0, g.ny() - 2);
    const double fx = std::clamp(x - i, 0.0, 1.0);
    const double fy = std::clamp(y - j, 0.0, 1.0);
    const auto& v = sol.values;
    return (1 - fx) * (1 - fy) * v[g.index(i, j)] + fx * (1 - fy) * v[g.index(i + 1, j)] +
           (1 - fx) * fy * v[g.index(i, j + 1)] + fx * fy * v[g.index(i + 1, j + 1)];
}

}  // namespace pshlab
