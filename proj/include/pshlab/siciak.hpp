#pragma once

// Siciak extremal function and capacity of planar sets from greedy Leja
// sequences, plus closed forms for disks and products.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "pshlab/envelope.hpp"
#include "pshlab/error.hpp"
#include "pshlab/geometry.hpp"

namespace pshlab {

struct LejaSequence {
    std::vector<Complex> points;
    /// log_products[m] = sum_{j < m} log|points[m] - points[j]|; entry 0 is 0.
    std::vector<double> log_products;
    std::vector<Complex> pool;

    std::size_t size() const { return points.size(); }
};

namespace detail {
inline bool lex_less(Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}
}  // namespace detail

/// Greedy Leja sequence drawn from an explicit candidate pool. The first
/// point is the lexicographically smallest endpoint of a diameter of the pool;
/// ties in later steps go to the lexicographically smallest candidate.
inline LejaSequence leja_points(std::vector<Complex> pool, std::size_t k) {
    if (k < 2) throw Error(ErrorKind::TooFewPoints, "a Leja sequence needs k >= 2");
    std::sort(pool.begin(), pool.end(), detail::lex_less);
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() < k) {
        throw Error(ErrorKind::PoolExhausted,
                    "requested " + std::to_string(k) + " points from a pool of " + std::to_string(pool.size()));
    }
    const std::size_t n = pool.size();
    std::size_t first = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::norm(pool[i] - pool[j]);
            if (d > best) {
                best = d;
                first = i;
            }
        }
    }

    LejaSequence seq;
    seq.points.reserve(k);
    seq.log_products.reserve(k);
    std::vector<double> score(n, 0.0);
    std::vector<char> used(n, 0);
    std::size_t pick = first;
    double pick_score = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        const Complex z = pool[pick];
        seq.points.push_back(z);
        seq.log_products.push_back(pick_score);
        used[pick] = 1;
        if (m + 1 == k) break;
        std::size_t arg = n;
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            score[i] += std::log(std::abs(pool[i] - z));
            if (score[i] > top) {
                top = score[i];
                arg = i;
            }
        }
        pick = arg;
        pick_score = top;
    }
    seq.pool = std::move(pool);
    return seq;
}

/// Candidate pool: mask boundary nodes when the mask has interior and enough
/// boundary nodes, otherwise every mask node.
inline std::vector<Complex> leja_pool(const SetMask& mask, std::size_t k) {
    if (mask.has_interior()) {
        const auto b = mask.boundary_nodes();
        if (b.size() >= k) return mask.points(b);
    }
    return mask.points();
}

inline LejaSequence leja_points(const SetMask& mask, std::size_t k) {
    if (mask.count() == 0) throw Error(ErrorKind::EmptySet, "mask has no nodes");
    return leja_points(leja_pool(mask, k), k);
}

/// Degree actually used for a requested k: at most a quarter of the pool.
/// Past that the polynomial swings between the nodes it is normalized on and
/// the estimate near E blows up (segment at 128 nodes per unit: k = 64 is
/// within 0.05 of the exact V, k = 128 off by 0.14).
inline std::size_t leja_degree(const SetMask& mask, std::size_t k) {
    return std::min(k, leja_pool(mask, k).size() / 4);
}

// ---------------------------------------------------------------------------

struct CapacityEstimate {
    double gamma = 0.0;
    double robin = 0.0;
    /// d_k for k = 2 .. K (entry i belongs to k = i + 2).
    std::vector<double> diameters;
    std::size_t k = 0;
    /// Relative range of the corrected tail used for the limit.
    double spread = 0.0;
    /// Coefficient c of the fitted c/k correction in log d_k.
    double slope = 0.0;
    /// Largest relative increase of d_k over the last quarter of the sequence.
    double tail_increase = 0.0;
    bool converged = false;
};

inline constexpr double kCapacitySpreadBand = 1e-2;

/// Transfinite-diameter estimate of the capacity from a Leja sequence.
///
/// d_k carries the factor k^{1/(k-1)} exactly for roots of unity; it is
/// removed first. The remaining 1/k drift is fitted over the second half of
/// the sequence and subtracted, and the corrected last quarter is averaged.
inline CapacityEstimate transfinite_diameter(const LejaSequence& leja) {
    const std::size_t K = leja.size();
    if (K < 32) throw Error(ErrorKind::TooFewPoints, "transfinite diameter needs k >= 32");
    CapacityEstimate out;
    out.k = K;
    std::vector<double> y;
    std::vector<double> ks;
    double total = 0.0;
    for (std::size_t m = 1; m < K; ++m) {
        total += leja.log_products[m];
        const double k = static_cast<double>(m + 1);
        const double log_d = 2.0 * total / (k * (k - 1.0));
        out.diameters.push_back(std::exp(log_d));
        ks.push_back(k);
        y.push_back(log_d - std::log(k) / (k - 1.0));
    }
    const std::size_t n = y.size();
    const std::size_t half = n / 2;
    const std::size_t quarter = 3 * n / 4;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = half; i < n; ++i) {
        const double x = 1.0 / ks[i];
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double cnt = static_cast<double>(n - half);
    const double den = cnt * sxx - sx * sx;
    out.slope = den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;

    double mean = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = quarter; i < n; ++i) {
        const double c = y[i] - out.slope / ks[i];
        mean += c;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    mean /= static_cast<double>(n - quarter);
    out.gamma = std::exp(mean);
    out.robin = -mean;
    out.spread = std::expm1(hi - lo);
    for (std::size_t i = quarter + 1; i < n; ++i) {
        out.tail_increase = std::max(out.tail_increase, out.diameters[i] / out.diameters[i - 1] - 1.0);
    }
    out.converged = out.spread < kCapacitySpreadBand;
    return out;
}

// ---------------------------------------------------------------------------

/// Discrete Siciak function built from the first k Leja points,
///   V(z) = max(0, (1/k) (sum_j log|z - zeta_j| - log ||omega_k||_E)).
struct SiciakEstimator {
    LejaSequence leja;
    /// log ||omega_m||_E for m = 1 .. k, sup over every node of E.
    std::vector<double> log_sup_norm;
    double diameter = 0.0;
    Box bounds;

    std::size_t degree() const { return leja.size(); }
};

inline SiciakEstimator make_siciak_estimator(LejaSequence leja, std::span<const Complex> e_nodes) {
    const std::size_t k = leja.size();
    if (k < 8) throw Error(ErrorKind::TooFewPoints, "Siciak estimator needs k >= 8");
    if (e_nodes.empty()) throw Error(ErrorKind::EmptySet, "no nodes to normalize on");
    SiciakEstimator est;
    est.log_sup_norm.assign(k, -std::numeric_limits<double>::infinity());
    std::vector<double> acc(e_nodes.size(), 0.0);
    for (std::size_t m = 0; m < k; ++m) {
        const Complex zeta = leja.points[m];
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < e_nodes.size(); ++i) {
            acc[i] += std::log(std::abs(e_nodes[i] - zeta));
            top = std::max(top, acc[i]);
        }
        est.log_sup_norm[m] = top;
    }
    Box b{e_nodes[0], e_nodes[0]};
    for (Complex z : e_nodes) {
        b.lo = Complex(std::min(b.lo.real(), z.real()), std::min(b.lo.imag(), z.imag()));
        b.hi = Complex(std::max(b.hi.real(), z.real()), std::max(b.hi.imag(), z.imag()));
    }
    est.bounds = b;
    double diam = 0.0;
    for (std::size_t i = 0; i < leja.pool.size(); ++i) {
        diam = std::max(diam, std::abs(leja.pool[i] - leja.points[0]));
    }
    est.diameter = diam;
    est.leja = std::move(leja);
    return est;
}

inline SiciakEstimator make_siciak_estimator(const SetMask& mask, std::size_t k) {
    if (k < 8) throw Error(ErrorKind::TooFewPoints, "Siciak estimator needs k >= 8");
    return make_siciak_estimator(leja_points(mask, k), mask.points());
}

inline double siciak_estimate(const SiciakEstimator& est, Complex z) {
    const std::size_t k = est.degree();
    double s = 0.0;
    for (Complex zeta : est.leja.points) s += std::log(std::abs(z - zeta));
    if (!std::isfinite(s)) return 0.0;
    return std::max(0.0, (s - est.log_sup_norm[k - 1]) / static_cast<double>(k));
}

// ---------------------------------------------------------------------------

struct RobinEstimate {
    double robin = 0.0;
    /// sup_{|z| = s} V(z) - log s for each radius.
    std::vector<double> values;
    std::vector<double> radii;
    /// Largest step-to-step increase of the sequence.
    double max_increase = 0.0;
    bool monotone = true;
};

inline constexpr double kRobinMonotoneTol = 1e-3;
inline constexpr int kCircleSamples = 512;

/// Largest value of f on the circle |z - c| = r, over 512 equally spaced angles.
template <class F>
double circle_sup(F&& f, Complex c, double r, int samples = kCircleSamples) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * std::numbers::pi * i / samples;
        best = std::max(best, f(c + std::polar(r, th)));
    }
    return best;
}

/// Robin constant from the far field: sup_{|z|=s} V - log s along the radii,
/// extrapolated by a fit v = L + c/s.
inline RobinEstimate robin_from_field(const SiciakEstimator& est, std::span<const double> radii) {
    if (radii.size() < 2) throw Error(ErrorKind::InvalidRadii, "need at least two radii");
    const Complex far_lo = est.bounds.lo;
    const Complex far_hi = est.bounds.hi;
    const double reach = std::max({std::abs(far_lo), std::abs(far_hi), std::abs(Complex(far_lo.real(), far_hi.imag())),
                                   std::abs(Complex(far_hi.real(), far_lo.imag()))});
    RobinEstimate out;
    double prev = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double s = radii[i];
        if (i > 0 && !(s > radii[i - 1])) throw Error(ErrorKind::InvalidRadii, "radii must increase");
        if (!(s > 2.0 * est.diameter) || !(s > reach)) {
            throw Error(ErrorKind::InvalidRadii, "radii must exceed twice the diameter of E");
        }
        const double v = circle_sup([&](Complex z) { return siciak_estimate(est, z); }, Complex{}, s) - std::log(s);
        if (i > 0) out.max_increase = std::max(out.max_increase, v - prev);
        out.values.push_back(v);
        out.radii.push_back(s);
        prev = v;
    }
    out.monotone = out.max_increase <= kRobinMonotoneTol;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double x = 1.0 / radii[i];
        sx += x;
        sy += out.values[i];
        sxx += x * x;
        sxy += x * out.values[i];
    }
    const double cnt = static_cast<double>(radii.size());
    const double den = cnt * sxx - sx * sx;
    const double c = den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
    out.robin = (sy - c * sx) / cnt;
    return out;
}

// ---------------------------------------------------------------------------

/// V for the closed disk B(center, t): log^+(|z - center| / t).
inline double ball_siciak(Complex center, double t, Complex z) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidRadii, "disk radius must be positive");
    return std::max(0.0, std::log(std::abs(z - center) / t));
}

/// V for the segment [a, b]: log|w + sqrt(w - 1) sqrt(w + 1)| with w the affine
/// image of z that sends a, b to -1, 1. The branch product keeps |.| >= 1.
inline double segment_siciak(Complex a, Complex b, Complex z) {
    if (a == b) throw Error(ErrorKind::Geometry, "segment endpoints coincide");
    const Complex w = (2.0 * z - a - b) / (b - a);
    return std::max(0.0, std::log(std::abs(w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0))));
}

/// V for a product set: max over coordinates of the factor functions.
inline double product_siciak(std::span<const std::function<double(Complex)>> factors, std::span<const Complex> z) {
    if (factors.size() != z.size() || factors.empty()) {
        throw Error(ErrorKind::Arity, "need one factor per coordinate");
    }
    double v = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) v = std::max(v, factors[j](z[j]));
    return v;
}

/// Siciak function of a planar set, either in closed form or from a
/// Leja estimator with its capacity estimate.
class SiciakModel {
public:
    struct Ball {
        Complex center;
        double radius;
    };
    struct Segment {
        Complex a, b;
    };
    struct Leja {
        std::shared_ptr<const SiciakEstimator> estimator;
        CapacityEstimate capacity;
    };

    static SiciakModel ball(Complex center, double radius) {
        if (!(radius > 0.0)) throw Error(ErrorKind::InvalidRadii, "disk radius must be positive");
        return SiciakModel(Ball{center, radius});
    }
    static SiciakModel segment(Complex a, Complex b) {
        if (a == b) throw Error(ErrorKind::Geometry, "segment endpoints coincide");
        return SiciakModel(Segment{a, b});
    }
    static SiciakModel leja(SiciakEstimator est) {
        CapacityEstimate cap = transfinite_diameter(est.leja);
        return SiciakModel(Leja{std::make_shared<const SiciakEstimator>(std::move(est)), std::move(cap)});
    }

    double operator()(Complex z) const {
        if (const auto* b = std::get_if<Ball>(&impl_)) return ball_siciak(b->center, b->radius, z);
        if (const auto* s = std::get_if<Segment>(&impl_)) return segment_siciak(s->a, s->b, z);
        return siciak_estimate(*std::get<Leja>(impl_).estimator, z);
    }
    double gamma() const {
        if (const auto* b = std::get_if<Ball>(&impl_)) return b->radius;
        if (const auto* s = std::get_if<Segment>(&impl_)) return std::abs(s->b - s->a) / 4.0;
        return std::get<Leja>(impl_).capacity.gamma;
    }
    double robin() const { return -std::log(gamma()); }
    bool closed_form() const { return !std::holds_alternative<Leja>(impl_); }
    const Leja* leja_data() const { return std::get_if<Leja>(&impl_); }

    /// sup over a closed planar disk; V is subharmonic, so the bounding circle
    /// carries the maximum.
    double sup_over(const domain::Disk& d) const {
        if (const auto* b = std::get_if<Ball>(&impl_)) {
            return std::max(0.0, std::log((std::abs(d.center - b->center) + d.radius) / b->radius));
        }
        return circle_sup(*this, d.center, d.radius);
    }

private:
    explicit SiciakModel(std::variant<Ball, Segment, Leja> impl) : impl_(std::move(impl)) {}
    std::variant<Ball, Segment, Leja> impl_;
};

/// Exact model where one is known: disks, segments, and annuli (which share V
/// with their outer disk, the polynomial hull).
inline std::optional<SiciakModel> closed_form_model(const CompactSetSpec& spec) {
    if (const auto* d = std::get_if<shape::Disk>(&spec.shape)) return SiciakModel::ball(d->center, d->radius);
    if (const auto* s = std::get_if<shape::Segment>(&spec.shape)) return SiciakModel::segment(s->a, s->b);
    if (const auto* r = std::get_if<shape::Annulus>(&spec.shape)) return SiciakModel::ball(r->center, r->outer);
    return std::nullopt;
}

/// Builds the model for a planar set: exact where closed_form_model knows one,
/// Leja otherwise, with k reduced by leja_degree when the mask is small.
inline SiciakModel siciak_model(const CompactSetSpec& spec, const SetMask& mask, std::size_t k) {
    if (auto m = closed_form_model(spec)) return *std::move(m);
    return SiciakModel::leja(make_siciak_estimator(mask, leja_degree(mask, k)));
}

/// Samples a Siciak model on the nodes of a grid.
inline ExtremalSolution siciak_field(const SiciakModel& model, std::shared_ptr<const Grid> grid) {
    ExtremalSolution sol;
    sol.kind = ExtremalKind::SiciakGrid;
    sol.values.resize(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k) sol.values[k] = model(grid->node(k));
    sol.converged = true;
    sol.grid = std::move(grid);
    return sol;
}

}  // namespace pshlab
