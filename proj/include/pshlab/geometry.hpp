#pragma once

// Domains, compact sets and their uniform-lattice discretizations.
//
// Lattice nodes sit at integer multiples of the spacing h measured from the
// origin, so a grid at h/2 contains every node of the grid at h.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pshlab/error.hpp"

namespace pshlab {

using Complex = std::complex<double>;

/// Axis-aligned box in the plane, stored as lower-left and upper-right corners.
struct Box {
    Complex lo;
    Complex hi;

    bool contains(const Box& other) const {
        return other.lo.real() >= lo.real() && other.lo.imag() >= lo.imag() &&
               other.hi.real() <= hi.real() && other.hi.imag() <= hi.imag();
    }
    Box inflated(double d) const { return {lo - Complex(d, d), hi + Complex(d, d)}; }
};

// ---------------------------------------------------------------------------
// Domains
// ---------------------------------------------------------------------------

namespace domain {
struct Disk {
    Complex center;
    double radius = 0.0;
};
struct Polydisk {
    std::vector<Complex> centers;
    std::vector<double> radii;
};
struct Rectangle {
    Complex lo;
    Complex hi;
};
/// Euclidean ball of C^n centred at the origin.
struct Ball {
    int dimension = 1;
    double radius = 0.0;
};
}  // namespace domain

struct DomainSpec {
    std::variant<domain::Disk, domain::Polydisk, domain::Rectangle, domain::Ball> shape;
    std::string label;

    static DomainSpec disk(Complex center, double radius, std::string label = {}) {
        return {domain::Disk{center, radius}, std::move(label)};
    }
    static DomainSpec polydisk(std::vector<Complex> centers, std::vector<double> radii,
                               std::string label = {}) {
        return {domain::Polydisk{std::move(centers), std::move(radii)}, std::move(label)};
    }
    static DomainSpec polydisk(int n, double radius, std::string label = {}) {
        return polydisk(std::vector<Complex>(static_cast<std::size_t>(n), Complex{}),
                        std::vector<double>(static_cast<std::size_t>(n), radius), std::move(label));
    }
    static DomainSpec rectangle(Complex a, Complex b, std::string label = {}) {
        return {domain::Rectangle{a, b}, std::move(label)};
    }
    static DomainSpec ball(int dimension, double radius, std::string label = {}) {
        return {domain::Ball{dimension, radius}, std::move(label)};
    }

    int dimension() const {
        if (const auto* p = std::get_if<domain::Polydisk>(&shape)) {
            return static_cast<int>(p->radii.size());
        }
        if (const auto* b = std::get_if<domain::Ball>(&shape)) return b->dimension;
        return 1;
    }

    void validate() const {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, domain::Disk>) {
                    if (!(s.radius > 0.0)) throw Error(ErrorKind::InvalidDomain, "disk radius must be positive");
                } else if constexpr (std::is_same_v<T, domain::Polydisk>) {
                    if (s.radii.empty() || s.radii.size() != s.centers.size()) {
                        throw Error(ErrorKind::InvalidDomain, "polydisk needs one centre per radius, n >= 1");
                    }
                    for (double r : s.radii) {
                        if (!(r > 0.0)) throw Error(ErrorKind::InvalidDomain, "polydisk radius must be positive");
                    }
                } else if constexpr (std::is_same_v<T, domain::Rectangle>) {
                    if (!(s.hi.real() != s.lo.real() && s.hi.imag() != s.lo.imag())) {
                        throw Error(ErrorKind::InvalidDomain, "rectangle is empty");
                    }
                } else {
                    if (s.dimension < 1) throw Error(ErrorKind::InvalidDomain, "ball dimension must be >= 1");
                    if (!(s.radius > 0.0)) throw Error(ErrorKind::InvalidDomain, "ball radius must be positive");
                }
            },
            shape);
    }

    /// The one-variable disk this domain reduces to, if any.
    std::optional<domain::Disk> as_disk() const {
        if (const auto* d = std::get_if<domain::Disk>(&shape)) return *d;
        if (const auto* p = std::get_if<domain::Polydisk>(&shape); p && p->radii.size() == 1) {
            return domain::Disk{p->centers[0], p->radii[0]};
        }
        if (const auto* b = std::get_if<domain::Ball>(&shape); b && b->dimension == 1) {
            return domain::Disk{Complex{}, b->radius};
        }
        return std::nullopt;
    }

    bool is_planar() const { return dimension() == 1; }

    /// Open-set membership for planar domains.
    bool contains(Complex z) const {
        if (const auto* r = std::get_if<domain::Rectangle>(&shape)) {
            const auto [lo, hi] = normalized(*r);
            return z.real() > lo.real() && z.real() < hi.real() && z.imag() > lo.imag() &&
                   z.imag() < hi.imag();
        }
        const auto d = planar_disk();
        return std::abs(z - d.center) < d.radius;
    }

    /// Distance from an interior point to the boundary (planar domains).
    double boundary_gap(Complex z) const {
        if (const auto* r = std::get_if<domain::Rectangle>(&shape)) {
            const auto [lo, hi] = normalized(*r);
            return std::min({z.real() - lo.real(), hi.real() - z.real(), z.imag() - lo.imag(),
                             hi.imag() - z.imag()});
        }
        const auto d = planar_disk();
        return d.radius - std::abs(z - d.center);
    }

    Box bounding_box() const {
        if (const auto* r = std::get_if<domain::Rectangle>(&shape)) {
            const auto [lo, hi] = normalized(*r);
            return {lo, hi};
        }
        const auto d = planar_disk();
        return {d.center - Complex(d.radius, d.radius), d.center + Complex(d.radius, d.radius)};
    }

    bool same_geometry(const DomainSpec& other) const {
        if (shape.index() != other.shape.index()) {
            const auto a = as_disk();
            const auto b = other.as_disk();
            return a && b && a->center == b->center && a->radius == b->radius;
        }
        return std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                const auto& o = std::get<T>(other.shape);
                if constexpr (std::is_same_v<T, domain::Disk>) {
                    return s.center == o.center && s.radius == o.radius;
                } else if constexpr (std::is_same_v<T, domain::Polydisk>) {
                    return s.centers == o.centers && s.radii == o.radii;
                } else if constexpr (std::is_same_v<T, domain::Rectangle>) {
                    return s.lo == o.lo && s.hi == o.hi;
                } else {
                    return s.dimension == o.dimension && s.radius == o.radius;
                }
            },
            shape);
    }

private:
    static std::pair<Complex, Complex> normalized(const domain::Rectangle& r) {
        return {Complex(std::min(r.lo.real(), r.hi.real()), std::min(r.lo.imag(), r.hi.imag())),
                Complex(std::max(r.lo.real(), r.hi.real()), std::max(r.lo.imag(), r.hi.imag()))};
    }
    domain::Disk planar_disk() const {
        const auto d = as_disk();
        if (!d) throw Error(ErrorKind::InvalidDomain, "domain is not planar");
        return *d;
    }
};

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

enum class NodeClass : std::uint8_t { Exterior, Boundary, Interior };

class Grid {
public:
    Grid(DomainSpec omega, double spacing, long i0, long j0, int nx, int ny)
        : omega_(std::move(omega)), h_(spacing), i0_(i0), j0_(j0), nx_(nx), ny_(ny),
          classes_(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), NodeClass::Exterior) {
        std::vector<std::uint8_t> inside(classes_.size(), 0);
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                inside[index(i, j)] = omega_.contains(node(i, j)) ? 1 : 0;
            }
        }
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                const auto k = index(i, j);
                if (!inside[k]) continue;
                const bool all = i > 0 && j > 0 && i + 1 < nx_ && j + 1 < ny_ && inside[k - 1] &&
                                 inside[k + 1] && inside[k - nx_] && inside[k + nx_];
                classes_[k] = all ? NodeClass::Interior : NodeClass::Boundary;
            }
        }
    }

    const DomainSpec& omega() const { return omega_; }
    double spacing() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    long i_origin() const { return i0_; }
    long j_origin() const { return j0_; }
    std::size_t size() const { return classes_.size(); }

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }
    int column(std::size_t k) const { return static_cast<int>(k % static_cast<std::size_t>(nx_)); }
    int row(std::size_t k) const { return static_cast<int>(k / static_cast<std::size_t>(nx_)); }

    Complex node(int i, int j) const {
        return {static_cast<double>(i0_ + i) * h_, static_cast<double>(j0_ + j) * h_};
    }
    Complex node(std::size_t k) const { return node(column(k), row(k)); }

    NodeClass classify(std::size_t k) const { return classes_[k]; }
    std::span<const NodeClass> classes() const { return classes_; }

    std::size_t count(NodeClass c) const {
        return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), c));
    }

    /// Lattice box covered by the nodes (including the padding layer).
    Box box() const { return {node(0, 0), node(nx_ - 1, ny_ - 1)}; }

    /// Node whose lattice cell contains z, if z lies within the grid.
    std::optional<std::size_t> nearest(Complex z) const {
        const long gi = std::lround(z.real() / h_) - i0_;
        const long gj = std::lround(z.imag() / h_) - j0_;
        if (gi < 0 || gj < 0 || gi >= nx_ || gj >= ny_) return std::nullopt;
        return index(static_cast<int>(gi), static_cast<int>(gj));
    }

    /// Global lattice coordinates of node k, i.e. node(k) / h.
    std::pair<long, long> lattice(std::size_t k) const { return {i0_ + column(k), j0_ + row(k)}; }

private:
    DomainSpec omega_;
    double h_;
    long i0_;
    long j0_;
    int nx_;
    int ny_;
    std::vector<NodeClass> classes_;
};

namespace detail {
inline long snap_floor(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? static_cast<long>(r) : static_cast<long>(std::floor(x));
}
inline long snap_ceil(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? static_cast<long>(r) : static_cast<long>(std::ceil(x));
}
}  // namespace detail

/// Uniform lattice with spacing 1/resolution covering the domain's bounding
/// box plus one layer of exterior padding.
inline std::shared_ptr<const Grid> build_grid(const DomainSpec& omega, int resolution) {
    omega.validate();
    if (!omega.is_planar()) {
        throw Error(ErrorKind::InvalidDomain, "only planar domains can be gridded");
    }
    if (resolution < 16) throw Error(ErrorKind::InvalidDomain, "resolution must be at least 16");
    const double h = 1.0 / resolution;
    const Box b = omega.bounding_box();
    const long i_lo = detail::snap_floor(b.lo.real() / h) - 1;
    const long i_hi = detail::snap_ceil(b.hi.real() / h) + 1;
    const long j_lo = detail::snap_floor(b.lo.imag() / h) - 1;
    const long j_hi = detail::snap_ceil(b.hi.imag() / h) + 1;
    return std::make_shared<const Grid>(omega, h, i_lo, j_lo, static_cast<int>(i_hi - i_lo + 1),
                                        static_cast<int>(j_hi - j_lo + 1));
}

// ---------------------------------------------------------------------------
// Compact sets
// ---------------------------------------------------------------------------

struct CompactSetSpec;

namespace shape {
struct Disk {
    Complex center;
    double radius = 0.0;
};
struct Segment {
    Complex a;
    Complex b;
};
struct Annulus {
    Complex center;
    double inner = 0.0;
    double outer = 0.0;
};
/// Middle-thirds Cantor iterate of the segment [a, b].
struct Cantor {
    Complex a;
    Complex b;
    int level = 0;
};
/// Bitmap of pixels; pixel (0,0) has lower-left corner at origin.
struct Raster {
    Complex origin;
    double pixel = 0.0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    bool at(Complex z) const {
        const double x = (z.real() - origin.real()) / pixel;
        const double y = (z.imag() - origin.imag()) / pixel;
        if (x < 0 || y < 0 || x >= width || y >= height) return false;
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] != 0;
    }
};
struct Union {
    std::vector<CompactSetSpec> parts;
};
/// E_1 x ... x E_n with planar factors.
struct Product {
    std::vector<CompactSetSpec> factors;
};
}  // namespace shape

inline constexpr int kMaxCantorLevel = 8;

struct CompactSetSpec {
    using Shape = std::variant<shape::Disk, shape::Segment, shape::Annulus, shape::Cantor, shape::Raster,
                               shape::Union, shape::Product>;
    Shape shape;
    std::string label;

    static CompactSetSpec disk(Complex c, double r, std::string label = {}) {
        return {shape::Disk{c, r}, std::move(label)};
    }
    static CompactSetSpec segment(Complex a, Complex b, std::string label = {}) {
        return {shape::Segment{a, b}, std::move(label)};
    }
    static CompactSetSpec annulus(Complex c, double inner, double outer, std::string label = {}) {
        return {shape::Annulus{c, inner, outer}, std::move(label)};
    }
    static CompactSetSpec cantor(Complex a, Complex b, int level, std::string label = {}) {
        return {shape::Cantor{a, b, level}, std::move(label)};
    }
    static CompactSetSpec set_union(std::vector<CompactSetSpec> parts, std::string label = {}) {
        return {shape::Union{std::move(parts)}, std::move(label)};
    }
    static CompactSetSpec product(std::vector<CompactSetSpec> factors, std::string label = {}) {
        return {shape::Product{std::move(factors)}, std::move(label)};
    }
    static CompactSetSpec raster(shape::Raster r, std::string label = {}) {
        return {std::move(r), std::move(label)};
    }

    int dimension() const {
        if (const auto* p = std::get_if<shape::Product>(&shape)) return static_cast<int>(p->factors.size());
        return 1;
    }
};

/// Segments of the level-k middle-thirds construction on [a, b].
inline std::vector<std::pair<Complex, Complex>> cantor_segments(Complex a, Complex b, int level) {
    std::vector<std::pair<Complex, Complex>> segs{{a, b}};
    for (int l = 0; l < level; ++l) {
        std::vector<std::pair<Complex, Complex>> next;
        next.reserve(segs.size() * 2);
        for (const auto& [p, q] : segs) {
            const Complex d = (q - p) / 3.0;
            next.emplace_back(p, p + d);
            next.emplace_back(q - d, q);
        }
        segs = std::move(next);
    }
    return segs;
}

namespace detail {
inline double segment_distance(Complex z, Complex a, Complex b) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(z - a);
    const double t = std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

inline void validate_set(const CompactSetSpec& spec) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                if (!(s.radius > 0.0)) throw Error(ErrorKind::EmptySet, "disk radius must be positive");
            } else if constexpr (std::is_same_v<T, shape::Segment>) {
                if (s.a == s.b) throw Error(ErrorKind::EmptySet, "segment endpoints coincide");
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                if (!(s.outer > s.inner && s.inner >= 0.0)) {
                    throw Error(ErrorKind::EmptySet, "annulus needs 0 <= inner < outer");
                }
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                if (s.a == s.b) throw Error(ErrorKind::EmptySet, "cantor base segment is degenerate");
                if (s.level < 0 || s.level > kMaxCantorLevel) {
                    throw Error(ErrorKind::UnsupportedSet, "cantor level must lie in [0, 8]");
                }
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                if (s.width <= 0 || s.height <= 0 || !(s.pixel > 0.0) ||
                    s.bits.size() != static_cast<std::size_t>(s.width) * static_cast<std::size_t>(s.height)) {
                    throw Error(ErrorKind::EmptySet, "raster has inconsistent dimensions");
                }
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                if (s.parts.empty()) throw Error(ErrorKind::EmptySet, "union has no parts");
                for (const auto& p : s.parts) validate_set(p);
            } else {
                if (s.factors.empty()) throw Error(ErrorKind::EmptySet, "product has no factors");
                for (const auto& f : s.factors) {
                    if (f.dimension() != 1) throw Error(ErrorKind::UnsupportedSet, "product factors must be planar");
                    validate_set(f);
                }
            }
        },
        spec.shape);
}
}  // namespace detail

/// Euclidean distance from z to a planar set (0 inside).
inline double distance(const CompactSetSpec& spec, Complex z) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                return std::max(0.0, std::abs(z - s.center) - s.radius);
            } else if constexpr (std::is_same_v<T, shape::Segment>) {
                return detail::segment_distance(z, s.a, s.b);
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                const double r = std::abs(z - s.center);
                return std::max({0.0, r - s.outer, s.inner - r});
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& [a, b] : cantor_segments(s.a, s.b, s.level)) {
                    best = std::min(best, detail::segment_distance(z, a, b));
                }
                return best;
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                return s.at(z) ? 0.0 : std::numeric_limits<double>::infinity();
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& p : s.parts) best = std::min(best, distance(p, z));
                return best;
            } else {
                throw Error(ErrorKind::UnsupportedSet, "distance is defined for planar sets only");
            }
        },
        spec.shape);
}

inline Box bounds(const CompactSetSpec& spec) {
    auto seg_box = [](Complex a, Complex b) {
        return Box{Complex(std::min(a.real(), b.real()), std::min(a.imag(), b.imag())),
                   Complex(std::max(a.real(), b.real()), std::max(a.imag(), b.imag()))};
    };
    return std::visit(
        [&](const auto& s) -> Box {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                return {s.center - Complex(s.radius, s.radius), s.center + Complex(s.radius, s.radius)};
            } else if constexpr (std::is_same_v<T, shape::Segment> || std::is_same_v<T, shape::Cantor>) {
                return seg_box(s.a, s.b);
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                return {s.center - Complex(s.outer, s.outer), s.center + Complex(s.outer, s.outer)};
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                return {s.origin, s.origin + Complex(s.width * s.pixel, s.height * s.pixel)};
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                Box out = bounds(s.parts.front());
                for (const auto& p : s.parts) {
                    const Box b = bounds(p);
                    out.lo = Complex(std::min(out.lo.real(), b.lo.real()), std::min(out.lo.imag(), b.lo.imag()));
                    out.hi = Complex(std::max(out.hi.real(), b.hi.real()), std::max(out.hi.imag(), b.hi.imag()));
                }
                return out;
            } else {
                throw Error(ErrorKind::UnsupportedSet, "bounds are defined for planar sets only");
            }
        },
        spec.shape);
}

/// True when the set has empty planar interior (segments, Cantor iterates).
inline bool is_thin(const CompactSetSpec& spec) {
    return std::visit(
        [](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Segment> || std::is_same_v<T, shape::Cantor>) {
                return true;
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                return std::all_of(s.parts.begin(), s.parts.end(), [](const auto& p) { return is_thin(p); });
            } else {
                return false;
            }
        },
        spec.shape);
}

/// Image of the set under z -> scale * z + shift.
inline CompactSetSpec transformed(const CompactSetSpec& spec, double scale, Complex shift) {
    auto map = [&](Complex z) { return scale * z + shift; };
    CompactSetSpec out{spec.shape, spec.label};
    std::visit(
        [&](auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                s.center = map(s.center);
                s.radius *= scale;
            } else if constexpr (std::is_same_v<T, shape::Segment> || std::is_same_v<T, shape::Cantor>) {
                s.a = map(s.a);
                s.b = map(s.b);
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                s.center = map(s.center);
                s.inner *= scale;
                s.outer *= scale;
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                s.origin = map(s.origin);
                s.pixel *= scale;
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                for (auto& p : s.parts) p = transformed(p, scale, shift);
            } else {
                throw Error(ErrorKind::UnsupportedSet, "transform is defined for planar sets only");
            }
        },
        out.shape);
    return out;
}

inline CompactSetSpec translated(const CompactSetSpec& spec, Complex shift) { return transformed(spec, 1.0, shift); }
inline CompactSetSpec scaled(const CompactSetSpec& spec, double factor) { return transformed(spec, factor, {}); }

inline std::string describe(const CompactSetSpec& spec) {
    std::ostringstream os;
    os.precision(6);
    auto c = [&](Complex z) { os << '(' << z.real() << ',' << z.imag() << ')'; };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Disk>) {
                os << "disk";
                c(s.center);
                os << " r=" << s.radius;
            } else if constexpr (std::is_same_v<T, shape::Segment>) {
                os << "segment";
                c(s.a);
                c(s.b);
            } else if constexpr (std::is_same_v<T, shape::Annulus>) {
                os << "annulus";
                c(s.center);
                os << ' ' << s.inner << ".." << s.outer;
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                os << "cantor";
                c(s.a);
                c(s.b);
                os << " k=" << s.level;
            } else if constexpr (std::is_same_v<T, shape::Raster>) {
                os << "raster " << s.width << 'x' << s.height;
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                os << "union[";
                for (std::size_t i = 0; i < s.parts.size(); ++i) os << (i ? "; " : "") << describe(s.parts[i]);
                os << ']';
            } else {
                os << "product[";
                for (std::size_t i = 0; i < s.factors.size(); ++i) os << (i ? " x " : "") << describe(s.factors[i]);
                os << ']';
            }
        },
        spec.shape);
    return os.str();
}

// ---------------------------------------------------------------------------
// Masks
// ---------------------------------------------------------------------------

/// Grid proxy for a compact set: the member nodes of a lattice.
class SetMask {
public:
    SetMask(std::shared_ptr<const Grid> grid, std::vector<std::uint8_t> flags)
        : grid_(std::move(grid)), flags_(std::move(flags)) {
        for (std::size_t k = 0; k < flags_.size(); ++k) {
            if (flags_[k]) nodes_.push_back(k);
        }
    }

    const Grid& grid() const { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
    std::span<const std::uint8_t> flags() const { return flags_; }
    bool contains(std::size_t k) const { return flags_[k] != 0; }
    std::size_t count() const { return nodes_.size(); }
    const std::vector<std::size_t>& nodes() const { return nodes_; }

    /// Members with at least one non-member 4-neighbour.
    std::vector<std::size_t> boundary_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t k : nodes_) {
            if (!all_neighbours_member(k)) out.push_back(k);
        }
        return out;
    }

    bool has_interior() const {
        return std::any_of(nodes_.begin(), nodes_.end(), [&](std::size_t k) { return all_neighbours_member(k); });
    }

    std::vector<Complex> points(std::span<const std::size_t> idx) const {
        std::vector<Complex> out;
        out.reserve(idx.size());
        for (std::size_t k : idx) out.push_back(grid_->node(k));
        return out;
    }
    std::vector<Complex> points() const { return points(nodes_); }

    /// Mask-wise inclusion on a shared grid.
    bool subset_of(const SetMask& other) const {
        if (other.flags_.size() != flags_.size()) return false;
        for (std::size_t k : nodes_) {
            if (!other.flags_[k]) return false;
        }
        return true;
    }

private:
    bool all_neighbours_member(std::size_t k) const {
        const int nx = grid_->nx();
        const int i = grid_->column(k);
        const int j = grid_->row(k);
        if (i == 0 || j == 0 || i + 1 >= nx || j + 1 >= grid_->ny()) return false;
        const auto n = static_cast<std::size_t>(nx);
        return flags_[k - 1] && flags_[k + 1] && flags_[k - n] && flags_[k + n];
    }

    std::shared_ptr<const Grid> grid_;
    std::vector<std::uint8_t> flags_;
    std::vector<std::size_t> nodes_;
};

/// Marks the nodes within h/2 of the set. Thin sets come out one node wide.
/// The set must stay at least 2h away from the boundary of the grid's domain.
inline SetMask rasterize_set(const CompactSetSpec& spec, const std::shared_ptr<const Grid>& grid) {
    detail::validate_set(spec);
    if (spec.dimension() != 1) {
        throw Error(ErrorKind::UnsupportedSet, "product sets cannot be rasterized on a planar grid");
    }
    const double h = grid->spacing();
    const double reach = 0.5 * h * (1.0 + 1e-9);
    const Box sb = bounds(spec).inflated(reach);
    if (!grid->box().contains(sb)) {
        throw Error(ErrorKind::NotCompactlyContained, describe(spec) + " leaves the domain");
    }
    const long i_lo = std::max<long>(0, detail::snap_floor(sb.lo.real() / h) - grid->i_origin());
    const long i_hi = std::min<long>(grid->nx() - 1, detail::snap_ceil(sb.hi.real() / h) - grid->i_origin());
    const long j_lo = std::max<long>(0, detail::snap_floor(sb.lo.imag() / h) - grid->j_origin());
    const long j_hi = std::min<long>(grid->ny() - 1, detail::snap_ceil(sb.hi.imag() / h) - grid->j_origin());

    std::vector<std::uint8_t> flags(grid->size(), 0);
    const auto& omega = grid->omega();
    for (long j = j_lo; j <= j_hi; ++j) {
        for (long i = i_lo; i <= i_hi; ++i) {
            const Complex z = grid->node(static_cast<int>(i), static_cast<int>(j));
            if (distance(spec, z) > reach) continue;
            const auto k = grid->index(static_cast<int>(i), static_cast<int>(j));
            if (grid->classify(k) != NodeClass::Interior || omega.boundary_gap(z) < 2.0 * h) {
                throw Error(ErrorKind::NotCompactlyContained, describe(spec) + " reaches the boundary collar");
            }
            flags[k] = 1;
        }
    }
    SetMask mask(grid, std::move(flags));
    if (mask.count() == 0) throw Error(ErrorKind::EmptySet, describe(spec) + " misses every node");
    return mask;
}

// ---------------------------------------------------------------------------
// One-dimensional measure
// ---------------------------------------------------------------------------

namespace detail {
inline void collect_intervals(const CompactSetSpec& spec, std::vector<std::pair<double, double>>& out) {
    auto on_line = [](Complex a, Complex b) { return std::abs(a.imag()) < 1e-12 && std::abs(b.imag()) < 1e-12; };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, shape::Segment>) {
                if (!on_line(s.a, s.b)) throw Error(ErrorKind::UnsupportedMeasure, "segment is off the real line");
                out.emplace_back(std::min(s.a.real(), s.b.real()), std::max(s.a.real(), s.b.real()));
            } else if constexpr (std::is_same_v<T, shape::Cantor>) {
                if (!on_line(s.a, s.b)) throw Error(ErrorKind::UnsupportedMeasure, "cantor base is off the real line");
                for (const auto& [a, b] : cantor_segments(s.a, s.b, s.level)) {
                    out.emplace_back(std::min(a.real(), b.real()), std::max(a.real(), b.real()));
                }
            } else if constexpr (std::is_same_v<T, shape::Union>) {
                for (const auto& p : s.parts) collect_intervals(p, out);
            } else {
                throw Error(ErrorKind::UnsupportedMeasure, "set is not a union of real segments");
            }
        },
        spec.shape);
}
}  // namespace detail

/// Merges a list of closed intervals and returns the disjoint union, sorted.
inline std::vector<std::pair<double, double>> merge_intervals(std::vector<std::pair<double, double>> iv) {
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& [a, b] : iv) {
        if (!out.empty() && a <= out.back().second) {
            out.back().second = std::max(out.back().second, b);
        } else {
            out.emplace_back(a, b);
        }
    }
    return out;
}

/// Lebesgue measure of a finite union of real segments or Cantor iterates.
inline double measure_1d(const CompactSetSpec& spec) {
    std::vector<std::pair<double, double>> iv;
    detail::collect_intervals(spec, iv);
    double total = 0.0;
    for (const auto& [a, b] : merge_intervals(std::move(iv))) total += b - a;
    return total;
}

/// Intervals of a real-line set after merging overlaps.
inline std::vector<std::pair<double, double>> real_intervals(const CompactSetSpec& spec) {
    std::vector<std::pair<double, double>> iv;
    detail::collect_intervals(spec, iv);
    return merge_intervals(std::move(iv));
}

}  // namespace pshlab
