#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pshlab/siciak.hpp"

using namespace pshlab;

namespace {

std::vector<Complex> circle_pool(Complex c, double r, int n) {
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i) out.push_back(c + std::polar(r, 2.0 * std::numbers::pi * i / n));
    return out;
}

std::vector<Complex> segment_pool(double a, double b, int n) {
    std::vector<Complex> out;
    for (int i = 0; i < n; ++i) out.push_back({a + (b - a) * i / (n - 1), 0.0});
    return out;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidConfig;
}

}  // namespace

TEST(Leja, GreedyMaximizesProductAtEveryStep) {
    auto pool = segment_pool(-1.0, 1.0, 201);
    for (int i = 0; i < 40; ++i) pool.push_back(std::polar(0.6, 0.3 + 0.1 * i));
    const auto seq = leja_points(pool, 24);
    ASSERT_EQ(seq.size(), 24u);
    for (std::size_t m = 1; m < seq.size(); ++m) {
        double best = -std::numeric_limits<double>::infinity();
        for (Complex z : seq.pool) {
            bool used = false;
            for (std::size_t j = 0; j < m; ++j) used = used || seq.points[j] == z;
            if (used) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += std::log(std::abs(z - seq.points[j]));
            best = std::max(best, s);
        }
        double chosen = 0.0;
        for (std::size_t j = 0; j < m; ++j) chosen += std::log(std::abs(seq.points[m] - seq.points[j]));
        EXPECT_NEAR(chosen, best, 1e-12) << m;
        EXPECT_NEAR(seq.log_products[m], chosen, 1e-12) << m;
    }
}

TEST(Leja, StartsAtDiameterEndpointAndIsDeterministic) {
    const auto seq = leja_points(segment_pool(-0.5, 1.5, 101), 2);
    EXPECT_EQ(seq.points[0], Complex(-0.5, 0.0));
    EXPECT_EQ(seq.points[1], Complex(1.5, 0.0));
    auto pool = circle_pool({0.1, 0.2}, 0.4, 90);
    const auto a = leja_points(pool, 30);
    std::reverse(pool.begin(), pool.end());
    const auto b = leja_points(pool, 30);
    EXPECT_EQ(a.points, b.points);
}

TEST(Leja, Errors) {
    EXPECT_EQ(kind_of([] { leja_points(segment_pool(0, 1, 10), 1); }), ErrorKind::TooFewPoints);
    EXPECT_EQ(kind_of([] { leja_points(segment_pool(0, 1, 10), 11); }), ErrorKind::PoolExhausted);
    // duplicates collapse before the size check
    std::vector<Complex> dup(20, Complex(0.5, 0.0));
    dup.push_back({0.0, 0.0});
    EXPECT_EQ(kind_of([&] { leja_points(dup, 3); }), ErrorKind::PoolExhausted);
}

TEST(Leja, DegreeCappedAtQuarterOfPool) {
    const auto g = build_grid(DomainSpec::disk({}, 2.0), 64);
    const auto m = rasterize_set(CompactSetSpec::segment({-1, 0}, {1, 0}), g);
    EXPECT_EQ(leja_degree(m, 1000), m.count() / 4);
    EXPECT_EQ(leja_degree(m, 8), 8u);
}

TEST(Capacity, CircleAndSegment) {
    const auto disk = transfinite_diameter(leja_points(circle_pool({0.3, -0.2}, 0.5, 4096), 128));
    EXPECT_NEAR(disk.gamma / 0.5, 1.0, 0.005);
    const auto seg = transfinite_diameter(leja_points(segment_pool(-1, 1, 4096), 200));
    EXPECT_NEAR(seg.gamma / 0.5, 1.0, 0.01);
    EXPECT_NEAR(seg.robin, -std::log(seg.gamma), 1e-12);
    EXPECT_EQ(seg.diameters.size(), 199u);
}

TEST(Capacity, ScalesLinearly) {
    const auto a = transfinite_diameter(leja_points(segment_pool(0, 1, 1024), 64));
    auto pool = segment_pool(0, 1, 1024);
    for (auto& z : pool) z = 3.0 * z + Complex(0.5, 2.0);
    const auto b = transfinite_diameter(leja_points(pool, 64));
    EXPECT_NEAR(b.gamma / a.gamma, 3.0, 1e-9);
}

TEST(Capacity, NeedsEnoughPoints) {
    EXPECT_EQ(kind_of([] { transfinite_diameter(leja_points(segment_pool(0, 1, 100), 31)); }), ErrorKind::TooFewPoints);
}

TEST(ClosedForms, DiskSiciak) {
    EXPECT_EQ(ball_siciak({0.1, 0.1}, 0.5, {0.2, 0.1}), 0.0);
    EXPECT_NEAR(ball_siciak({0.1, 0.1}, 0.5, {0.1, 2.1}), std::log(4.0), 1e-14);
    EXPECT_THROW(ball_siciak({}, 0.0, {1, 0}), Error);
}

TEST(ClosedForms, SegmentSiciak) {
    // [-1, 1]: log(x + sqrt(x^2 - 1)) on the real axis, asinh(y) on the imaginary axis
    for (double x : {1.0, 1.5, 3.0, 10.0}) {
        EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {x, 0}), std::log(x + std::sqrt(x * x - 1)), 1e-12);
        EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {-x, 0}), std::log(x + std::sqrt(x * x - 1)), 1e-12);
    }
    for (double y : {0.1, 1.0, 4.0}) {
        EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {0, y}), std::asinh(y), 1e-12);
        EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {0, -y}), std::asinh(y), 1e-12);
    }
    for (double x : {-0.9, 0.0, 0.4}) EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {x, 0}), 0.0, 1e-12);
    // confocal ellipses are level sets: log R on the ellipse with semi-axes (R + 1/R)/2, (R - 1/R)/2
    const double R = 1.7;
    for (int i = 0; i < 12; ++i) {
        const double th = 0.5 * i;
        const Complex z(0.5 * (R + 1 / R) * std::cos(th), 0.5 * (R - 1 / R) * std::sin(th));
        EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, z), std::log(R), 1e-12);
    }
    // affine covariance
    const Complex a(0.2, 0.3), b(0.8, -0.5);
    const Complex z(1.1, 0.9);
    const Complex w = (2.0 * z - a - b) / (b - a);
    EXPECT_NEAR(segment_siciak(a, b, z), segment_siciak({-1, 0}, {1, 0}, w), 1e-12);
}

TEST(ClosedForms, LogarithmicPoleMatchesCapacity) {
    const double big = 1e6;
    EXPECT_NEAR(segment_siciak({-1, 0}, {1, 0}, {0, big}) - std::log(big), std::log(2.0), 1e-9);
    EXPECT_NEAR(ball_siciak({0.3, 0}, 0.25, {0, big}) - std::log(big), -std::log(0.25), 1e-9);
}

TEST(ClosedForms, ProductIsMaxOfFactors) {
    std::vector<std::function<double(Complex)>> f{[](Complex z) { return ball_siciak({}, 0.5, z); },
                                                  [](Complex z) { return segment_siciak({-1, 0}, {1, 0}, z); }};
    const std::vector<Complex> z{{1.0, 0.0}, {0.0, 0.5}};
    EXPECT_NEAR(product_siciak(f, z), std::max(std::log(2.0), std::asinh(0.5)), 1e-14);
    EXPECT_THROW(product_siciak(f, std::span<const Complex>(z.data(), 1)), Error);
}

TEST(Estimator, NormalizedToZeroOnSet) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 128);
    const auto m = rasterize_set(CompactSetSpec::cantor({-0.6, 0}, {0.6, 0}, 2), g);
    const auto est = make_siciak_estimator(m, 32);
    for (Complex z : m.points()) EXPECT_EQ(siciak_estimate(est, z), 0.0);
    EXPECT_GT(siciak_estimate(est, {0.0, 0.5}), 0.0);
}

TEST(Estimator, DiskFieldNearClosedForm) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 256);
    const auto m = rasterize_set(CompactSetSpec::disk({}, 0.5), g);
    const auto est = make_siciak_estimator(m, 128);
    for (double r : {0.75, 1.0, 2.0}) {
        for (int i = 0; i < 8; ++i) {
            const Complex z = std::polar(r, 0.4 * i);
            EXPECT_NEAR(siciak_estimate(est, z), std::log(r / 0.5), 0.03 * std::log(r / 0.5) + 0.01) << z;
        }
    }
}

TEST(Estimator, RobinFromFieldMatchesTransfinite) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 256);
    const auto m = rasterize_set(CompactSetSpec::disk({0.1, 0}, 0.4), g);
    const auto model = SiciakModel::leja(make_siciak_estimator(m, 128));
    const auto* lj = model.leja_data();
    ASSERT_NE(lj, nullptr);
    const std::vector<double> radii{4, 8, 16, 32};
    const auto rf = robin_from_field(*lj->estimator, radii);
    EXPECT_TRUE(rf.monotone);
    EXPECT_NEAR(std::exp(-rf.robin) / 0.4, 1.0, 0.03);
    EXPECT_NEAR(model.gamma() / 0.4, 1.0, 0.02);
    const std::vector<double> close{0.5, 8};
    EXPECT_EQ(kind_of([&] { robin_from_field(*lj->estimator, close); }), ErrorKind::InvalidRadii);
    const std::vector<double> down{16, 8};
    EXPECT_EQ(kind_of([&] { robin_from_field(*lj->estimator, down); }), ErrorKind::InvalidRadii);
}

TEST(Model, ClosedFormSelection) {
    const auto disk = closed_form_model(CompactSetSpec::disk({0.1, 0}, 0.3));
    ASSERT_TRUE(disk);
    EXPECT_TRUE(disk->closed_form());
    EXPECT_EQ(disk->gamma(), 0.3);
    const auto ann = closed_form_model(CompactSetSpec::annulus({}, 0.1, 0.4));
    ASSERT_TRUE(ann);
    EXPECT_EQ(ann->gamma(), 0.4);
    EXPECT_EQ((*ann)(Complex(0.0, 0.0)), 0.0);
    const auto seg = closed_form_model(CompactSetSpec::segment({-0.5, 0}, {0.5, 0}));
    ASSERT_TRUE(seg);
    EXPECT_DOUBLE_EQ(seg->gamma(), 0.25);
    EXPECT_FALSE(closed_form_model(CompactSetSpec::cantor({-0.5, 0}, {0.5, 0}, 1)));
}

TEST(Model, SupOverDiskUsesBoundary) {
    const auto m = SiciakModel::ball({0.2, 0}, 0.25);
    EXPECT_NEAR(m.sup_over({{}, 1.0}), std::log(1.2 / 0.25), 1e-14);
    const auto s = SiciakModel::segment({-0.5, 0}, {0.5, 0});
    EXPECT_NEAR(s.sup_over({{}, 1.0}), segment_siciak({-0.5, 0}, {0.5, 0}, {0, 1}), 1e-12);
}

TEST(Model, LargerSetSmallerFunction) {
    // 512 per unit leaves the Cantor mask enough nodes for k >= 32
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 512);
    const auto inner = siciak_model(CompactSetSpec::cantor({-0.5, 0}, {0.5, 0}, 2), rasterize_set(
        CompactSetSpec::cantor({-0.5, 0}, {0.5, 0}, 2), g), 64);
    const auto outer = siciak_model(CompactSetSpec::segment({-0.5, 0}, {0.5, 0}), rasterize_set(
        CompactSetSpec::segment({-0.5, 0}, {0.5, 0}), g), 64);
    for (Complex z : {Complex(0, 0.3), Complex(0.9, 0.0), Complex(-0.2, -0.6)}) {
        EXPECT_LE(outer(z), inner(z) + 0.02) << z;
    }
}

TEST(Model, SampledOnGrid) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 32);
    const auto f = siciak_field(SiciakModel::ball({}, 0.5), g);
    EXPECT_EQ(f.kind, ExtremalKind::SiciakGrid);
    for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(f.at(k), ball_siciak({}, 0.5, g->node(k)));
}

TEST(Leja, PointsDistinct) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 128);
    const auto seq = leja_points(rasterize_set(CompactSetSpec::annulus({0.1, 0}, 0.2, 0.5), g), 96);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t j = i + 1; j < seq.size(); ++j) EXPECT_NE(seq.points[i], seq.points[j]);
    }
}

TEST(Capacity, PositiveAndBelowDiameterWithSettledTail) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 256);
    for (const auto& spec : {CompactSetSpec::disk({0.1, 0}, 0.4), CompactSetSpec::annulus({}, 0.2, 0.6),
                             CompactSetSpec::segment({-0.6, -0.2}, {0.5, 0.3})}) {
        const auto m = rasterize_set(spec, g);
        const auto est = make_siciak_estimator(m, leja_degree(m, 128));
        const auto cap = transfinite_diameter(est.leja);
        EXPECT_GT(cap.gamma, 0.0);
        EXPECT_LE(cap.gamma, est.diameter) << describe(spec);
        for (double d : cap.diameters) EXPECT_GT(d, 0.0);
        if (est.degree() >= 128) {
            EXPECT_LT(cap.spread, 1e-2) << describe(spec);
        }
    }
}

TEST(Estimator, NonNegativeAndSmallOnSet) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 256);
    const auto m = rasterize_set(CompactSetSpec::set_union({CompactSetSpec::disk({-0.4, 0.1}, 0.15),
                                                            CompactSetSpec::segment({0.0, -0.3}, {0.6, 0.2})}),
                                 g);
    const auto est = make_siciak_estimator(m, 64);
    for (Complex z : m.points()) EXPECT_LE(siciak_estimate(est, z), 1e-2);
    for (int i = 0; i < 200; ++i) {
        const Complex z(-1.5 + 3.0 * (i % 20) / 19.0, -1.5 + 3.0 * (i / 20) / 9.0);
        EXPECT_GE(siciak_estimate(est, z), -1e-6);
    }
}

TEST(Estimator, DiskRobinSequenceConstant) {
    // the far field sits 2.2% under -log 0.5 at 256 per unit and 1.6% at 512
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 512);
    const auto est = make_siciak_estimator(rasterize_set(CompactSetSpec::disk({}, 0.5), g), 128);
    const std::vector<double> radii{4, 8, 16};
    const auto rf = robin_from_field(est, radii);
    for (double v : rf.values) EXPECT_NEAR(v / -std::log(0.5), 1.0, 0.02);
    // Lelong growth: V - log|z| stays below the Robin constant plus 0.05
    const double robin = transfinite_diameter(est.leja).robin;
    for (double s : radii) {
        for (int i = 0; i < 16; ++i) {
            const Complex z = std::polar(s, 0.39 * i);
            EXPECT_LE(siciak_estimate(est, z) - std::log(s), robin + 0.05);
        }
    }
}

TEST(Estimator, ScalingAndTranslation) {
    const auto base = CompactSetSpec::cantor({-0.3, 0}, {0.3, 0}, 1);
    const auto g = build_grid(DomainSpec::disk({}, 2.0), 512);
    const auto m0 = rasterize_set(base, g);
    const auto e0 = make_siciak_estimator(m0, leja_degree(m0, 128));
    const double gamma0 = transfinite_diameter(e0.leja).gamma;
    const auto scaled = transfinite_diameter(make_siciak_estimator(
        rasterize_set(transformed(base, 2.0, {}), g), leja_degree(rasterize_set(transformed(base, 2.0, {}), g), 128)).leja);
    EXPECT_NEAR(scaled.gamma / (2.0 * gamma0), 1.0, 0.01);
    const auto moved_spec = transformed(base, 1.0, {0.31, -0.27});
    const auto mm = rasterize_set(moved_spec, g);
    EXPECT_NEAR(transfinite_diameter(make_siciak_estimator(mm, leja_degree(mm, 128)).leja).gamma / gamma0, 1.0, 0.01);
    const auto ms = rasterize_set(transformed(base, 2.0, {}), g);
    const auto es = make_siciak_estimator(ms, leja_degree(ms, 128));
    for (Complex z : {Complex(0.0, 0.4), Complex(0.7, 0.1), Complex(-0.5, -0.5)}) {
        EXPECT_NEAR(siciak_estimate(es, 2.0 * z), siciak_estimate(e0, z), 0.05 * siciak_estimate(e0, z)) << z;
    }
}

TEST(Estimator, SmallerSetLargerFunction) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 256);
    const auto small = rasterize_set(CompactSetSpec::disk({0.1, 0}, 0.2), g);
    const auto big = rasterize_set(CompactSetSpec::disk({0.1, 0}, 0.4), g);
    ASSERT_TRUE(small.subset_of(big));
    const auto es = make_siciak_estimator(small, leja_degree(small, 128));
    const auto eb = make_siciak_estimator(big, leja_degree(big, 128));
    for (Complex z : {Complex(0.6, 0.0), Complex(-0.5, 0.5), Complex(0.1, 0.9)}) {
        EXPECT_GE(siciak_estimate(es, z), siciak_estimate(eb, z) * (1.0 - 0.05)) << z;
    }
    EXPECT_LE(transfinite_diameter(es.leja).gamma, transfinite_diameter(eb.leja).gamma);
}

TEST(ClosedForms, ProductOfSegmentAndDisk) {
    std::vector<std::function<double(Complex)>> f{[](Complex z) { return segment_siciak({-1, 0}, {1, 0}, z); },
                                                  [](Complex z) { return ball_siciak({}, 0.5, z); }};
    const std::vector<Complex> z{{2.0, 0.0}, {0.0, 0.0}};
    EXPECT_NEAR(product_siciak(f, z), std::log(2.0 + std::sqrt(3.0)), 0.05 * std::log(2.0 + std::sqrt(3.0)));
    const std::vector<Complex> inside{{0.5, 0.0}, {0.1, 0.2}};
    EXPECT_EQ(product_siciak(f, inside), 0.0);
}
