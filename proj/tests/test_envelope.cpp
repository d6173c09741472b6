#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pshlab/envelope.hpp"

using namespace pshlab;

namespace {

// log-radial oracle for E = disk(0, t), Omega = disk(0, a)
double annulus_oracle(double t, double a, double r) {
    if (r <= t) return -1.0;
    if (r >= a) return 0.0;
    return -std::log(a / r) / std::log(a / t);
}

ExtremalSolution solve(const CompactSetSpec& set, const DomainSpec& omega, int res, SolverOptions opt = {}) {
    const auto g = build_grid(omega, res);
    return relative_extremal(rasterize_set(set, g), omega, opt);
}

}  // namespace

TEST(ClosedForm, ConcentricDiskFormula) {
    for (double r : {0.0, 0.1, 0.25, 0.3, 0.7, 1.0, 1.99, 2.0, 3.0}) {
        EXPECT_NEAR(concentric_disk_u(0.25, 2.0, Complex(0.0, r)), annulus_oracle(0.25, 2.0, r), 1e-15) << r;
    }
    EXPECT_THROW(concentric_disk_u(1.0, 1.0, {}), Error);
    EXPECT_THROW(concentric_disk_u(0.0, 1.0, {}), Error);
}

TEST(Relative, ConcentricDisksMatchLogRadial) {
    const auto sol = solve(CompactSetSpec::disk({}, 0.25), DomainSpec::disk({}, 2.0), 128);
    ASSERT_TRUE(sol.converged);
    const Grid& g = *sol.grid;
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.classify(k) == NodeClass::Exterior) continue;
        const double r = std::abs(g.node(k));
        worst = std::max(worst, std::abs(sol.at(k) - annulus_oracle(0.25, 2.0, r)));
    }
    // the rim of E is resolved to h/2, which moves u by about h / (t log 8)
    EXPECT_LT(worst, 0.02);
}

TEST(Relative, ValuesInUnitBandAndObstacleHeld) {
    const auto spec = CompactSetSpec::set_union({CompactSetSpec::disk({-0.3, 0.2}, 0.15),
                                                 CompactSetSpec::segment({0.1, -0.4}, {0.6, 0.3})});
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 64);
    const auto m = rasterize_set(spec, g);
    const auto sol = relative_extremal(m, DomainSpec::disk({}, 1.0));
    for (std::size_t k = 0; k < g->size(); ++k) {
        EXPECT_GE(sol.at(k), -1.0);
        EXPECT_LE(sol.at(k), 0.0);
        if (m.contains(k)) {
            EXPECT_EQ(sol.at(k), -1.0);
        }
        if (g->classify(k) == NodeClass::Exterior) {
            EXPECT_EQ(sol.at(k), 0.0);
        }
    }
}

TEST(Relative, DiscreteHarmonicOffTheSet) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 64);
    const auto m = rasterize_set(CompactSetSpec::annulus({0.1, 0}, 0.1, 0.3), g);
    const auto sol = relative_extremal(m, DomainSpec::disk({}, 1.0));
    const std::size_t nx = static_cast<std::size_t>(g->nx());
    for (std::size_t k = 0; k < g->size(); ++k) {
        if (g->classify(k) != NodeClass::Interior || m.contains(k)) continue;
        const auto& u = sol.values;
        EXPECT_NEAR(u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx], 4.0 * u[k], 1e-7);
    }
}

TEST(Relative, SweepMethodsAgree) {
    const auto spec = CompactSetSpec::cantor({-0.5, 0}, {0.5, 0}, 1);
    const auto omega = DomainSpec::disk({}, 1.0);
    const auto mg = solve(spec, omega, 32);
    for (auto method : {SweepMethod::Jacobi, SweepMethod::RedBlack}) {
        SolverOptions o;
        o.method = method;
        o.tol = 1e-11;
        const auto s = solve(spec, omega, 32, o);
        ASSERT_TRUE(s.converged);
        ASSERT_TRUE(s.max_sweep_increase.has_value());
        EXPECT_LE(*s.max_sweep_increase, 0.0);
        double d = 0.0;
        for (std::size_t k = 0; k < s.values.size(); ++k) d = std::max(d, std::abs(s.at(k) - mg.at(k)));
        EXPECT_LT(d, 1e-6);
    }
}

TEST(Relative, IterationCapReportsUnconverged) {
    SolverOptions o;
    o.method = SweepMethod::Jacobi;
    o.max_iter = 5;
    const auto s = solve(CompactSetSpec::disk({}, 0.2), DomainSpec::disk({}, 1.0), 64, o);
    EXPECT_FALSE(s.converged);
    EXPECT_EQ(s.iterations, 5u);
    EXPECT_THROW(laplacian_mass(s), Error);
}

TEST(Relative, DomainMismatchRejected) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 32);
    const auto m = rasterize_set(CompactSetSpec::disk({}, 0.2), g);
    try {
        relative_extremal(m, DomainSpec::disk({}, 1.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidDomain);
    }
}

TEST(Relative, LargerSetGivesSmallerFunction) {
    const auto omega = DomainSpec::disk({}, 1.0);
    const auto g = build_grid(omega, 64);
    const auto small = relative_extremal(rasterize_set(CompactSetSpec::segment({-0.3, 0}, {0.2, 0}), g), omega);
    const auto big = relative_extremal(
        rasterize_set(CompactSetSpec::set_union({CompactSetSpec::segment({-0.3, 0}, {0.2, 0}),
                                                 CompactSetSpec::disk({0.1, 0.4}, 0.1)}),
                      g),
        omega);
    for (std::size_t k = 0; k < g->size(); ++k) EXPECT_LE(big.at(k), small.at(k) + 1e-9);
}

TEST(Relative, LargerDomainGivesSmallerFunction) {
    const auto set = CompactSetSpec::disk({0.1, 0}, 0.2);
    const auto inner = solve(set, DomainSpec::disk({}, 1.0), 64);
    const auto outer = solve(set, DomainSpec::disk({}, 1.5), 64);
    const Grid& gi = *inner.grid;
    for (std::size_t k = 0; k < gi.size(); ++k) {
        if (gi.classify(k) == NodeClass::Exterior) continue;
        const auto o = outer.grid->nearest(gi.node(k));
        ASSERT_TRUE(o.has_value());
        EXPECT_LE(outer.at(*o), inner.at(k) + 1e-9);
    }
}

TEST(Relative, TranslationByLatticeVector) {
    const Complex shift(0.25, -0.125);
    const auto a = solve(CompactSetSpec::disk({0.1, 0}, 0.3), DomainSpec::disk({}, 1.0), 32);
    const auto b = solve(CompactSetSpec::disk(Complex(0.1, 0) + shift, 0.3), DomainSpec::disk(shift, 1.0), 32);
    const Grid& ga = *a.grid;
    for (std::size_t k = 0; k < ga.size(); ++k) {
        if (ga.classify(k) == NodeClass::Exterior) continue;
        const auto kb = b.grid->nearest(ga.node(k) + shift);
        ASSERT_TRUE(kb.has_value());
        EXPECT_NEAR(a.at(k), b.at(*kb), 1e-8);
    }
}

TEST(Relative, DilationWithMatchingResolution) {
    // doubling every length and halving nodes per unit leaves the lattice problem unchanged
    const auto a = solve(CompactSetSpec::segment({-0.4, 0.1}, {0.3, 0.1}), DomainSpec::disk({}, 1.0), 64);
    const auto b = solve(CompactSetSpec::segment({-0.8, 0.2}, {0.6, 0.2}), DomainSpec::disk({}, 2.0), 32);
    const Grid& ga = *a.grid;
    for (std::size_t k = 0; k < ga.size(); ++k) {
        if (ga.classify(k) == NodeClass::Exterior) continue;
        const auto kb = b.grid->nearest(2.0 * ga.node(k));
        ASSERT_TRUE(kb.has_value());
        EXPECT_NEAR(a.at(k), b.at(*kb), 1e-8);
    }
}

TEST(Capacity, LaplacianMassOfConcentricDisks) {
    for (double t : {0.1, 0.25, 0.5}) {
        const auto sol = solve(CompactSetSpec::disk({}, t), DomainSpec::disk({}, 1.0), 128);
        const double expected = 2.0 * std::numbers::pi / std::log(1.0 / t);
        EXPECT_NEAR(laplacian_mass(sol).mass / expected, 1.0, 0.05) << t;
    }
}

TEST(RegionSup, ConcentricValueOnUnitDisk) {
    const auto sol = solve(CompactSetSpec::disk({}, 0.25), DomainSpec::disk({}, 2.0), 128);
    const auto s = region_sup(sol, DomainSpec::disk({}, 1.0));
    EXPECT_NEAR(s.value, -1.0 / 3.0, 0.01);
    EXPECT_LE(std::abs(s.z), 1.0 + 1e-12);
    EXPECT_THROW(region_sup(sol, DomainSpec::disk({5, 5}, 0.001)), Error);
}

TEST(Toric, ProductOfDisksIsMaxOfFactors) {
    const auto omega = DomainSpec::polydisk(2, 2.0);
    for (auto [t1, t2] : {std::pair{0.3, 0.3}, std::pair{0.2, 0.5}}) {
        const auto sol = toric_relative_extremal({RadiusInterval{t1 / 2, t1}, RadiusInterval{t2 / 2, t2}}, omega, 96);
        ASSERT_TRUE(sol.converged);
        double err = 0.0;
        for (int i = 0; i <= 20; ++i) {
            for (int j = 0; j <= 20; ++j) {
                const double r1 = 1.95 * i / 20, r2 = 1.95 * j / 20;
                const double exact = std::max(annulus_oracle(t1, 2.0, r1), annulus_oracle(t2, 2.0, r2));
                err = std::max(err, std::abs(toric_value(sol, r1, r2) - exact));
            }
        }
        EXPECT_LT(err, 0.02) << t1 << " " << t2;
    }
}

TEST(Toric, MonotoneInEachModulus) {
    const auto sol = toric_relative_extremal({RadiusInterval{0.2, 0.4}, RadiusInterval{0.1, 0.3}},
                                             DomainSpec::ball(2, 1.5), 64);
    for (int i = 0; i < 15; ++i) {
        for (int j = 0; j < 15; ++j) {
            const double r1 = 0.07 * i, r2 = 0.07 * j;
            EXPECT_LE(toric_value(sol, r1, r2), toric_value(sol, r1 + 0.07, r2) + 1e-12);
            EXPECT_LE(toric_value(sol, r1, r2), toric_value(sol, r1, r2 + 0.07) + 1e-12);
        }
    }
}

TEST(Toric, InvalidInputs) {
    const auto omega = DomainSpec::polydisk(2, 1.0);
    auto kind = [&](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidConfig;
    };
    EXPECT_EQ(kind([&] { toric_relative_extremal({RadiusInterval{0.0, 0.3}, RadiusInterval{0.1, 0.3}}, omega, 32); }),
              ErrorKind::UnsupportedToric);
    EXPECT_EQ(kind([&] { toric_relative_extremal({RadiusInterval{0.1, 1.3}, RadiusInterval{0.1, 0.3}}, omega, 32); }),
              ErrorKind::NotCompactlyContained);
    EXPECT_EQ(kind([&] {
                  toric_relative_extremal({RadiusInterval{0.1, 0.3}, RadiusInterval{0.1, 0.3}}, DomainSpec::disk({}, 1), 32);
              }),
              ErrorKind::UnsupportedToric);
    ToricOptions o;
    o.stencil = 0;
    EXPECT_THROW(toric_relative_extremal({RadiusInterval{0.1, 0.3}, RadiusInterval{0.1, 0.3}}, omega, 32, o), Error);
}

TEST(Relative, SubMeanValueAndNonNegativeDensity) {
    const auto sol = solve(CompactSetSpec::set_union({CompactSetSpec::disk({-0.4, 0}, 0.1),
                                                      CompactSetSpec::segment({0.0, -0.3}, {0.5, 0.4})}),
                           DomainSpec::disk({}, 1.0), 64);
    const Grid& g = *sol.grid;
    const std::size_t nx = static_cast<std::size_t>(g.nx());
    const auto& u = sol.values;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.classify(k) != NodeClass::Interior || sol.mask[k]) continue;
        EXPECT_LE(u[k], 0.25 * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx]) + 10 * sol.residual + 1e-15);
    }
    const auto mass = laplacian_mass(sol);
    const double h2 = g.spacing() * g.spacing();
    for (double d : mass.density) EXPECT_GE(d * h2, -10 * sol.residual - 1e-15);
    EXPECT_GT(mass.mass, 0.0);
}

TEST(Relative, SelfConvergenceOrder) {
    // least-squares slope of log sup|u_h - u_{h/2}| against log h over four refinement pairs
    const auto set = CompactSetSpec::disk({}, 0.3);
    const auto omega = DomainSpec::disk({}, 2.0);
    std::vector<double> xs, ys;
    // at 16 per unit the mask is a handful of nodes, before the asymptotic regime
    for (int res : {32, 64, 128, 256}) {
        const auto coarse = solve(set, omega, res);
        const auto fine = solve(set, omega, 2 * res);
        double d = 0.0;
        for (std::size_t k = 0; k < coarse.values.size(); ++k) {
            if (coarse.grid->classify(k) == NodeClass::Exterior) continue;
            const auto f = fine.grid->nearest(coarse.grid->node(k));
            ASSERT_TRUE(f.has_value());
            d = std::max(d, std::abs(coarse.at(k) - fine.at(*f)));
        }
        EXPECT_LE(d, 2.0 / res) << res;
        xs.push_back(std::log(1.0 / res));
        ys.push_back(std::log(d));
    }
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    EXPECT_GE((n * sxy - sx * sy) / (n * sxx - sx * sx), 0.9);
}
