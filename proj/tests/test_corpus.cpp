#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pshlab/psh_corpus.hpp"

using namespace pshlab;

namespace {

double dense_circle_max(const PshFunctionSpec& f, Complex c, double r, int n = 20000) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) best = std::max(best, evaluate(f, c + std::polar(r, 2.0 * std::numbers::pi * i / n)));
    return best;
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

const DomainSpec kOmega = DomainSpec::disk({}, 2.0);
const DomainSpec kA = DomainSpec::disk({}, 1.0);

}  // namespace

TEST(Recipes, Evaluate) {
    const auto p = log_poly({{0.5, 0}, {0, -1}}, 0.5);
    const Complex z(0.2, 0.7);
    const double lp = 0.5 * (std::log(std::abs(z - Complex(0.5, 0))) + std::log(std::abs(z - Complex(0, -1))));
    EXPECT_NEAR(evaluate(p, z), lp, 1e-15);
    const auto q = log_poly({{-0.3, 0.3}}, 2.0);
    EXPECT_NEAR(evaluate(max_of({p, q}), z), std::max(lp, evaluate(q, z)), 1e-15);
    EXPECT_NEAR(evaluate(shifted(p, 0.7), z), lp + 0.7, 1e-15);
    auto r = p;
    r.multiplier = 3.0;
    r.offset = -1.0;
    EXPECT_NEAR(evaluate(r, z), 3.0 * lp - 1.0, 1e-14);
    EXPECT_EQ(evaluate(p, {0.5, 0}), -std::numeric_limits<double>::infinity());
}

TEST(Rng, DeterministicAndInRange) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, b.uniform());
        differs = differs || u != c.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const int k = a.integer(-2, 3);
        b.integer(-2, 3);
        EXPECT_GE(k, -2);
        EXPECT_LE(k, 3);
        EXPECT_LE(std::abs(a.in_disk({1, 1}, 0.5) - Complex(1, 1)), 0.5);
        b.in_disk({1, 1}, 0.5);
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, SamplesLieInSet) {
    Rng rng(3);
    const std::vector<CompactSetSpec> sets{
        CompactSetSpec::disk({0.1, 0.2}, 0.3),
        CompactSetSpec::segment({-0.5, 0.1}, {0.4, -0.3}),
        CompactSetSpec::annulus({}, 0.2, 0.4),
        CompactSetSpec::cantor({-0.6, 0}, {0.6, 0}, 3),
        CompactSetSpec::set_union({CompactSetSpec::disk({-0.5, 0}, 0.1), CompactSetSpec::segment({0, 0}, {0, 0.5})}),
    };
    for (const auto& s : sets) {
        for (int i = 0; i < 200; ++i) EXPECT_LE(distance(s, sample_in_set(s, rng)), 1e-12) << describe(s);
    }
    EXPECT_THROW(sample_in_set(CompactSetSpec::product({sets[0], sets[0]}), rng), Error);
}

TEST(Corpus, SeededAndLabelled) {
    CorpusConfig cfg;
    cfg.seed = 11;
    cfg.count = 40;
    cfg.e = CompactSetSpec::disk({0.2, 0}, 0.2);
    const auto a = sample_psh(cfg);
    const auto b = sample_psh(cfg);
    cfg.seed = 12;
    const auto c = sample_psh(cfg);
    ASSERT_EQ(a.size(), 40u);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].label, "f" + std::to_string(i));
        for (Complex z : {Complex(0.3, 0.9), Complex(-1.4, 0.2)}) {
            EXPECT_EQ(evaluate(a[i], z), evaluate(b[i], z));
            differs = differs || evaluate(a[i], z) != evaluate(c[i], z);
        }
    }
    EXPECT_TRUE(differs);
    cfg.count = 0;
    EXPECT_EQ(kind_of([&] { sample_psh(cfg); }), ErrorKind::InvalidConfig);
}

TEST(Corpus, RootsRespectPlacement) {
    CorpusConfig cfg;
    cfg.count = 30;
    cfg.max_degree = 3;
    cfg.placement = RootPlacement::Annular;
    for (const auto& f : sample_psh(cfg)) {
        std::vector<const PshFunctionSpec*> stack{&f};
        while (!stack.empty()) {
            const auto* g = stack.back();
            stack.pop_back();
            if (const auto* lp = std::get_if<recipe::LogPoly>(&g->recipe)) {
                for (Complex r : lp->roots) {
                    EXPECT_GE(std::abs(r), 1.0);
                    EXPECT_LE(std::abs(r), 2.0);
                }
            } else if (const auto* m = std::get_if<recipe::Max>(&g->recipe)) {
                for (const auto& ch : m->children) stack.push_back(&ch);
            } else {
                stack.push_back(std::get<recipe::Shifted>(g->recipe).child.get());
            }
        }
    }
    cfg.placement = RootPlacement::InsideE;
    EXPECT_EQ(kind_of([&] { sample_psh(cfg); }), ErrorKind::InvalidConfig);
}

TEST(Suprema, DiskAndIntervalMatchBruteForce) {
    CorpusConfig cfg;
    cfg.seed = 5;
    cfg.count = 12;
    for (const auto& f : sample_psh(cfg)) {
        EXPECT_NEAR(disk_sup(f, {0.1, -0.1}, 0.8), dense_circle_max(f, {0.1, -0.1}, 0.8), 1e-6);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 100000; ++i) best = std::max(best, evaluate(f, Complex(-0.7 + 1.2 * i / 100000.0, 0)));
        EXPECT_GE(interval_sup(f, -0.7, 0.5), best - 1e-9);
        EXPECT_NEAR(interval_sup(f, -0.7, 0.5), best, 1e-5);
    }
}

TEST(Normalize, HitsClassConstraints) {
    CorpusConfig cfg;
    cfg.seed = 8;
    cfg.count = 24;
    const auto raw = sample_psh(cfg);
    const auto norm = normalize_corpus(raw, kOmega, kA);
    ASSERT_FALSE(norm.empty());
    for (const auto& g : norm) {
        EXPECT_NEAR(dense_circle_max(g, {}, 2.0), 0.0, 1e-6);
        EXPECT_NEAR(dense_circle_max(g, {}, 1.0), -1.0, 1e-6);
        EXPECT_EQ(g.tag, FunctionClass::Ra);
        EXPECT_EQ(g.class_parameter, 2.0);
    }
}

TEST(Normalize, Idempotent) {
    const auto f = max_of({log_poly({{0.3, 0.1}}, 1.3), log_poly({{-1.5, 0.2}, {0.1, 1.2}}, 0.7)});
    const auto g = normalize_to_class(f, kOmega, kA);
    const auto gg = normalize_to_class(g, kOmega, kA);
    EXPECT_NEAR(gg.multiplier, g.multiplier, 1e-9 * g.multiplier);
    for (Complex z : {Complex(0.2, 0.2), Complex(-0.9, 1.1), Complex(1.5, 0)}) {
        EXPECT_NEAR(evaluate(gg, z), evaluate(g, z), 1e-9);
    }
}

TEST(Normalize, NearConstantRejected) {
    EXPECT_EQ(kind_of([] { normalize_to_class(log_poly({}, 1.0), kOmega, kA); }), ErrorKind::NearConstant);
    const std::vector<PshFunctionSpec> raw{log_poly({}, 1.0), log_poly({{0, 0}}, 1.0)};
    EXPECT_EQ(normalize_corpus(raw, kOmega, kA).size(), 1u);
}

TEST(EmpiricalH, NonPositiveOnSetAndMonotoneInCorpus) {
    CorpusConfig cfg;
    cfg.seed = 21;
    cfg.count = 32;
    cfg.e = CompactSetSpec::disk({0.1, 0}, 0.25);
    const auto raw = sample_psh(cfg);
    const auto corpus = normalize_corpus(raw, kOmega, kA);
    std::vector<Complex> e_nodes;
    for (int i = 0; i < 256; ++i) e_nodes.push_back(Complex(0.1, 0) + std::polar(0.25, 2.0 * std::numbers::pi * i / 256));
    const std::vector<Complex> probes{{0.1, 0.0}, {0.5, 0.3}, {-0.8, 0.1}, {1.2, -0.6}};
    const auto full = empirical_h(corpus, e_nodes, probes);
    const auto half = empirical_h(std::span(corpus).first(corpus.size() / 2), e_nodes, probes);
    EXPECT_LE(full[0], 1e-12);
    for (std::size_t i = 0; i < probes.size(); ++i) EXPECT_LE(half[i], full[i]);
    EXPECT_EQ(kind_of([&] { empirical_h({}, e_nodes, probes); }), ErrorKind::EmptyCorpus);
}

TEST(ModelRecipe, DiskIsExactAndSegmentIsClose) {
    const auto g = build_grid(DomainSpec::disk({}, 1.0), 128);
    const auto disk = CompactSetSpec::disk({0.1, 0.1}, 0.3);
    const auto fd = model_recipe(disk, rasterize_set(disk, g), 64);
    for (Complex z : {Complex(0.9, 0), Complex(-0.5, 0.6)}) {
        EXPECT_NEAR(evaluate(fd, z), ball_siciak({0.1, 0.1}, 0.3, z), 1e-14);
    }
    const auto seg = CompactSetSpec::segment({-0.5, 0}, {0.5, 0});
    const auto fs = model_recipe(seg, rasterize_set(seg, g), 128);
    for (Complex z : {Complex(0.0, 0.3), Complex(0.8, 0), Complex(-0.4, -0.5)}) {
        EXPECT_NEAR(evaluate(fs, z), segment_siciak({-0.5, 0}, {0.5, 0}, z), 0.03) << z;
    }
}

TEST(Bernstein, SingleRootAtCentre) {
    // log|z| normalized on (2, 1) is (log|z| - log 2) / log 2; its doubling ratio is 1 / log 2
    const std::vector<PshFunctionSpec> corpus{normalize_to_class(log_poly({{0, 0}}, 1.0), kOmega, kA)};
    const std::vector<double> s{1.0, 1.5, 2.0, 4.0};
    const auto r = bernstein_check(corpus, {}, 0.1, s);
    EXPECT_TRUE(r.finite);
    EXPECT_EQ(r.ratios, 3u);
    EXPECT_NEAR(r.c_hat, 1.0 / std::log(2.0), 1e-9);
}

TEST(Bernstein, Errors) {
    const std::vector<PshFunctionSpec> corpus{log_poly({{0, 0}}, 1.0)};
    const std::vector<double> low{0.5, 2.0};
    const std::vector<double> ok{2.0};
    EXPECT_EQ(kind_of([&] { bernstein_check(corpus, {}, 0.1, low); }), ErrorKind::Geometry);
    EXPECT_EQ(kind_of([&] { bernstein_check(corpus, {0.9, 0}, 0.1, ok); }), ErrorKind::Geometry);
    EXPECT_EQ(kind_of([&] { bernstein_check({}, {}, 0.1, ok); }), ErrorKind::EmptyCorpus);
}

TEST(Brudnyi, PatternsAreSubsetsOfTheInterval) {
    const auto a = brudnyi_patterns(0.1, 0.5, 20, 9);
    const auto b = brudnyi_patterns(0.1, 0.5, 20, 9);
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(describe(a[i]), describe(b[i]));
        const double m = measure_1d(a[i]);
        EXPECT_GE(m, 1.0 / 64 - 1e-12);
        EXPECT_LE(m, 1.0 + 1e-12);
        for (const auto& [lo, hi] : real_intervals(a[i])) {
            EXPECT_GE(lo, -0.4 - 1e-12);
            EXPECT_LE(hi, 0.6 + 1e-12);
        }
    }
}

TEST(Brudnyi, FittedConstantHasNoViolations) {
    CorpusConfig cfg;
    cfg.seed = 2;
    cfg.count = 24;
    const auto corpus = normalize_corpus(sample_psh(cfg), kOmega, kA);
    const auto subsets = brudnyi_patterns(0.0, 0.5, 12, 4);
    const auto fit = brudnyi_fit(corpus, 0.0, 0.5, subsets);
    EXPECT_GT(fit.c_hat, 0.0);
    EXPECT_EQ(fit.pairs, corpus.size() * subsets.size());
    const auto v = brudnyi_check(corpus, 0.0, 0.5, subsets, fit.c_hat, 1.0);
    EXPECT_EQ(v.violations, 0u);
    EXPECT_GE(v.worst_margin, -1e-12);
    // the full interval contributes nothing to the fit
    const std::vector<CompactSetSpec> whole{CompactSetSpec::segment({-0.5, 0}, {0.5, 0})};
    EXPECT_EQ(brudnyi_fit(corpus, 0.0, 0.5, whole).skipped_full, corpus.size());
}

TEST(Brudnyi, SubsetErrors) {
    const std::vector<PshFunctionSpec> corpus{log_poly({{0, 1}}, 1.0)};
    const std::vector<CompactSetSpec> outside{CompactSetSpec::segment({0.2, 0}, {0.8, 0})};
    EXPECT_EQ(kind_of([&] { brudnyi_fit(corpus, 0.0, 0.5, outside); }), ErrorKind::Geometry);
}

TEST(Bernstein, InvariantUnderConstantShift) {
    CorpusConfig cfg;
    cfg.seed = 31;
    cfg.count = 16;
    const auto raw = sample_psh(cfg);
    std::vector<PshFunctionSpec> plain, moved;
    for (const auto& f : raw) {
        plain.push_back(f);
        moved.push_back(shifted(f, 3.7));
    }
    const std::vector<double> s{1.25, 1.5, 2.0};
    const auto a = bernstein_check(normalize_corpus(plain, kOmega, kA), {0.2, 0.1}, 0.2, s);
    const auto b = bernstein_check(normalize_corpus(moved, kOmega, kA), {0.2, 0.1}, 0.2, s);
    EXPECT_NEAR(a.c_hat, b.c_hat, 1e-9);
    ASSERT_EQ(a.per_function.size(), b.per_function.size());
    for (std::size_t i = 0; i < a.per_function.size(); ++i) EXPECT_NEAR(a.per_function[i], b.per_function[i], 1e-9);
}

TEST(EmpiricalH, SingletonAndConcentricLimit) {
    // normalized log|z| on (2, 1) is log|z| / log 2 - 1; with E = disk(0, 1/4) its h at |z| = 1 is 2
    const auto g = normalize_to_class(log_poly({{0, 0}}, 1.0), kOmega, kA);
    std::vector<Complex> e_nodes;
    for (int i = 0; i < 512; ++i) e_nodes.push_back(std::polar(0.25, 2.0 * std::numbers::pi * i / 512));
    const std::vector<Complex> probes{{1.0, 0.0}, {0.0, -0.5}, {0.6, 0.8}};
    const std::vector<PshFunctionSpec> one{g};
    const auto h = empirical_h(one, e_nodes, probes);
    double se = -std::numeric_limits<double>::infinity();
    for (Complex z : e_nodes) se = std::max(se, evaluate(g, z));
    for (std::size_t i = 0; i < probes.size(); ++i) EXPECT_DOUBLE_EQ(h[i], evaluate(g, probes[i]) - se);
    EXPECT_NEAR(h[0], 2.0, 1e-12);
    EXPECT_NEAR(h[2], 2.0, 1e-12);
}
