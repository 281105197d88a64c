#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sampcorr/generators.hpp"
#include "sampcorr/isotonic.hpp"
#include "sampcorr/missing_data.hpp"

using namespace sampcorr;

namespace {

const Pmf kEight({0.30, 0.20, 0.15, 0.10, 0.08, 0.07, 0.05, 0.05});

double total(const Pmf& p) { return std::accumulate(p.p().begin(), p.p().end(), 0.0); }

}  // namespace

TEST(InjectMissing, UniformSymmetry) {
    const auto [d, w] = inject_missing(Pmf::uniform(4), 2, 3);
    EXPECT_DOUBLE_EQ(w, 0.5);
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_DOUBLE_EQ(d[1], 0.0);
    EXPECT_DOUBLE_EQ(d[2], 0.0);
    EXPECT_DOUBLE_EQ(d[3], 0.5);
}

TEST(InjectMissing, EightPoint) {
    const auto [d, w] = inject_missing(kEight, 4, 4);
    EXPECT_NEAR(w, 0.1, 1e-15);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(d[x], x == 3 ? 0.0 : kEight[x] / 0.9, 1e-15);
}

TEST(InjectMissing, ZeroMassAndErrors) {
    const Pmf p({0.5, 0.0, 0.5});
    const auto [d, w] = inject_missing(p, 2, 2);
    EXPECT_DOUBLE_EQ(w, 0.0);
    EXPECT_DOUBLE_EQ(d[0], 0.5);
    EXPECT_THROW(inject_missing(p, 1, 3), ParameterError);
    EXPECT_THROW(inject_missing(p, 3, 2), ParameterError);
    EXPECT_THROW(inject_missing(p, 0, 2), ParameterError);
}

TEST(DetectGap, MonotoneIsClose) {
    DistAccess a = DistAccess::from_pmf(kEight, 1);
    EXPECT_EQ(detect_gap(a, 0.3, 0.1).kind, MissingDataReport::Kind::Close);
}

TEST(DetectGap, EightPointExact) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 1);
    const auto r = detect_gap(a, 0.3, 0.1);
    ASSERT_EQ(r.kind, MissingDataReport::Kind::Gap);
    EXPECT_EQ(r.a, 4u);
    EXPECT_EQ(r.b, 4u);
    EXPECT_LE(d.mass(r.a, r.b), 3 * 0.09);
    EXPECT_EQ(a.draws(), 0u);
}

TEST(DetectGap, SampleModeFindsBigGap) {
    const Pmf d = inject_missing(gen_geometric_monotone(40, 0.9), 5, 7).first;
    int hits = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        DistAccess a = DistAccess::from_pmf(d, s, false);
        const auto r = detect_gap(a, 0.3, 0.1);
        if (r.kind == MissingDataReport::Kind::Gap && r.a <= 5 && r.b >= 7) ++hits;
    }
    EXPECT_GE(hits, 9);
}

TEST(EstimateWeights, EightPointExact) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 1);
    const auto r = estimate_weights(a, detect_gap(a, 0.3, 0.1), 0.3, 0.1);
    EXPECT_NEAR(r.gamma, 4.0 / 45.0, 1e-12);
    EXPECT_EQ(r.c, 7u);
    EXPECT_NEAR(r.gamma_prime, 1.0 / 9.0, 1e-12);
    EXPECT_GE(r.gamma_prime, r.gamma);
}

TEST(EstimateWeights, PromiseGuard) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 1);
    const auto gap = detect_gap(a, 0.3, 0.1);
    // gamma = 0.0889 > 2*0.01 + 4*0.008
    EXPECT_THROW(estimate_weights(a, gap, 0.2, 0.1, 0.01), PromiseViolation);
    EXPECT_NO_THROW(estimate_weights(a, gap, 0.3, 0.1, 0.1));
    EXPECT_THROW(estimate_weights(a, MissingDataReport{}, 0.3, 0.1), ParameterError);
}

TEST(CorrectedPmf, EightPoint) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 1);
    const auto r = estimate_weights(a, detect_gap(a, 0.3, 0.1), 0.3, 0.1);
    const Pmf out = corrected_pmf_exact(d, r);
    const double want[] = {0.3333, 0.2222, 0.1667, 0.0889, 0.0889, 0.0778, 0.0111, 0.0111};
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(out[x], want[x], 1e-4);
    EXPECT_NEAR(total(out), 1.0, 1e-15);
    EXPECT_TRUE(is_monotone(out, 1e-12));
}

TEST(CorrectedPmf, ZeroGammaIsIdentity) {
    MissingDataReport r;
    r.kind = MissingDataReport::Kind::Gap;
    r.a = 2;
    r.b = 2;
    r.weighted = true;
    const Pmf d({0.6, 0.0, 0.4});
    const Pmf out = corrected_pmf_exact(d, r);
    for (std::size_t x = 0; x < 3; ++x) EXPECT_DOUBLE_EQ(out[x], d[x]);
}

TEST(CorrectedPmf, TvBound) {
    CounterRng rng(17);
    const double alpha = 0.3;
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 30 + rng.below(40);
        const Pmf base = gen_random_monotone(n, rng);
        const std::size_t i = 1 + rng.below(n / 3);
        const std::size_t j = i + rng.below(n / 6);
        const Pmf d = inject_missing(base, i, j).first;
        DistAccess a = DistAccess::from_pmf(d, 1);
        const auto gap = detect_gap(a, alpha, 0.1);
        if (gap.kind != MissingDataReport::Kind::Gap) continue;
        const auto r = estimate_weights(a, gap, alpha, 0.1);
        const Pmf out = corrected_pmf_exact(d, r);
        EXPECT_NEAR(total(out), 1.0, 1e-12);
        EXPECT_LE(tv_distance(out, d), 2.0 * (r.gamma + alpha * alpha * alpha) + 1e-12);
        ++checked;
    }
    EXPECT_GT(checked, 50);
}

TEST(Improver, ClosePassesThrough) {
    DistAccess a = DistAccess::from_pmf(kEight, 1);
    MissingDataImprover imp(a, {.eps = 0.2, .eps2 = 0.05, .delta = 0.1});
    EXPECT_TRUE(imp.pass_through());
    const Pmf out = imp.materialize(kEight);
    for (std::size_t x = 0; x < 8; ++x) EXPECT_DOUBLE_EQ(out[x], kEight[x]);
}

TEST(Improver, EightPointMatchesFormula) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 1);
    MissingDataImprover imp(a, {.eps = 0.2, .eps2 = 0.04, .delta = 0.1});
    EXPECT_NEAR(imp.alpha(), 0.2, 1e-15);
    EXPECT_FALSE(imp.pass_through());
    const Pmf out = imp.materialize(d);
    EXPECT_NEAR(out[3], 0.0889, 1e-4);
    EXPECT_NEAR(out[7], 0.0111, 1e-4);
}

TEST(Improver, SamplesMatchMaterialized) {
    const Pmf d = inject_missing(kEight, 4, 4).first;
    DistAccess a = DistAccess::from_pmf(d, 4);
    MissingDataImprover imp(a, {.eps = 0.2, .eps2 = 0.04, .delta = 0.1});
    CounterRng rng(5);
    const std::size_t q = 100000;
    const std::size_t before = a.draws();
    const auto xs = imp.batch(q, rng);
    EXPECT_EQ(a.draws() - before, q);
    EXPECT_LE(tv_distance(empirical_pmf(xs, 8), imp.materialize(d)), 0.02);
}

TEST(Improver, ParameterChecks) {
    DistAccess a = DistAccess::from_pmf(kEight, 1);
    EXPECT_THROW(MissingDataImprover(a, {.eps = 0.1, .eps2 = 0.2, .delta = 0.1}), ParameterError);
    EXPECT_THROW(MissingDataImprover(a, {.eps = 0.5, .eps2 = 0.2, .delta = 0.1}), ParameterError);
}

TEST(Improver, StreamTooShort) {
    DistAccess a = DistAccess::from_stream({1, 1, 2}, 8);
    EXPECT_THROW(MissingDataImprover(a, {.eps = 0.2, .eps2 = 0.04, .delta = 0.1}), InsufficientSamples);
}
