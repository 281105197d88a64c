#include <gtest/gtest.h>

#include "sampcorr/generators.hpp"
#include "sampcorr/isotonic.hpp"
#include "sampcorr/meta.hpp"
#include "sampcorr/mono_correct.hpp"

using namespace sampcorr;

namespace {

LearnerSpec exact_learner() {
    LearnerSpec spec;
    spec.learn = [](DistAccess& a, double, double) { return a.exact(); };
    spec.complexity = [](double, double) { return std::size_t{0}; };
    return spec;
}

}  // namespace

TEST(CorrectorFromLearner, ExactPassthroughGivesProjection) {
    const Pmf d({0.2, 0.5, 0.3});
    DistAccess in = DistAccess::from_pmf(d, 1);
    DistAccess out = corrector_from_learner(exact_learner(), closest_monotone_pmf, {.eps = 0.15, .eps1 = 0.3}, in, 7);
    EXPECT_NEAR(out.exact()[0], 0.35, 1e-12);
    EXPECT_NEAR(out.exact()[2], 0.3, 1e-12);
    out.draw_many(1000);
    EXPECT_EQ(in.draws(), 0u);
}

TEST(CorrectorFromLearner, InputDrawsFrozenAfterLearning) {
    CounterRng rng(3);
    const Fixture f = gen_perturbed_monotone(128, 0.05, rng, 1e-6);
    DistAccess in = DistAccess::from_pmf(f.pmf, 2, false);
    const auto learner = birge_flat_learner(1.0);
    const CorrectorParams p{.eps = 0.05, .eps1 = 0.25, .delta = 0.1};
    DistAccess out = corrector_from_learner(learner, closest_monotone_pmf, p, in, 9);
    const std::size_t used = in.draws();
    EXPECT_EQ(used, learner.complexity((p.eps1 - p.eps) / 2.0, p.delta));
    out.draw_many(10000);
    EXPECT_EQ(in.draws(), used);
    EXPECT_TRUE(is_monotone(out.exact(), 1e-12));
}

TEST(CorrectorFromLearner, MatchesLearnedCorrector) {
    CounterRng rng(5);
    const Fixture f = gen_perturbed_monotone(256, 0.05, rng, 1e-6);
    const double acc = 0.15, c = 1.0, delta = 0.1;
    DistAccess a = DistAccess::from_pmf(f.pmf, 11, false);
    const Pmf want = learned_corrector_build(a, acc, c, delta);
    DistAccess b = DistAccess::from_pmf(f.pmf, 11, false);
    const auto part = birge_partition(256, c * acc / 3.0);
    const Projection project = [&part](const Pmf& h) { return project_flattened(h, part); };
    DistAccess out = corrector_from_learner(birge_flat_learner(c), project, {.eps = 0.0, .eps1 = 2.0 * acc, .delta = delta},
                                            b, 1);
    for (std::size_t i = 0; i < 256; ++i) EXPECT_NEAR(out.exact()[i], want[i], 1e-14);
    EXPECT_EQ(a.draws(), b.draws());
}

TEST(CorrectorFromLearner, NeedsSlack) {
    DistAccess in = DistAccess::from_pmf(Pmf::uniform(4), 1);
    EXPECT_THROW(corrector_from_learner(exact_learner(), closest_monotone_pmf, {.eps = 0.2, .eps1 = 0.2}, in, 1),
                 ParameterError);
}

TEST(Agnostic, MonotoneClassExample) {
    CounterRng rng(13);
    const Fixture f = gen_perturbed_monotone(64, 0.05, rng, 1e-6);
    DistAccess in = DistAccess::from_pmf(f.pmf, 3);
    const Pmf h = agnostic_from_corrector(exact_monotone_corrector(), birge_tv_learner(64, true), 0.05,
                                          {.eps = 0.02, .delta = 0.1}, in, 17);
    EXPECT_LE(tv_distance(h, f.pmf), 0.09);
    EXPECT_TRUE(is_monotone(h, 1e-12));
}

TEST(Agnostic, ZeroOptIsPlainLearning) {
    const Pmf d = gen_zipf_monotone(64, 1.0);
    DistAccess in = DistAccess::from_pmf(d, 3);
    const Pmf h = agnostic_from_corrector(exact_monotone_corrector(), birge_tv_learner(64, false), 0.0,
                                          {.eps = 0.05, .delta = 0.1}, in, 19);
    EXPECT_LE(tv_distance(h, d), 0.1);
}

TEST(Learners, ComplexityDecreasesWithAccuracy) {
    const auto tv = birge_tv_learner(1000, false);
    const auto flat = birge_flat_learner(1.0);
    EXPECT_GT(tv.complexity(0.05, 0.1), tv.complexity(0.1, 0.1));
    EXPECT_GT(tv.complexity(0.1, 0.01), tv.complexity(0.1, 0.1));
    EXPECT_GT(flat.complexity(0.05, 0.1), flat.complexity(0.1, 0.1));
    EXPECT_THROW(birge_tv_samples(10, 0.0, 0.1), ParameterError);
}

TEST(Learners, DrawCountsMatchComplexity) {
    DistAccess a = DistAccess::from_pmf(Pmf::uniform(100), 1);
    const auto l = birge_tv_learner(100, true);
    l.learn(a, 0.1, 0.1);
    EXPECT_EQ(a.draws(), l.complexity(0.1, 0.1));
    EXPECT_TRUE(l.proper);
}

TEST(Tolerant, ThresholdIdentity) {
    const Pmf d = gen_zipf_monotone(16, 1.0);
    DistAccess in = DistAccess::from_pmf(d, 1);
    const auto part = IntervalPartition::singletons(16);
    const auto r = tolerant_tester_from_corrector(exact_monotone_corrector(), surrogate_estimator_spec(part),
                                                  surrogate_tester_spec(part), 0.1, 0.5, 0.1, in, 2);
    EXPECT_NEAR(r.beta, 0.1, 1e-15);
    EXPECT_NEAR(r.threshold, 0.3, 1e-15);
    EXPECT_TRUE(r.tester_ran);
    EXPECT_TRUE(r.accept);
    EXPECT_EQ(in.draws(), surrogate_estimator_samples(part, r.beta, 0.1 / 3.0));
}

TEST(Tolerant, FarInputRejectedByEstimate) {
    // Mass piled on the last element: distance to monotone well above 0.5.
    std::vector<double> p(16, 0.01);
    p[15] = 0.85;
    DistAccess in = DistAccess::from_pmf(Pmf(p), 1);
    const auto part = IntervalPartition::singletons(16);
    const auto r = tolerant_tester_from_corrector(exact_monotone_corrector(), surrogate_estimator_spec(part),
                                                  surrogate_tester_spec(part), 0.1, 0.5, 0.1, in, 2);
    EXPECT_FALSE(r.accept);
    EXPECT_FALSE(r.tester_ran);
    EXPECT_GT(r.estimate, r.threshold);
}

TEST(Tolerant, RejectsBadRange) {
    DistAccess in = DistAccess::from_pmf(Pmf::uniform(4), 1);
    const auto part = IntervalPartition::singletons(4);
    EXPECT_THROW(tolerant_tester_from_corrector(exact_monotone_corrector(), surrogate_estimator_spec(part),
                                                surrogate_tester_spec(part), 0.5, 0.5, 0.1, in, 2),
                 ParameterError);
}

TEST(Surrogate, IdenticalInputs) {
    const auto part = birge_partition(200, 0.2);
    const Pmf d = gen_zipf_monotone(200, 1.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        DistAccess a = DistAccess::from_pmf(d, s), b = DistAccess::from_pmf(d, s + 100);
        EXPECT_LE(surrogate_distance_estimator(a, b, part, 0.05, 0.1), 0.05);
    }
}

TEST(Surrogate, KnownPairQuarter) {
    const auto part = IntervalPartition::singletons(8);
    const Pmf u = Pmf::uniform(8);
    const Pmf q({0.25, 0.25, 0.125, 0.125, 0.0625, 0.0625, 0.0625, 0.0625});
    ASSERT_NEAR(tv_distance(u, q), 0.25, 1e-15);
    int inside = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        DistAccess a = DistAccess::from_pmf(u, 2 * s), b = DistAccess::from_pmf(q, 2 * s + 1);
        const double e = surrogate_distance_estimator(a, b, part, 0.05, 0.1);
        if (e >= 0.20 && e <= 0.30) ++inside;
    }
    EXPECT_GE(inside, 190);
}

TEST(Surrogate, MonotoneAccepted) {
    const auto part = birge_partition(256, 0.1);
    const Pmf d = gen_geometric_monotone(256, 0.99);
    int accepts = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        DistAccess a = DistAccess::from_pmf(d, s);
        accepts += surrogate_monotonicity_tester(a, part, 0.1, 0.1) ? 1 : 0;
    }
    EXPECT_GE(accepts, 45);
}

TEST(Surrogate, ShortStreamReportsRequirement) {
    const auto part = IntervalPartition::singletons(4);
    DistAccess a = DistAccess::from_stream({1, 2}, 4), b = DistAccess::from_stream({1, 2}, 4);
    try {
        surrogate_distance_estimator(a, b, part, 0.1, 0.1);
        FAIL() << "expected InsufficientSamples";
    } catch (const InsufficientSamples& e) {
        EXPECT_EQ(e.required(), surrogate_estimator_samples(part, 0.1, 0.1));
    }
}
