#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sampcorr/birge.hpp"
#include "sampcorr/generators.hpp"
#include "sampcorr/isotonic.hpp"

using namespace sampcorr;

namespace {

// Brute force over a fine grid of non-increasing level sequences (l <= 3) with mass 1.
double grid_oracle(const std::vector<double>& h, const std::vector<double>& len, int steps) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t l = h.size();
    const double top = 1.0 / len[0];
    std::vector<double> g(l);
    auto cost = [&] {
        double c = 0.0;
        for (std::size_t k = 0; k < l; ++k) c += len[k] * std::abs(h[k] - g[k]);
        return c;
    };
    if (l == 2) {
        for (int a = 0; a <= steps; ++a) {
            g[0] = top * a / steps;
            g[1] = (1.0 - len[0] * g[0]) / len[1];
            if (g[1] >= -1e-12 && g[1] <= g[0] + 1e-12) best = std::min(best, cost());
        }
    } else if (l == 3) {
        for (int a = 0; a <= steps; ++a)
            for (int b = 0; b <= steps; ++b) {
                g[0] = top * a / steps;
                g[1] = top * b / steps;
                g[2] = (1.0 - len[0] * g[0] - len[1] * g[1]) / len[2];
                if (g[1] <= g[0] + 1e-12 && g[2] >= -1e-12 && g[2] <= g[1] + 1e-12) best = std::min(best, cost());
            }
    }
    return best;
}

}  // namespace

TEST(ClosestMonotone, MonotoneInputUnchanged) {
    const WeightedHistogram h{{0.5, 0.3, 0.2}, {1, 1, 1}};
    const auto r = closest_monotone_histogram(h);
    EXPECT_NEAR(r.cost, 0.0, 1e-15);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.hist.levels[k], h.levels[k], 1e-15);
}

TEST(ClosestMonotone, ThreePointExample) {
    const auto r = closest_monotone_histogram({{0.2, 0.5, 0.3}, {1, 1, 1}});
    EXPECT_NEAR(r.hist.levels[0], 0.35, 1e-12);
    EXPECT_NEAR(r.hist.levels[1], 0.35, 1e-12);
    EXPECT_NEAR(r.hist.levels[2], 0.3, 1e-12);
    EXPECT_NEAR(r.cost, 0.3, 1e-12);
    EXPECT_NEAR(r.tv(), 0.15, 1e-12);
}

TEST(ClosestMonotone, UnequalLengths) {
    const auto r = closest_monotone_histogram({{0.3, 0.35}, {1, 2}});
    EXPECT_NEAR(r.hist.levels[0], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.hist.levels[1], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.cost, 1.0 / 15.0, 1e-12);
}

TEST(ClosestMonotone, GapExample) {
    const Pmf d({0.5, 0.0, 0.0, 0.5});
    EXPECT_NEAR(distance_to_monotone_exact(d), 1.0 / 3.0, 1e-12);
    const Pmf m = closest_monotone_pmf(d);
    EXPECT_NEAR(m[0], 0.5, 1e-12);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(m[i], 1.0 / 6.0, 1e-12);
}

TEST(ClosestMonotone, RejectsZeroInput) {
    EXPECT_THROW(closest_monotone_histogram({{0.0, 0.0}, {1, 1}}), ParameterError);
    EXPECT_THROW(closest_monotone_histogram({{0.5}, {1, 1}}), ParameterError);
}

TEST(ClosestMonotone, MatchesGridOracle) {
    CounterRng rng(8);
    for (int t = 0; t < 40; ++t) {
        const std::size_t l = 2 + static_cast<std::size_t>(rng.below(2));
        WeightedHistogram h;
        std::vector<double> len;
        double mass = 0.0;
        for (std::size_t k = 0; k < l; ++k) {
            h.lengths.push_back(1 + rng.below(3));
            len.push_back(static_cast<double>(h.lengths.back()));
            h.levels.push_back(rng.uniform());
            mass += h.levels.back() * len.back();
        }
        for (double& v : h.levels) v /= mass;
        const auto r = closest_monotone_histogram(h);
        const double oracle = grid_oracle(h.levels, len, 400);
        // The grid only upper-bounds the optimum.
        EXPECT_LE(r.cost, oracle + 1e-12);
        EXPECT_GE(r.cost, oracle - 0.02);
        EXPECT_NEAR(r.cost, monotone_l1_cost(h.levels, len), 1e-12);
        EXPECT_TRUE(is_monotone(r.hist.levels, 1e-15));
        EXPECT_NEAR(r.hist.mass(), 1.0, 1e-12);
    }
}

TEST(DistanceToMonotone, Examples) {
    EXPECT_DOUBLE_EQ(distance_to_monotone_exact(Pmf({0.5, 0.3, 0.2})), 0.0);
    EXPECT_NEAR(distance_to_monotone_exact(Pmf({0.2, 0.5, 0.3})), 0.15, 1e-12);
    EXPECT_THROW(distance_to_monotone_exact(Pmf::uniform(10001)), CapabilityError);
}

TEST(DistanceToMonotone, DualMatchesSimplex) {
    CounterRng rng(12);
    for (int t = 0; t < 30; ++t) {
        const Pmf d = gen_near_uniform(40, 0.4, rng);
        const Pmf m = closest_monotone_pmf(d);
        EXPECT_TRUE(is_monotone(m, 1e-14));
        EXPECT_NEAR(distance_to_monotone_exact(d), tv_distance(d, m), 1e-12);
    }
}

TEST(DistanceToMonotone, FlatteningDoesNotIncrease) {
    CounterRng rng(13);
    const auto part = birge_partition(128, 0.2);
    for (int t = 0; t < 30; ++t) {
        const Pmf d = gen_near_uniform(128, 0.3, rng);
        EXPECT_LE(distance_to_monotone_exact(flatten(d, part)), distance_to_monotone_exact(d) + 1e-12);
    }
}

TEST(ProjectFlattened, MonotoneOnPartition) {
    CounterRng rng(14);
    const auto part = birge_partition(100, 0.3);
    const Pmf d = gen_near_uniform(100, 0.4, rng);
    const Pmf p = project_flattened(d, part);
    EXPECT_TRUE(is_monotone(p, 1e-14));
    const Pmf f = flatten(p, part);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(f[i], p[i], 1e-14);
}
