#pragma once

#include <cstddef>
#include <vector>

#include "sampcorr/birge.hpp"
#include "sampcorr/dist_core.hpp"

namespace sampcorr {

// Levels are mass per element inside each interval.
struct WeightedHistogram {
    std::vector<double> levels;
    std::vector<std::size_t> lengths;

    double mass() const;
    void validate() const;
};

struct IsotonicResult {
    WeightedHistogram hist;
    double cost = 0.0;  // sum_j |I_j| * |x_j - h_j| against the normalized input
    double tv() const { return cost / 2.0; }
};

// Closest non-increasing histogram of mass 1 in length-weighted L1. The input is
// rescaled to mass 1 first. Among optimal solutions the lexicographically largest
// level sequence is returned.
IsotonicResult closest_monotone_histogram(const WeightedHistogram& h);

// Optimal value of the same program (no argmin), for arbitrary positive weights.
// Works on the Lagrangian dual, O(l log l) per evaluation.
double monotone_l1_cost(const std::vector<double>& levels, const std::vector<double>& weights);

// min over monotone M of TV(d, M); refuses n > 10^4.
double distance_to_monotone_exact(const Pmf& d);
// The monotone M attaining the distance, with the same tie-break as the histogram solver.
Pmf closest_monotone_pmf(const Pmf& d);

// Histogram of d on part, projected, then expanded back to a pmf on {1..n}.
Pmf project_flattened(const Pmf& d, const IntervalPartition& part);

}  // namespace sampcorr
