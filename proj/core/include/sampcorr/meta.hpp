#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "sampcorr/birge.hpp"
#include "sampcorr/dist_core.hpp"

namespace sampcorr {

using Complexity = std::function<std::size_t(double eps, double delta)>;

struct LearnerSpec {
    std::function<Pmf(DistAccess&, double eps, double delta)> learn;
    Complexity complexity;
    bool proper = false;
};

struct TesterSpec {
    // true means ACCEPT
    std::function<bool(DistAccess&, double eps, double delta)> test;
    Complexity complexity;
};

struct EstimatorSpec {
    std::function<double(DistAccess&, DistAccess&, double eps, double delta)> estimate;
    Complexity complexity;
};

// A corrector hands back an oracle for the corrected distribution.
using Corrector = std::function<DistAccess(DistAccess& input, const CorrectorParams&, std::uint64_t seed)>;
using Projection = std::function<Pmf(const Pmf&)>;

// Learns at accuracy (eps1 - eps)/2, projects, and serves i.i.d. samples of the projection.
// Input draws stop after learning.
DistAccess corrector_from_learner(const LearnerSpec& learner, const Projection& project, const CorrectorParams& params,
                                  DistAccess& input, std::uint64_t seed);

// Runs the corrector at (opt_hat, opt_hat + eps, delta/2) and learns from its output.
Pmf agnostic_from_corrector(const Corrector& corrector, const LearnerSpec& learner, double opt_hat,
                            const CorrectorParams& params, DistAccess& input, std::uint64_t seed);

struct TolerantOutcome {
    bool accept = false;
    double beta = 0.0;
    double threshold = 0.0;
    double estimate = 0.0;
    bool tester_ran = false;
};

TolerantOutcome tolerant_tester_from_corrector(const Corrector& corrector, const EstimatorSpec& estimator,
                                               const TesterSpec& tester, double eps_prime, double eps, double delta,
                                               DistAccess& input, std::uint64_t seed);

// Interval-L1/2 between empirical histograms of both inputs, DKW at alpha/(2 l) each.
double surrogate_distance_estimator(DistAccess& a1, DistAccess& a2, const IntervalPartition& part, double alpha,
                                    double delta);
std::size_t surrogate_estimator_samples(const IntervalPartition& part, double alpha, double delta);
// ACCEPT iff the empirical flattened histogram is within alpha/2 of monotone.
bool surrogate_monotonicity_tester(DistAccess& access, const IntervalPartition& part, double alpha, double delta);
std::size_t surrogate_tester_samples(const IntervalPartition& part, double alpha, double delta);

// Flattened empirical at alpha = c*acc/3 from DKW at acc/6 (projection left to the caller).
LearnerSpec birge_flat_learner(double c);
// Flattened empirical at alpha = acc/2 with TV accuracy acc; proper variant projects to monotone.
LearnerSpec birge_tv_learner(std::size_t n, bool proper);
std::size_t birge_tv_samples(std::size_t n, double eps, double delta);

// Exact projection onto monotone; needs the exact pmf.
Corrector exact_monotone_corrector();
EstimatorSpec surrogate_estimator_spec(const IntervalPartition& part);
TesterSpec surrogate_tester_spec(const IntervalPartition& part);

}  // namespace sampcorr
