#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sampcorr/birge.hpp"
#include "sampcorr/dist_core.hpp"
#include "sampcorr/rng.hpp"

namespace sampcorr {

// ---- correcting by learning ----

// Samples drawn in sample mode: DKW count at Kolmogorov budget eps/6.
std::size_t learned_sample_count(double eps, double delta);

// Flattens at alpha = c*eps/3 and projects onto monotone histograms. Uses the exact pmf
// when the access exposes one, otherwise learns from learned_sample_count draws.
Pmf learned_corrector_build(DistAccess& access, double eps, double c, double delta = 0.1);

// ---- oblivious mixture corrector ----

// additive[j] is the mass added to interval j; output masses are lambda * (D(I_j) + additive[j]).
struct ObliviousPlan {
    std::vector<std::size_t> lengths;
    double eps = 0.0;
    std::vector<double> additive;
    double lambda = 1.0;

    // Any non-decreasing-or-not lengths; additive from the per-pair ratios.
    static ObliviousPlan build(std::vector<std::size_t> lengths, double eps);
    // Requires |I_{j+1}| / |I_j| == 1 + c for every j.
    static ObliviousPlan geometric(std::vector<std::size_t> lengths, double c, double eps);

    std::size_t k() const { return lengths.size(); }
};

// Corrected interval masses. Throws PromiseViolation when the input histogram is visibly
// farther than eps from monotone.
std::vector<double> oblivious_correct(const std::vector<double>& masses, const ObliviousPlan& plan);

// Promised distance for the sampler at accuracy eps_prime: eps'^3 / (10 log2^2 n).
double oblivious_promise(std::size_t n, double eps_prime);

class ObliviousSampler {
public:
    ObliviousSampler(std::size_t n, double eps_prime);
    // Explicit partition and plan distance eps.
    ObliviousSampler(IntervalPartition part, double eps);

    const IntervalPartition& partition() const { return part_; }
    const ObliviousPlan& plan() const { return plan_; }

    // One output; uses at most one draw from access.
    std::size_t sample(DistAccess& access, CounterRng& rng) const;
    // Output distribution for a known input pmf.
    Pmf materialize(const Pmf& d) const;

private:
    std::size_t uniform_in(std::size_t k, CounterRng& rng) const;

    IntervalPartition part_;
    ObliviousPlan plan_;
    std::vector<double> additive_prefix_;
};

std::size_t oblivious_corrector_sample(DistAccess& access, std::size_t n, double eps_prime, CounterRng& rng);

// ---- cdf-query water-filling corrector ----

// Levels are per element, non-increasing within each side.
struct BoundaryInput {
    std::vector<double> left_levels;
    std::vector<std::size_t> left_lengths;
    double left_average = 0.0;
    std::vector<double> right_levels;
    std::vector<std::size_t> right_lengths;
    double right_average = 0.0;
    double budget = 0.0;
};

struct BoundaryResult {
    enum class Kind { Met, FrontFill, Pour };
    Kind kind = Kind::Met;
    double fill_level = 0.0;   // left tail raised to this level
    double drain_level = 0.0;  // right top lowered to this level
    double moved = 0.0;        // mass carried from right to left
    double front_fill = 0.0;   // mass carried from right to the first bucket of the domain
    double poured = 0.0;       // budget spent
    double unused = 0.0;       // budget returned
};

// Closed-form water-fill between two adjacent staircases. Throws PromiseViolation when
// the budget cannot close the gap.
BoundaryResult water_boundary(const BoundaryInput& in);

struct BoundaryRecord {
    BoundaryResult result;
    // Weights over the buckets of T = (buckets of S_{j-1}) ++ (buckets of S_j).
    std::vector<double> weights;
    std::vector<double> weight_prefix;
};

class WaterfillState {
public:
    WaterfillState(DistAccess& access, double eps, std::size_t m);

    double eps() const { return eps_; }
    std::size_t m() const { return m_; }
    std::size_t K() const { return sb_first_.size(); }
    std::size_t K_nominal() const { return k_nominal_; }
    std::size_t L() const { return L_; }
    std::size_t ell() const { return part_.ell(); }
    const IntervalPartition& partition() const { return part_; }
    std::size_t first_bucket(std::size_t j) const { return sb_first_[j]; }
    std::size_t last_bucket(std::size_t j) const { return sb_last_[j]; }
    std::size_t superbucket_length(std::size_t j) const;

    const std::vector<double>& d1_masses() const { return d1_mass_; }
    const std::vector<double>& d2_masses() const { return d2_mass_; }
    const std::vector<double>& budgets() const { return budget_; }
    double lambda3() const { return lambda3_; }
    // D3(S_j) = lambda3 (D2(S_j) + b_j)
    double d3_mass(std::size_t j) const { return lambda3_ * (d2_mass_[j] + budget_[j]); }
    double average(std::size_t j) const { return d2_mass_[j] / static_cast<double>(superbucket_length(j)); }

    // Locally corrected bucket levels of S_j in D2 units (queries on first use).
    const std::vector<double>& local_levels(std::size_t j);
    // D2 bucket levels of S_j before local correction.
    std::vector<double> d2_levels(std::size_t j);
    // Boundary between S_{j-1} and S_j, j >= 1.
    const BoundaryRecord& boundary(std::size_t j);

    std::size_t sample(CounterRng& rng);
    // Exact output distribution (resolves every boundary).
    Pmf materialize();
    // Total poured budget; the unnormalized output has mass 1 + poured.
    double total_poured();

    std::size_t queries_used() const { return queries_; }
    std::size_t restarts() const { return restarts_; }

private:
    double F(std::size_t bucket_right);  // cdf at the right end of a bucket, memoized
    std::vector<double> d1_bucket_masses(std::size_t j);
    std::size_t uniform_in_bucket(std::size_t b, CounterRng& rng) const;

    DistAccess* access_;
    double eps_;
    std::size_t m_;
    IntervalPartition part_;
    std::size_t k_nominal_ = 0;
    std::size_t L_ = 0;
    std::vector<std::size_t> sb_first_, sb_last_;
    std::vector<std::optional<double>> cdf_cache_;  // per bucket index
    std::vector<double> d1_mass_, d2_mass_, budget_, d2_prefix_;
    double lambda3_ = 1.0;
    std::vector<std::optional<std::vector<double>>> local_;
    std::vector<std::optional<BoundaryRecord>> boundary_;
    std::size_t queries_ = 0;
    std::size_t restarts_ = 0;
};

WaterfillState waterfill_preprocess(DistAccess& access, double eps, std::size_t m);
const BoundaryRecord& water_boundary_correction(WaterfillState& state, std::size_t j);
std::size_t waterfill_sample(WaterfillState& state, CounterRng& rng);

}  // namespace sampcorr
