#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "sampcorr/dist_core.hpp"

// Improvers here take no randomness besides the input draws. Element x of {1..n}
// stands for the group element x-1 of Z_n.
namespace sampcorr {

struct Emission {
    enum class Status { Ok, Fail, PointMass };
    Status status = Status::Ok;
    std::size_t value = 0;

    bool ok() const { return status == Status::Ok; }
    static Emission fail() { return {Status::Fail, 0}; }
    static Emission point_mass() { return {Status::PointMass, 0}; }
};

struct GroupSpec {
    std::size_t n = 1;
    std::optional<std::size_t> subgroup_gen;

    void validate() const;
    std::size_t subgroup_order() const { return subgroup_gen ? n / *subgroup_gen : n; }
};

struct ImproverSchedule {
    std::size_t k = 1;          // convolution order
    std::size_t boot_k = 0;     // bootstrap depth
    double boot_alpha = 0.0;    // eps2 * eps^2 / 2
};

ImproverSchedule make_schedule(double eps, double eps2);
std::size_t convolution_order(double eps, double eps2);
std::size_t bootstrap_depth(double eps, double eps2);

// von Neumann bit extraction: each bit from pairs of coin flips until they differ.
inline constexpr double kVonNeumannC = 0.01;
std::size_t vn_attempts(double delta_per_bit, double c = kVonNeumannC);
Emission vn_sample(DistAccess& access, std::size_t n, double eps, double delta);

std::size_t convolution_improve(DistAccess& access, std::size_t n, double eps, double eps2);

// P[two draws land in the same half] = d0^2 + d1^2.
double hybrid_coin_bias(const Pmf& d);
Pmf hybrid_exact(const Pmf& d);
std::size_t hybrid_improve(DistAccess& access, std::size_t n, double eps);

Pmf bootstrap_exact(const Pmf& d, std::size_t depth);
std::size_t bootstrap_improve(DistAccess& access, std::size_t n, double eps, double eps2);
// Recurrence bound u_k = eps / 2^k + 2 (1 - 2^-k) alpha.
double bootstrap_bound(double eps, double alpha, std::size_t k);

// Draws used by find_subgroup_generator.
std::size_t subgroup_draws(double eps);
std::size_t find_subgroup_generator(DistAccess& access, std::size_t n, double eps);

enum class InnerImprover { Convolution, Hybrid, Bootstrap, VonNeumann };

class SubgroupImprover {
public:
    // params.eps: promised distance to U_H; params.eps2: target; params.batch: outputs planned.
    SubgroupImprover(DistAccess& access, std::size_t n, const CorrectorParams& params,
                     InnerImprover inner = InnerImprover::Convolution);

    std::size_t generator() const { return h_; }
    std::size_t subgroup_order() const { return access_->n() / h_; }
    std::size_t rejection_budget() const { return budget_; }
    Emission sample();

private:
    DistAccess* access_;
    CorrectorParams params_;
    InnerImprover inner_;
    std::size_t h_ = 1;
    std::size_t budget_ = 1;
};

Emission subgroup_uniformity_improve(DistAccess& access, std::size_t n, const CorrectorParams& params);

// Extraction from a distribution close to monotone; learns the split once.
class MonotoneExtractor {
public:
    MonotoneExtractor(DistAccess& access, std::size_t n, double eps, double delta);

    bool point_mass() const { return point_mass_; }
    // Elements [1, split] form the first coin face.
    std::size_t split() const { return split_; }
    std::size_t attempts_per_bit() const { return attempts_; }
    Emission next();

private:
    DistAccess* access_;
    std::size_t n_;
    bool point_mass_ = false;
    std::size_t split_ = 0;
    std::size_t attempts_ = 1;
};

Emission randomness_from_monotone(DistAccess& access, std::size_t n, double eps, double delta);

}  // namespace sampcorr
