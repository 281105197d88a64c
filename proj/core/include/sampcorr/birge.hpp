#pragma once

#include <cstddef>
#include <vector>

#include "sampcorr/dist_core.hpp"

namespace sampcorr {

// Consecutive intervals covering {1..n}. Interval k (0-based) is [left(k), right(k)].
class IntervalPartition {
public:
    IntervalPartition() = default;
    // bounds: strictly increasing 1-based right endpoints, last equal to n.
    IntervalPartition(std::size_t n, std::vector<std::size_t> bounds, double alpha = 0.0);

    static IntervalPartition singletons(std::size_t n);

    std::size_t n() const { return n_; }
    double alpha() const { return alpha_; }
    std::size_t ell() const { return bounds_.size(); }
    const std::vector<std::size_t>& bounds() const { return bounds_; }

    std::size_t left(std::size_t k) const { return k == 0 ? 1 : bounds_[k - 1] + 1; }
    std::size_t right(std::size_t k) const { return bounds_[k]; }
    std::size_t length(std::size_t k) const { return right(k) - left(k) + 1; }
    std::vector<std::size_t> lengths() const;
    // Interval index holding element x.
    std::size_t locate(std::size_t x) const;

private:
    std::size_t n_ = 0;
    double alpha_ = 0.0;
    std::vector<std::size_t> bounds_;
};

// Sizes floor((1+alpha)^k) for k = 1, 2, ...; the interval that would overrun n is cut at n.
IntervalPartition birge_partition(std::size_t n, double alpha);

std::vector<double> interval_masses(const Pmf& d, const IntervalPartition& part);
// Per-element values from per-interval levels.
std::vector<double> expand_levels(const std::vector<double>& levels, const IntervalPartition& part);
Pmf flatten(const Pmf& d, const IntervalPartition& part);

}  // namespace sampcorr
