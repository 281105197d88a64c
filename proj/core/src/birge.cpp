#include "sampcorr/birge.hpp"

#include <algorithm>
#include <cmath>

namespace sampcorr {

IntervalPartition::IntervalPartition(std::size_t n, std::vector<std::size_t> bounds, double alpha)
    : n_(n), alpha_(alpha), bounds_(std::move(bounds)) {
    if (n_ == 0) throw ParameterError("n must be >= 1");
    if (bounds_.empty() || bounds_.back() != n_) throw ParameterError("partition must end at n");
    std::size_t prev = 0;
    for (std::size_t b : bounds_) {
        if (b <= prev) throw ParameterError("partition bounds must be strictly increasing");
        prev = b;
    }
}

IntervalPartition IntervalPartition::singletons(std::size_t n) {
    std::vector<std::size_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = i + 1;
    return IntervalPartition(n, std::move(b));
}

std::vector<std::size_t> IntervalPartition::lengths() const {
    std::vector<std::size_t> out(ell());
    for (std::size_t k = 0; k < ell(); ++k) out[k] = length(k);
    return out;
}

std::size_t IntervalPartition::locate(std::size_t x) const {
    if (x < 1 || x > n_) throw ParameterError("element outside domain");
    return static_cast<std::size_t>(std::lower_bound(bounds_.begin(), bounds_.end(), x) - bounds_.begin());
}

IntervalPartition birge_partition(std::size_t n, double alpha) {
    if (n == 0) throw ParameterError("n must be >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
    std::vector<std::size_t> bounds;
    std::size_t covered = 0;
    double power = 1.0;
    while (covered < n) {
        power *= 1.0 + alpha;
        const std::size_t remaining = n - covered;
        std::size_t size = power >= static_cast<double>(remaining)
                               ? remaining + 1
                               : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(power)));
        if (size > remaining) size = remaining;
        covered += size;
        bounds.push_back(covered);
    }
    return IntervalPartition(n, std::move(bounds), alpha);
}

std::vector<double> interval_masses(const Pmf& d, const IntervalPartition& part) {
    if (d.n() != part.n()) throw ParameterError("partition size mismatch");
    std::vector<double> out(part.ell(), 0.0);
    for (std::size_t k = 0; k < part.ell(); ++k) out[k] = d.mass(part.left(k), part.right(k));
    return out;
}

std::vector<double> expand_levels(const std::vector<double>& levels, const IntervalPartition& part) {
    if (levels.size() != part.ell()) throw ParameterError("level count mismatch");
    std::vector<double> out(part.n());
    for (std::size_t k = 0; k < part.ell(); ++k)
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(part.left(k) - 1),
                  out.begin() + static_cast<std::ptrdiff_t>(part.right(k)), levels[k]);
    return out;
}

Pmf flatten(const Pmf& d, const IntervalPartition& part) {
    auto masses = interval_masses(d, part);
    for (std::size_t k = 0; k < part.ell(); ++k) masses[k] /= static_cast<double>(part.length(k));
    return Pmf::normalized(expand_levels(masses, part));
}

}  // namespace sampcorr
