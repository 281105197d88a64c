#pragma once

#include <cstddef>

#include "sampcorr/dist_core.hpp"
#include "sampcorr/rng.hpp"

namespace sampcorr {

Pmf gen_uniform(std::size_t n);
// p(x) proportional to x^-s
Pmf gen_zipf_monotone(std::size_t n, double s);
// p(x) proportional to q^(x-1)
Pmf gen_geometric_monotone(std::size_t n, double q);
// Random non-increasing staircase with the given number of steps.
Pmf gen_staircase(std::size_t n, std::size_t steps, CounterRng& rng);
// Uniform on the centered interval of length round((1-eps) n).
Pmf gen_interval_uniform(std::size_t n, double eps);
// Random non-increasing pmf (sorted random weights with a random power).
Pmf gen_random_monotone(std::size_t n, CounterRng& rng);

struct Fixture {
    Pmf pmf;
    double distance = 0.0;  // exact distance to monotone
};

// Mixture of a random monotone pmf with a tail bump, bisected to the requested distance.
Fixture gen_perturbed_monotone(std::size_t n, double dist, CounterRng& rng, double tol = 1e-9);
// Same construction around a given monotone base.
Fixture perturb_to_distance(const Pmf& base, double dist, CounterRng& rng, double tol = 1e-9);

// TV(result, U_n) == eps exactly; needs eps <= 1/2.
Pmf gen_near_uniform(std::size_t n, double eps, CounterRng& rng);
// (1-eps) U_H + eps Q with Q supported off H = <h>; TV to U_H == eps.
Pmf gen_near_subgroup(std::size_t n, std::size_t h, double eps, CounterRng& rng);

}  // namespace sampcorr
