#include "sampcorr/meta.hpp"

#include <cmath>

#include "sampcorr/isotonic.hpp"

namespace sampcorr {

namespace {

std::vector<double> empirical_interval_masses(DistAccess& access, const IntervalPartition& part, std::size_t m) {
    const auto samples = access.draw_many(m);
    std::vector<double> masses(part.ell(), 0.0);
    for (std::size_t s : samples) masses[part.locate(s)] += 1.0;
    for (double& v : masses) v /= static_cast<double>(m);
    return masses;
}

}  // namespace

DistAccess corrector_from_learner(const LearnerSpec& learner, const Projection& project, const CorrectorParams& params,
                                  DistAccess& input, std::uint64_t seed) {
    if (!(params.eps1 > params.eps)) throw ParameterError("corrector from learner needs eps1 > eps");
    const Pmf hypothesis = learner.learn(input, (params.eps1 - params.eps) / 2.0, params.delta);
    return DistAccess::from_pmf(project(hypothesis), seed);
}

Pmf agnostic_from_corrector(const Corrector& corrector, const LearnerSpec& learner, double opt_hat,
                            const CorrectorParams& params, DistAccess& input, std::uint64_t seed) {
    if (!(opt_hat >= 0.0)) throw ParameterError("opt_hat must be non-negative");
    if (!(params.eps > 0.0)) throw ParameterError("eps must be positive");
    CorrectorParams cp;
    cp.eps = opt_hat;
    cp.eps1 = opt_hat + params.eps;
    cp.delta = params.delta / 2.0;
    DistAccess corrected = corrector(input, cp, seed);
    return learner.learn(corrected, params.eps, params.delta / 2.0);
}

TolerantOutcome tolerant_tester_from_corrector(const Corrector& corrector, const EstimatorSpec& estimator,
                                               const TesterSpec& tester, double eps_prime, double eps, double delta,
                                               DistAccess& input, std::uint64_t seed) {
    if (!(eps_prime >= 0.0 && eps_prime < eps && eps <= 1.0)) throw ParameterError("need 0 <= eps' < eps <= 1");
    TolerantOutcome out;
    out.beta = (eps - eps_prime) / 4.0;
    out.threshold = (eps + eps_prime) / 2.0;
    CorrectorParams cp;
    cp.eps = eps_prime;
    cp.eps1 = out.threshold - out.beta;
    cp.delta = delta / 3.0;
    DistAccess corrected = corrector(input, cp, seed);
    out.estimate = estimator.estimate(input, corrected, out.beta, delta / 3.0);
    if (out.estimate > out.threshold) return out;
    out.tester_ran = true;
    out.accept = tester.test(corrected, out.beta, delta / 3.0);
    return out;
}

std::size_t surrogate_estimator_samples(const IntervalPartition& part, double alpha, double delta) {
    return dkw_sample_count(alpha / (2.0 * static_cast<double>(part.ell())), delta / 2.0);
}

double surrogate_distance_estimator(DistAccess& a1, DistAccess& a2, const IntervalPartition& part, double alpha,
                                    double delta) {
    if (a1.n() != part.n() || a2.n() != part.n()) throw ParameterError("partition size mismatch");
    const std::size_t m = surrogate_estimator_samples(part, alpha, delta);
    a1.require(m);
    a2.require(m);
    const auto m1 = empirical_interval_masses(a1, part, m);
    const auto m2 = empirical_interval_masses(a2, part, m);
    double s = 0.0;
    for (std::size_t k = 0; k < part.ell(); ++k) s += std::abs(m1[k] - m2[k]);
    return 0.5 * s;
}

std::size_t surrogate_tester_samples(const IntervalPartition& part, double alpha, double delta) {
    return dkw_sample_count(alpha / (4.0 * static_cast<double>(part.ell())), delta);
}

bool surrogate_monotonicity_tester(DistAccess& access, const IntervalPartition& part, double alpha, double delta) {
    if (access.n() != part.n()) throw ParameterError("partition size mismatch");
    const auto masses = empirical_interval_masses(access, part, surrogate_tester_samples(part, alpha, delta));
    std::vector<double> levels(part.ell());
    std::vector<double> weights(part.ell());
    for (std::size_t k = 0; k < part.ell(); ++k) {
        weights[k] = static_cast<double>(part.length(k));
        levels[k] = masses[k] / weights[k];
    }
    return 0.5 * monotone_l1_cost(levels, weights) <= alpha / 2.0;
}

LearnerSpec birge_flat_learner(double c) {
    LearnerSpec spec;
    spec.learn = [c](DistAccess& access, double acc, double delta) {
        const auto part = birge_partition(access.n(), c * acc / 3.0);
        const Pmf d = access.has_exact() ? access.exact()
                                         : empirical_pmf(access.draw_many(dkw_sample_count(acc / 6.0, delta)), access.n());
        return flatten(d, part);
    };
    spec.complexity = [](double acc, double delta) { return dkw_sample_count(acc / 6.0, delta); };
    return spec;
}

std::size_t birge_tv_samples(std::size_t n, double eps, double delta) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) throw ParameterError("invalid learner accuracy");
    const double l = static_cast<double>(birge_partition(n, eps / 2.0).ell());
    const double root = std::sqrt(l) + std::sqrt(2.0 * std::log(1.0 / delta));
    return static_cast<std::size_t>(std::ceil(root * root / (eps * eps)));
}

LearnerSpec birge_tv_learner(std::size_t n, bool proper) {
    LearnerSpec spec;
    spec.proper = proper;
    spec.learn = [n, proper](DistAccess& access, double acc, double delta) {
        if (access.n() != n) throw ParameterError("learner built for a different domain size");
        const auto part = birge_partition(access.n(), acc / 2.0);
        const Pmf d = empirical_pmf(access.draw_many(birge_tv_samples(access.n(), acc, delta)), access.n());
        return proper ? project_flattened(d, part) : flatten(d, part);
    };
    spec.complexity = [n](double acc, double delta) { return birge_tv_samples(n, acc, delta); };
    return spec;
}

Corrector exact_monotone_corrector() {
    return [](DistAccess& input, const CorrectorParams&, std::uint64_t seed) {
        return DistAccess::from_pmf(closest_monotone_pmf(input.exact()), seed);
    };
}

EstimatorSpec surrogate_estimator_spec(const IntervalPartition& part) {
    EstimatorSpec spec;
    spec.estimate = [part](DistAccess& a1, DistAccess& a2, double alpha, double delta) {
        return surrogate_distance_estimator(a1, a2, part, alpha, delta);
    };
    spec.complexity = [part](double alpha, double delta) { return surrogate_estimator_samples(part, alpha, delta); };
    return spec;
}

TesterSpec surrogate_tester_spec(const IntervalPartition& part) {
    TesterSpec spec;
    spec.test = [part](DistAccess& a, double alpha, double delta) {
        return surrogate_monotonicity_tester(a, part, alpha, delta);
    };
    spec.complexity = [part](double alpha, double delta) { return surrogate_tester_samples(part, alpha, delta); };
    return spec;
}

}  // namespace sampcorr
