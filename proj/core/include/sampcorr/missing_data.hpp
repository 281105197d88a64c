#pragma once

#include <cstddef>
#include <optional>
#include <utility>

#include "sampcorr/dist_core.hpp"
#include "sampcorr/rng.hpp"

namespace sampcorr {

struct MissingDataReport {
    enum class Kind { Gap, Close };
    Kind kind = Kind::Close;
    std::size_t a = 0;
    std::size_t b = 0;
    // Filled in by estimate_weights.
    bool weighted = false;
    double gamma = 0.0;
    double gamma_prime = 0.0;
    std::size_t c = 0;

    // J = [b+1, min(2b-a+1, n)]; empty when b == n.
    std::size_t j_left() const { return b + 1; }
    std::size_t j_right(std::size_t n) const { return std::min(2 * b - a + 1, n); }
};

// D'(x) = D(x)/(1-w) off [i,j] and 0 on it; returns (D', w).
std::pair<Pmf, double> inject_missing(const Pmf& d, std::size_t i, std::size_t j);

// Uses the exact pmf when exposed, otherwise O(alpha^-6 log(1/delta)) draws.
MissingDataReport detect_gap(DistAccess& access, double alpha, double delta);

// eps, when given, enables the gamma <= 2 eps + 4 alpha^3 promise check.
MissingDataReport estimate_weights(DistAccess& access, const MissingDataReport& gap, double alpha, double delta,
                                   std::optional<double> eps = std::nullopt);

Pmf corrected_pmf_exact(const Pmf& dprime, const MissingDataReport& report);

class MissingDataImprover {
public:
    // params: eps (deletion budget), eps2 (< eps), delta. Preprocessing happens here.
    MissingDataImprover(DistAccess& access, const CorrectorParams& params);

    const MissingDataReport& report() const { return report_; }
    double alpha() const { return alpha_; }
    bool pass_through() const { return pass_; }
    std::size_t preprocessing_draws() const { return pre_draws_; }

    // One draw from the input per output.
    std::size_t sample(CounterRng& rng);
    std::vector<std::size_t> batch(std::size_t q, CounterRng& rng);
    // Output distribution for an input pmf under the fixed report.
    Pmf materialize(const Pmf& dprime) const;

private:
    DistAccess* access_;
    CorrectorParams params_;
    double alpha_;
    MissingDataReport report_;
    bool pass_ = true;
    std::size_t pre_draws_ = 0;
};

}  // namespace sampcorr
