#include "sampcorr/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sampcorr {

namespace {

using Source = std::function<std::size_t()>;

constexpr std::size_t kMaxRejectionRounds = 64;

struct RejectionExhausted {};

std::size_t bits_for(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    return bits;
}

// Uniform element of {1..n} from coin flips; nullopt on FAIL.
std::optional<std::size_t> extract(const std::function<bool()>& coin, std::size_t n, std::size_t attempts) {
    if (n <= 1) return 1;
    const std::size_t bits = bits_for(n);
    for (std::size_t round = 0; round < kMaxRejectionRounds; ++round) {
        std::size_t value = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            bool got = false;
            for (std::size_t t = 0; t < attempts && !got; ++t) {
                const bool x = coin();
                const bool y = coin();
                if (x != y) {
                    value = (value << 1) | (x ? 1u : 0u);
                    got = true;
                }
            }
            if (!got) return std::nullopt;
        }
        if (value < n) return value + 1;
    }
    return std::nullopt;
}

std::size_t cyclic_sum(const Source& src, std::size_t n, std::size_t k) {
    std::size_t s = 0;
    for (std::size_t i = 0; i < k; ++i) s = (s + (src() - 1)) % n;
    return s + 1;
}

std::size_t hybrid_from(const Source& src, std::size_t n) {
    const std::size_t half = n / 2;
    const bool first = src() - 1 < half;
    const bool second = src() - 1 < half;
    if (first != second) return src();
    return cyclic_sum(src, n, 3);
}

std::size_t bootstrap_from(DistAccess& access, std::size_t n, std::size_t depth) {
    if (depth == 0) return access.draw();
    Source inner = [&access, n, depth]() { return bootstrap_from(access, n, depth - 1); };
    return hybrid_from(inner, n);
}

}  // namespace

void GroupSpec::validate() const {
    if (n == 0) throw ParameterError("group order must be >= 1");
    if (subgroup_gen && (*subgroup_gen == 0 || n % *subgroup_gen != 0))
        throw ParameterError("subgroup generator must divide n");
}

std::size_t convolution_order(double eps, double eps2) {
    if (!(eps >= 0.0 && eps < 1.0 / std::sqrt(2.0))) throw ParameterError("convolution improver needs eps < 1/sqrt(2)");
    if (!(eps2 > 0.0)) throw ParameterError("eps2 must be positive");
    if (eps <= eps2 || eps == 0.0) return 1;
    if (eps >= 0.5) throw ParameterError("for eps >= 1/2 the convolution bound does not decrease; eps2 < eps is unreachable");
    const double k = (std::log2(1.0 / eps2) - 1.0) / (std::log2(1.0 / eps) - 1.0);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(k - 1e-12)));
}

std::size_t bootstrap_depth(double eps, double eps2) {
    if (!(eps > 0.0 && eps <= 0.5)) throw ParameterError("bootstrap needs 0 < eps <= 1/2");
    if (!(eps2 > 0.0 && eps2 < eps)) throw ParameterError("bootstrap needs 0 < eps2 < eps");
    const double v = std::log2(eps / (eps2 * (1.0 - eps * eps)));
    return v <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(v - 1e-12));
}

ImproverSchedule make_schedule(double eps, double eps2) {
    ImproverSchedule s;
    s.k = convolution_order(eps, eps2);
    if (eps > 0.0 && eps <= 0.5 && eps2 < eps) {
        s.boot_k = bootstrap_depth(eps, eps2);
        s.boot_alpha = eps2 * eps * eps / 2.0;
    }
    return s;
}

std::size_t vn_attempts(double delta_per_bit, double c) {
    if (!(delta_per_bit > 0.0 && delta_per_bit < 1.0)) throw ParameterError("delta must lie in (0,1)");
    if (!(c > 0.0 && c < 1.0)) throw ParameterError("c must lie in (0,1)");
    return static_cast<std::size_t>(std::ceil(std::log(2.0 / delta_per_bit) / std::log(1.0 / (1.0 - c))));
}

Emission vn_sample(DistAccess& access, std::size_t n, double eps, double delta) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    if (!(eps >= 0.0 && eps < 0.5 - kVonNeumannC)) throw ParameterError("von Neumann corrector needs eps < 0.49");
    const std::size_t bits = std::max<std::size_t>(1, bits_for(n));
    const std::size_t attempts = vn_attempts(delta / static_cast<double>(bits));
    const std::size_t half = n / 2;
    auto coin = [&access, half]() { return access.draw() - 1 < half; };
    auto v = extract(coin, n, attempts);
    return v ? Emission{Emission::Status::Ok, *v} : Emission::fail();
}

std::size_t convolution_improve(DistAccess& access, std::size_t n, double eps, double eps2) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    const std::size_t k = convolution_order(eps, eps2);
    return cyclic_sum([&access]() { return access.draw(); }, n, k);
}

double hybrid_coin_bias(const Pmf& d) {
    const double d0 = d.mass(1, d.n() / 2);
    const double d1 = 1.0 - d0;
    return d0 * d0 + d1 * d1;
}

Pmf hybrid_exact(const Pmf& d) {
    const double p0 = hybrid_coin_bias(d);
    const Pmf d3 = convolve_power(d, 3);
    std::vector<double> out(d.n());
    for (std::size_t i = 0; i < d.n(); ++i) out[i] = (1.0 - p0) * d[i] + p0 * d3[i];
    return Pmf::normalized(std::move(out));
}

std::size_t hybrid_improve(DistAccess& access, std::size_t n, double eps) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    if (!(eps >= 0.0 && eps <= 0.5)) throw ParameterError("hybrid improver needs eps <= 1/2");
    return hybrid_from([&access]() { return access.draw(); }, n);
}

Pmf bootstrap_exact(const Pmf& d, std::size_t depth) {
    Pmf cur = d;
    for (std::size_t i = 0; i < depth; ++i) cur = hybrid_exact(cur);
    return cur;
}

std::size_t bootstrap_improve(DistAccess& access, std::size_t n, double eps, double eps2) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    return bootstrap_from(access, n, bootstrap_depth(eps, eps2));
}

double bootstrap_bound(double eps, double alpha, std::size_t k) {
    const double p = std::ldexp(1.0, -static_cast<int>(k));
    return eps * p + 2.0 * (1.0 - p) * alpha;
}

std::size_t subgroup_draws(double eps) {
    if (!(eps > 0.0 && eps < 0.49)) throw ParameterError("subgroup search needs 0 < eps < 0.49");
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::log2(1.0 / eps))));
}

std::size_t find_subgroup_generator(DistAccess& access, std::size_t n, double eps) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    std::size_t g = n;
    const std::size_t k = subgroup_draws(eps);
    for (std::size_t i = 0; i < k; ++i) g = std::gcd(g, access.draw() - 1);
    return g;
}

SubgroupImprover::SubgroupImprover(DistAccess& access, std::size_t n, const CorrectorParams& params, InnerImprover inner)
    : access_(&access), params_(params), inner_(inner) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    if (!(params.eps > 0.0 && params.eps < 0.49)) throw ParameterError("subgroup improver needs 0 < eps < 0.49");
    h_ = find_subgroup_generator(access, n, params.eps);
    const double q = static_cast<double>(std::max<std::size_t>(1, params.batch));
    budget_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::log(10.0 * q) / std::log(1.0 / (2.0 * params.eps)))));
}

Emission SubgroupImprover::sample() {
    const std::size_t m = subgroup_order();
    const std::size_t h = h_;
    const std::size_t budget = budget_;
    DistAccess* outer = access_;
    DistAccess inner(m, [outer, h, budget]() -> std::size_t {
        for (std::size_t t = 0; t < budget; ++t) {
            const std::size_t s = outer->draw() - 1;
            if (s % h == 0) return s / h + 1;
        }
        throw RejectionExhausted{};
    });
    try {
        std::size_t idx = 0;
        switch (inner_) {
            case InnerImprover::Convolution:
                idx = convolution_improve(inner, m, params_.eps, params_.eps2);
                break;
            case InnerImprover::Hybrid:
                idx = hybrid_improve(inner, m, params_.eps);
                break;
            case InnerImprover::Bootstrap:
                idx = bootstrap_improve(inner, m, params_.eps, params_.eps2);
                break;
            case InnerImprover::VonNeumann: {
                const Emission e = vn_sample(inner, m, params_.eps, params_.delta > 0.0 ? params_.delta : 0.05);
                if (!e.ok()) return e;
                idx = e.value;
                break;
            }
        }
        return {Emission::Status::Ok, (idx - 1) * h_ + 1};
    } catch (const RejectionExhausted&) {
        return Emission::fail();
    }
}

Emission subgroup_uniformity_improve(DistAccess& access, std::size_t n, const CorrectorParams& params) {
    SubgroupImprover imp(access, n, params);
    return imp.sample();
}

MonotoneExtractor::MonotoneExtractor(DistAccess& access, std::size_t n, double eps, double delta)
    : access_(&access), n_(n) {
    if (n != access.n()) throw ParameterError("domain size mismatch");
    if (!(eps > 0.0 && eps < 1.0 / 3.0)) throw ParameterError("extractor needs 0 < eps < 1/3");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
    const Pmf dhat = access.has_exact() ? access.exact()
                                        : empirical_pmf(access.draw_many(dkw_sample_count(eps / 4.0, delta / 2.0)), n);
    std::size_t quantile = n;
    double F = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        F += dhat[i - 1];
        if (F >= 1.0 - eps / 2.0 - 1e-12) {
            quantile = i;
            break;
        }
    }
    if (quantile == 1) {
        point_mass_ = true;
        return;
    }
    split_ = quantile - 1;
    const double c = std::clamp(std::min(eps / 4.0, 0.5 - 3.0 * eps), 1e-3, 0.5);
    const std::size_t bits = std::max<std::size_t>(1, bits_for(n));
    attempts_ = vn_attempts(delta / (2.0 * static_cast<double>(bits)), c);
}

Emission MonotoneExtractor::next() {
    if (point_mass_) return Emission::point_mass();
    DistAccess* a = access_;
    const std::size_t split = split_;
    auto v = extract([a, split]() { return a->draw() <= split; }, n_, attempts_);
    return v ? Emission{Emission::Status::Ok, *v} : Emission::fail();
}

Emission randomness_from_monotone(DistAccess& access, std::size_t n, double eps, double delta) {
    MonotoneExtractor ex(access, n, eps, delta);
    return ex.next();
}

}  // namespace sampcorr
