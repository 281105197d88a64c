#include "sampcorr/dist_core.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

namespace sampcorr {

namespace {

std::string insufficient_message(std::size_t required, std::size_t available) {
    std::ostringstream os;
    os << "insufficient samples: required " << required << ", available " << available;
    return os.str();
}

void check_same_size(const Pmf& p, const Pmf& q) {
    if (p.n() != q.n()) throw ParameterError("domain size mismatch");
}

}  // namespace

InsufficientSamples::InsufficientSamples(std::size_t required, std::size_t available)
    : std::runtime_error(insufficient_message(required, available)), required_(required), available_(available) {}

Pmf::Pmf(std::vector<double> p, double tol) : p_(std::move(p)) {
    if (p_.empty()) throw ParameterError("pmf must have n >= 1");
    double sum = 0.0;
    for (double& v : p_) {
        if (!std::isfinite(v)) throw ParameterError("pmf entry is not finite");
        if (v < 0.0) {
            if (v < -1e-12) throw ParameterError("pmf entry is negative");
            v = 0.0;
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol) throw ParameterError("pmf does not sum to 1");
}

Pmf Pmf::normalized(std::vector<double> w) {
    if (w.empty()) throw ParameterError("pmf must have n >= 1");
    double sum = 0.0;
    for (double& v : w) {
        if (!std::isfinite(v) || v < -1e-12) throw ParameterError("weights must be finite and non-negative");
        v = std::max(v, 0.0);
        sum += v;
    }
    if (sum <= 0.0) throw ParameterError("weights sum to zero");
    for (double& v : w) v /= sum;
    Pmf out;
    out.p_ = std::move(w);
    out.renorm_ = std::abs(sum - 1.0);
    return out;
}

Pmf Pmf::uniform(std::size_t n) {
    if (n == 0) throw ParameterError("n must be >= 1");
    Pmf out;
    out.p_.assign(n, 1.0 / static_cast<double>(n));
    return out;
}

Pmf Pmf::point(std::size_t n, std::size_t x) {
    if (x < 1 || x > n) throw ParameterError("point outside domain");
    Pmf out;
    out.p_.assign(n, 0.0);
    out.p_[x - 1] = 1.0;
    return out;
}

double Pmf::mass(std::size_t a, std::size_t b) const {
    if (a < 1) a = 1;
    if (b > n()) b = n();
    if (a > b) return 0.0;
    double s = 0.0;
    for (std::size_t x = a; x <= b; ++x) s += p_[x - 1];
    return s;
}

double Pmf::cdf(std::size_t j) const {
    if (j >= n()) return 1.0;
    return mass(1, j);
}

std::vector<double> Pmf::prefix() const {
    std::vector<double> out(p_.size());
    std::partial_sum(p_.begin(), p_.end(), out.begin());
    return out;
}

void CorrectorParams::validate() const {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in [0,1]");
    if (!(delta >= 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in [0,1]");
    if (eps1 < 0.0 || eps2 < 0.0) throw ParameterError("eps1 and eps2 must be non-negative");
    if (batch < 1) throw ParameterError("batch must be >= 1");
    if (eps1 + eps2 + 1e-15 < eps) throw ParameterError("eps1 + eps2 must be at least eps");
}

DistAccess::DistAccess(std::size_t n, Sampler sampler, Ceval ceval, std::optional<Pmf> exact, std::uint64_t seed)
    : n_(n), sampler_(std::move(sampler)), ceval_(std::move(ceval)), exact_(std::move(exact)), seed_(seed) {
    if (n_ == 0) throw ParameterError("n must be >= 1");
    if (exact_ && exact_->n() != n_) throw ParameterError("exact pmf size mismatch");
}

DistAccess DistAccess::from_pmf(const Pmf& pmf, std::uint64_t seed, bool expose_exact) {
    auto prefix = std::make_shared<std::vector<double>>(pmf.prefix());
    auto rng = std::make_shared<CounterRng>(seed);
    Sampler sampler = [prefix, rng]() { return sample_index(*prefix, *rng) + 1; };
    Ceval ceval = [prefix](std::size_t j) -> double {
        if (j == 0) return 0.0;
        if (j >= prefix->size()) return 1.0;
        return std::min(1.0, (*prefix)[j - 1]);
    };
    return DistAccess(pmf.n(), std::move(sampler), std::move(ceval),
                      expose_exact ? std::optional<Pmf>(pmf) : std::nullopt, seed);
}

DistAccess DistAccess::from_stream(std::vector<std::size_t> samples, std::size_t n,
                                   std::optional<std::vector<double>> cdf_table) {
    for (std::size_t s : samples)
        if (s < 1 || s > n) throw ParameterError("sample outside domain");
    const std::size_t total = samples.size();
    auto data = std::make_shared<std::vector<std::size_t>>(std::move(samples));
    auto pos = std::make_shared<std::size_t>(0);
    Sampler sampler = [data, pos]() -> std::size_t {
        if (*pos >= data->size()) throw InsufficientSamples(*pos + 1, data->size());
        return (*data)[(*pos)++];
    };
    Ceval ceval;
    if (cdf_table) {
        if (cdf_table->size() != n) throw ParameterError("cdf table size mismatch");
        for (std::size_t j = 1; j < n; ++j)
            if ((*cdf_table)[j] + 1e-12 < (*cdf_table)[j - 1]) throw ParameterError("cdf table not monotone");
        auto table = std::make_shared<std::vector<double>>(std::move(*cdf_table));
        ceval = [table](std::size_t j) -> double {
            if (j == 0) return 0.0;
            if (j >= table->size()) return 1.0;
            return (*table)[j - 1];
        };
    }
    DistAccess access(n, std::move(sampler), std::move(ceval));
    access.stream_size_ = total;
    return access;
}

const Pmf& DistAccess::exact() const {
    if (!exact_) throw CapabilityError("exact pmf not available");
    return *exact_;
}

std::size_t DistAccess::draw() {
    if (!sampler_) throw CapabilityError("sampling oracle not available");
    std::size_t x = sampler_();
    ++draws_;
    return x;
}

std::vector<std::size_t> DistAccess::draw_many(std::size_t m) {
    require(m);
    std::vector<std::size_t> out(m);
    for (auto& x : out) x = draw();
    return out;
}

double DistAccess::ceval(std::size_t j) {
    if (!ceval_) throw CapabilityError("cdf oracle not available");
    ++queries_;
    return ceval_(j);
}

std::optional<std::size_t> DistAccess::remaining() const {
    if (!stream_size_) return std::nullopt;
    return *stream_size_ - std::min(*stream_size_, draws_);
}

void DistAccess::require(std::size_t m) const {
    if (!sampler_) throw CapabilityError("sampling oracle not available");
    auto left = remaining();
    if (left && *left < m) throw InsufficientSamples(m, *left);
}

double tv_distance(const Pmf& p, const Pmf& q) {
    check_same_size(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) s += std::abs(p[i] - q[i]);
    return std::min(1.0, 0.5 * s);
}

double kolmogorov_distance(const Pmf& p, const Pmf& q) {
    check_same_size(p, q);
    double fp = 0.0, fq = 0.0, best = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
        fp += p[i];
        fq += q[i];
        best = std::max(best, std::abs(fp - fq));
    }
    return std::min(1.0, best);
}

Pmf empirical_pmf(const std::vector<std::size_t>& samples, std::size_t n) {
    if (samples.empty()) throw ParameterError("at least one sample required");
    if (n == 0) throw ParameterError("n must be >= 1");
    std::vector<double> counts(n, 0.0);
    for (std::size_t s : samples) {
        if (s < 1 || s > n) throw ParameterError("sample outside domain");
        counts[s - 1] += 1.0;
    }
    const double m = static_cast<double>(samples.size());
    for (double& c : counts) c /= m;
    return Pmf(std::move(counts), 1e-9);
}

Pmf convolve(const Pmf& p, const Pmf& q) {
    check_same_size(p, q);
    const std::size_t n = p.n();
    std::vector<double> out(n, 0.0);
    for (std::size_t g = 0; g < n; ++g) {
        const double qg = q[g];
        if (qg == 0.0) continue;
        // x = g + y (mod n), so out[x] += p[y] * q[g]
        for (std::size_t y = 0; y < n; ++y) {
            std::size_t x = y + g;
            if (x >= n) x -= n;
            out[x] += p[y] * qg;
        }
    }
    return Pmf::normalized(std::move(out));
}

Pmf convolve_power(const Pmf& p, std::size_t k) {
    if (k == 0) throw ParameterError("convolution order must be >= 1");
    Pmf result;
    bool have = false;
    Pmf base = p;
    while (k > 0) {
        if (k & 1) {
            result = have ? convolve(result, base) : base;
            have = true;
        }
        k >>= 1;
        if (k > 0) base = convolve(base, base);
    }
    return result;
}

std::size_t dkw_sample_count(double eps, double delta) {
    if (!(eps > 0.0)) throw ParameterError("eps must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
    return static_cast<std::size_t>(std::ceil(std::log(2.0 / delta) / (2.0 * eps * eps)));
}

bool is_monotone(const std::vector<double>& v, double tol) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol) return false;
    return true;
}

bool is_monotone(const Pmf& p, double tol) { return is_monotone(p.p(), tol); }

std::size_t sample_index(const std::vector<double>& prefix_sums, CounterRng& rng) {
    if (prefix_sums.empty() || !(prefix_sums.back() > 0.0)) throw ParameterError("no mass to sample from");
    const double u = rng.uniform() * prefix_sums.back();
    auto it = std::upper_bound(prefix_sums.begin(), prefix_sums.end(), u);
    if (it == prefix_sums.end()) --it;
    std::size_t i = static_cast<std::size_t>(it - prefix_sums.begin());
    // skip zero-width cells that upper_bound may land on after rounding
    while (i > 0 && prefix_sums[i] == prefix_sums[i - 1]) --i;
    return i;
}

}  // namespace sampcorr
