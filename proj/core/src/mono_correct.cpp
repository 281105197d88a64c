#include "sampcorr/mono_correct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sampcorr/isotonic.hpp"

namespace sampcorr {

namespace {

constexpr std::size_t kMaxRestarts = 1000000;

std::vector<double> prefix_of(const std::vector<double>& w) {
    std::vector<double> out(w.size());
    std::partial_sum(w.begin(), w.end(), out.begin());
    return out;
}

double fill_amount(const std::vector<double>& levels, const std::vector<std::size_t>& lengths, double v) {
    double s = 0.0;
    for (std::size_t b = 0; b < levels.size(); ++b)
        if (v > levels[b]) s += static_cast<double>(lengths[b]) * (v - levels[b]);
    return s;
}

double drain_amount(const std::vector<double>& levels, const std::vector<std::size_t>& lengths, double v) {
    double s = 0.0;
    for (std::size_t b = 0; b < levels.size(); ++b)
        if (levels[b] > v) s += static_cast<double>(lengths[b]) * (levels[b] - v);
    return s;
}

}  // namespace

// ---- correcting by learning ----

std::size_t learned_sample_count(double eps, double delta) { return dkw_sample_count(eps / 6.0, delta); }

Pmf learned_corrector_build(DistAccess& access, double eps, double c, double delta) {
    if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0,1)");
    if (!(c > 0.0)) throw ParameterError("c must be positive");
    const auto part = birge_partition(access.n(), c * eps / 3.0);
    if (access.has_exact()) return project_flattened(access.exact(), part);
    const std::size_t m = learned_sample_count(eps, delta);
    const Pmf learned = empirical_pmf(access.draw_many(m), access.n());
    return project_flattened(learned, part);
}

// ---- oblivious mixture corrector ----

ObliviousPlan ObliviousPlan::build(std::vector<std::size_t> lengths, double eps) {
    if (lengths.empty()) throw ParameterError("plan needs at least one interval");
    if (!(eps >= 0.0)) throw ParameterError("eps must be non-negative");
    for (std::size_t len : lengths)
        if (len == 0) throw ParameterError("interval lengths must be positive");
    ObliviousPlan plan;
    plan.lengths = std::move(lengths);
    plan.eps = eps;
    const std::size_t k = plan.lengths.size();
    plan.additive.assign(k, 0.0);
    for (std::size_t j = k - 1; j-- > 0;) {
        const double r = static_cast<double>(plan.lengths[j + 1]) / static_cast<double>(plan.lengths[j]);
        plan.additive[j] = (plan.additive[j + 1] + (1.0 + r) * eps) / std::min(1.0, r);
    }
    const double total = std::accumulate(plan.additive.begin(), plan.additive.end(), 0.0);
    if (total >= 1.0) throw ParameterError("eps too large for an oblivious plan over this many intervals");
    plan.lambda = 1.0 / (1.0 + total);
    return plan;
}

ObliviousPlan ObliviousPlan::geometric(std::vector<std::size_t> lengths, double c, double eps) {
    if (!(c >= 0.0)) throw ParameterError("c must be non-negative");
    for (std::size_t j = 0; j + 1 < lengths.size(); ++j) {
        const double r = static_cast<double>(lengths[j + 1]) / static_cast<double>(lengths[j]);
        if (std::abs(r - (1.0 + c)) > 1e-9) throw ParameterError("interval lengths do not grow by 1 + c");
    }
    return build(std::move(lengths), eps);
}

std::vector<double> oblivious_correct(const std::vector<double>& masses, const ObliviousPlan& plan) {
    if (masses.size() != plan.k()) throw ParameterError("mass count does not match plan");
    for (std::size_t j = 0; j + 1 < masses.size(); ++j) {
        const double r = static_cast<double>(plan.lengths[j + 1]) / static_cast<double>(plan.lengths[j]);
        if (masses[j + 1] > r * masses[j] + (1.0 + r) * plan.eps + 1e-12)
            throw PromiseViolation("histogram is farther than eps from monotone");
    }
    std::vector<double> out(masses.size());
    for (std::size_t j = 0; j < masses.size(); ++j) out[j] = plan.lambda * (masses[j] + plan.additive[j]);
    return out;
}

double oblivious_promise(std::size_t n, double eps_prime) {
    if (!(eps_prime > 0.0 && eps_prime <= 1.0)) throw ParameterError("eps' must lie in (0,1]");
    const double lg = std::max(1.0, std::log2(static_cast<double>(n)));
    return eps_prime * eps_prime * eps_prime / (10.0 * lg * lg);
}

ObliviousSampler::ObliviousSampler(std::size_t n, double eps_prime)
    : part_(birge_partition(n, eps_prime / 2.0)),
      plan_(ObliviousPlan::build(part_.lengths(), oblivious_promise(n, eps_prime))),
      additive_prefix_(prefix_of(plan_.additive)) {}

ObliviousSampler::ObliviousSampler(IntervalPartition part, double eps)
    : part_(std::move(part)),
      plan_(ObliviousPlan::build(part_.lengths(), eps)),
      additive_prefix_(prefix_of(plan_.additive)) {}

std::size_t ObliviousSampler::uniform_in(std::size_t k, CounterRng& rng) const {
    return part_.left(k) + static_cast<std::size_t>(rng.below(part_.length(k)));
}

std::size_t ObliviousSampler::sample(DistAccess& access, CounterRng& rng) const {
    if (access.n() != part_.n()) throw ParameterError("domain size mismatch");
    if (additive_prefix_.back() <= 0.0 || rng.bernoulli(plan_.lambda))
        return uniform_in(part_.locate(access.draw()), rng);
    return uniform_in(sample_index(additive_prefix_, rng), rng);
}

Pmf ObliviousSampler::materialize(const Pmf& d) const {
    auto masses = oblivious_correct(interval_masses(d, part_), plan_);
    for (std::size_t k = 0; k < part_.ell(); ++k) masses[k] /= static_cast<double>(part_.length(k));
    return Pmf::normalized(expand_levels(masses, part_));
}

std::size_t oblivious_corrector_sample(DistAccess& access, std::size_t n, double eps_prime, CounterRng& rng) {
    return ObliviousSampler(n, eps_prime).sample(access, rng);
}

// ---- water-filling ----

BoundaryResult water_boundary(const BoundaryInput& in) {
    if (in.left_levels.size() != in.left_lengths.size() || in.right_levels.size() != in.right_lengths.size())
        throw ParameterError("levels and lengths differ in size");
    const auto& gl = in.left_levels;
    const auto& ll = in.left_lengths;
    const auto& gr = in.right_levels;
    const auto& lr = in.right_lengths;
    const double aL = in.left_average, aR = in.right_average;
    const double tol = 1e-14;

    BoundaryResult out;
    const double fill_aL = fill_amount(gl, ll, aL), drain_aL = drain_amount(gr, lr, aL);
    const double fill_aR = fill_amount(gl, ll, aR), drain_aR = drain_amount(gr, lr, aR);
    if (fill_aL < drain_aL - tol) {
        out.kind = BoundaryResult::Kind::FrontFill;
        out.fill_level = out.drain_level = aL;
        out.moved = fill_aL;
        out.front_fill = drain_aL - fill_aL;
        out.unused = in.budget;
        return out;
    }
    if (drain_aR < fill_aR - tol) {
        out.kind = BoundaryResult::Kind::Pour;
        out.fill_level = out.drain_level = aR;
        out.moved = drain_aR;
        out.poured = fill_aR - drain_aR;
        if (out.poured > in.budget + 1e-12) throw PromiseViolation("water-fill ran dry: budget exhausted");
        out.unused = std::max(0.0, in.budget - out.poured);
        return out;
    }

    // Meeting level inside [min(aL,aR), max(aL,aR)]; fill - drain is increasing and piecewise linear.
    const double lo = std::min(aL, aR), hi = std::max(aL, aR);
    std::vector<double> pts{lo, hi};
    for (double g : gl)
        if (g > lo && g < hi) pts.push_back(g);
    for (double g : gr)
        if (g > lo && g < hi) pts.push_back(g);
    std::sort(pts.begin(), pts.end());
    auto phi = [&](double v) { return fill_amount(gl, ll, v) - drain_amount(gr, lr, v); };
    double v = lo;
    double prev = phi(pts[0]);
    if (prev < 0.0) {
        v = hi;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            const double cur = phi(pts[i]);
            if (cur >= 0.0) {
                v = cur == prev ? pts[i] : pts[i - 1] + (pts[i] - pts[i - 1]) * (-prev) / (cur - prev);
                break;
            }
            prev = cur;
        }
    }
    out.kind = BoundaryResult::Kind::Met;
    out.fill_level = out.drain_level = v;
    out.moved = fill_amount(gl, ll, v);
    out.unused = in.budget;
    return out;
}

WaterfillState::WaterfillState(DistAccess& access, double eps, std::size_t m)
    : access_(&access), eps_(eps), m_(m) {
    if (!access.has_ceval()) throw CapabilityError("water-filling corrector needs cdf queries");
    if (!(eps > 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in (0,1]");
    if (m == 0) throw ParameterError("m must be >= 1");
    part_ = birge_partition(access.n(), eps);
    const std::size_t l = part_.ell();
    k_nominal_ = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m) * static_cast<double>(l))));
    L_ = (l + k_nominal_ - 1) / k_nominal_;
    const std::size_t K = std::max<std::size_t>(1, l / L_);
    for (std::size_t j = 0; j < K; ++j) {
        sb_first_.push_back(j * L_);
        sb_last_.push_back(j + 1 == K ? l - 1 : (j + 1) * L_ - 1);
    }
    cdf_cache_.assign(l, std::nullopt);
    local_.assign(K, std::nullopt);
    boundary_.assign(K, std::nullopt);

    d1_mass_.resize(K);
    double prev = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
        const double cur = F(sb_last_[j]);
        d1_mass_[j] = std::max(0.0, cur - prev);
        prev = std::max(prev, cur);
    }
    WeightedHistogram h;
    for (std::size_t j = 0; j < K; ++j) {
        h.lengths.push_back(superbucket_length(j));
        h.levels.push_back(d1_mass_[j] / static_cast<double>(h.lengths.back()));
    }
    const auto proj = closest_monotone_histogram(h);
    d2_mass_.resize(K);
    budget_.resize(K);
    for (std::size_t j = 0; j < K; ++j) {
        d2_mass_[j] = proj.hist.levels[j] * static_cast<double>(h.lengths[j]);
        budget_[j] = d2_mass_[j] / (1.0 + eps_);
    }
    lambda3_ = 1.0 / (1.0 + std::accumulate(budget_.begin(), budget_.end(), 0.0));
    d2_prefix_ = prefix_of(d2_mass_);
}

std::size_t WaterfillState::superbucket_length(std::size_t j) const {
    return part_.right(sb_last_[j]) - part_.left(sb_first_[j]) + 1;
}

double WaterfillState::F(std::size_t bucket) {
    if (!cdf_cache_[bucket]) {
        cdf_cache_[bucket] = access_->ceval(part_.right(bucket));
        ++queries_;
    }
    return *cdf_cache_[bucket];
}

std::vector<double> WaterfillState::d1_bucket_masses(std::size_t j) {
    std::vector<double> out;
    double prev = sb_first_[j] == 0 ? 0.0 : F(sb_first_[j] - 1);
    for (std::size_t b = sb_first_[j]; b <= sb_last_[j]; ++b) {
        const double cur = F(b);
        out.push_back(std::max(0.0, cur - prev));
        prev = std::max(prev, cur);
    }
    return out;
}

std::vector<double> WaterfillState::d2_levels(std::size_t j) {
    const auto u = d1_bucket_masses(j);
    const double s = std::accumulate(u.begin(), u.end(), 0.0);
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double len = static_cast<double>(part_.length(sb_first_[j] + i));
        out[i] = s > 0.0 ? u[i] * d2_mass_[j] / s / len : average(j);
    }
    return out;
}

const std::vector<double>& WaterfillState::local_levels(std::size_t j) {
    if (local_[j]) return *local_[j];
    const std::size_t nb = sb_last_[j] - sb_first_[j] + 1;
    std::vector<double> levels(nb, 0.0);
    if (d2_mass_[j] > 0.0) {
        levels = d2_levels(j);
        if (nb > 1 && !is_monotone(levels, 0.0)) {
            WeightedHistogram h{levels, {}};
            for (std::size_t b = sb_first_[j]; b <= sb_last_[j]; ++b) h.lengths.push_back(part_.length(b));
            levels = closest_monotone_histogram(h).hist.levels;
            for (double& x : levels) x *= d2_mass_[j];
        }
    }
    local_[j] = std::move(levels);
    return *local_[j];
}

const BoundaryRecord& WaterfillState::boundary(std::size_t j) {
    if (j == 0 || j >= K()) throw ParameterError("boundary index must lie in [1, K)");
    if (boundary_[j]) return *boundary_[j];
    BoundaryInput in;
    in.left_levels = local_levels(j - 1);
    in.right_levels = local_levels(j);
    for (std::size_t b = sb_first_[j - 1]; b <= sb_last_[j - 1]; ++b) in.left_lengths.push_back(part_.length(b));
    for (std::size_t b = sb_first_[j]; b <= sb_last_[j]; ++b) in.right_lengths.push_back(part_.length(b));
    in.left_average = average(j - 1);
    in.right_average = average(j);
    in.budget = budget_[j];
    BoundaryRecord rec;
    rec.result = water_boundary(in);
    for (std::size_t i = 0; i < in.left_levels.size(); ++i) {
        const double g = in.left_levels[i];
        rec.weights.push_back(static_cast<double>(in.left_lengths[i]) * std::max(0.0, rec.result.fill_level - g));
    }
    for (std::size_t i = 0; i < in.right_levels.size(); ++i) {
        const double g = in.right_levels[i];
        rec.weights.push_back(static_cast<double>(in.right_lengths[i]) * std::min(g, rec.result.drain_level));
    }
    rec.weight_prefix = prefix_of(rec.weights);
    boundary_[j] = std::move(rec);
    return *boundary_[j];
}

std::size_t WaterfillState::uniform_in_bucket(std::size_t b, CounterRng& rng) const {
    return part_.left(b) + static_cast<std::size_t>(rng.below(part_.length(b)));
}

std::size_t WaterfillState::sample(CounterRng& rng) {
    for (std::size_t attempt = 0; attempt < kMaxRestarts; ++attempt) {
        const std::size_t j = sample_index(d2_prefix_, rng);
        const double unit = d2_mass_[j] + budget_[j];
        double u = rng.uniform() * unit;
        if (j == 0) {
            if (u < budget_[0]) {
                ++restarts_;
                continue;
            }
            const auto& g = local_levels(0);
            std::vector<double> w(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) w[i] = g[i] * static_cast<double>(part_.length(sb_first_[0] + i));
            return uniform_in_bucket(sb_first_[0] + sample_index(prefix_of(w), rng), rng);
        }
        const auto& rec = boundary(j);
        if (u < rec.result.unused) {
            ++restarts_;
            continue;
        }
        u -= rec.result.unused;
        if (u < rec.result.front_fill) return uniform_in_bucket(0, rng);
        const std::size_t t = sample_index(rec.weight_prefix, rng);
        const std::size_t left_count = sb_last_[j - 1] - sb_first_[j - 1] + 1;
        const std::size_t bucket = t < left_count ? sb_first_[j - 1] + t : sb_first_[j] + (t - left_count);
        return uniform_in_bucket(bucket, rng);
    }
    throw PromiseViolation("water-filling sampler exceeded restart limit");
}

Pmf WaterfillState::materialize() {
    std::vector<double> levels(part_.ell(), 0.0);
    double front = 0.0;
    for (std::size_t j = 0; j < K(); ++j) {
        const auto g = local_levels(j);
        const double h = j + 1 < K() ? boundary(j + 1).result.fill_level : -std::numeric_limits<double>::infinity();
        const double t = j > 0 ? boundary(j).result.drain_level : std::numeric_limits<double>::infinity();
        if (j > 0) front += boundary(j).result.front_fill;
        for (std::size_t i = 0; i < g.size(); ++i) levels[sb_first_[j] + i] = std::min(std::max(g[i], h), t);
    }
    levels[0] += front / static_cast<double>(part_.length(0));
    return Pmf::normalized(expand_levels(levels, part_));
}

double WaterfillState::total_poured() {
    double s = 0.0;
    for (std::size_t j = 1; j < K(); ++j) s += boundary(j).result.poured;
    return s;
}

WaterfillState waterfill_preprocess(DistAccess& access, double eps, std::size_t m) {
    return WaterfillState(access, eps, m);
}

const BoundaryRecord& water_boundary_correction(WaterfillState& state, std::size_t j) { return state.boundary(j); }

std::size_t waterfill_sample(WaterfillState& state, CounterRng& rng) { return state.sample(rng); }

}  // namespace sampcorr
