#include "sampcorr/missing_data.hpp"

#include <algorithm>
#include <cmath>

#include "sampcorr/isotonic.hpp"

namespace sampcorr {

namespace {

constexpr double kExactTol = 1e-12;

Pmf learn(DistAccess& access, double kolmogorov, double delta) {
    if (access.has_exact()) return access.exact();
    return empirical_pmf(access.draw_many(dkw_sample_count(kolmogorov, delta)), access.n());
}

// Largest gap between the empirical cdf of counts[lo..hi] and its least concave majorant.
double concavity_gap(const std::vector<double>& counts) {
    const std::size_t k = counts.size();
    std::vector<double> F(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) F[i + 1] = F[i] + counts[i];
    const double total = F[k];
    if (total <= 0.0) return 0.0;
    for (double& f : F) f /= total;
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i <= k; ++i) {
        while (hull.size() >= 2) {
            const std::size_t p = hull[hull.size() - 2], q = hull.back();
            const double cross = (F[q] - F[p]) * static_cast<double>(i - p) - (F[i] - F[p]) * static_cast<double>(q - p);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    double gap = 0.0;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const std::size_t p = hull[h], q = hull[h + 1];
        for (std::size_t i = p; i <= q; ++i) {
            const double lcm = F[p] + (F[q] - F[p]) * static_cast<double>(i - p) / static_cast<double>(q - p);
            gap = std::max(gap, lcm - F[i]);
        }
    }
    return gap;
}

}  // namespace

std::pair<Pmf, double> inject_missing(const Pmf& d, std::size_t i, std::size_t j) {
    if (i < 1 || i > j || j > d.n()) throw ParameterError("deletion interval must satisfy 1 <= i <= j <= n");
    const double w = d.mass(i, j);
    if (w >= 1.0 - 1e-15) throw ParameterError("deletion removes all mass");
    std::vector<double> p = d.p();
    for (std::size_t x = i; x <= j; ++x) p[x - 1] = 0.0;
    for (double& v : p) v /= 1.0 - w;
    return {Pmf::normalized(std::move(p)), w};
}

MissingDataReport detect_gap(DistAccess& access, double alpha, double delta) {
    if (!(alpha > 0.0 && alpha < 1.0 / 3.0)) throw ParameterError("alpha must lie in (0, 1/3)");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0,1)");
    const bool exact = access.has_exact();
    const std::size_t n = access.n();
    const double a3 = alpha * alpha * alpha;

    std::vector<std::size_t> samples;
    Pmf dhat;
    if (exact) {
        dhat = access.exact();
    } else {
        samples = access.draw_many(dkw_sample_count(a3 / 5.0, delta / 2.0));
        dhat = empirical_pmf(samples, n);
    }

    MissingDataReport rep;
    std::size_t r = 0;
    for (std::size_t x = n; x >= 1; --x) {
        if (dhat[x - 1] >= 4.0 * a3 / 5.0) {
            r = x;
            break;
        }
    }
    std::size_t zlo = 0, zhi = 0;
    for (std::size_t x = 1; x <= r; ++x) {
        if (dhat[x - 1] <= a3 / 5.0) {
            if (zlo == 0) zlo = x;
            zhi = x;
        }
    }
    if (zlo != 0) {
        rep.kind = MissingDataReport::Kind::Gap;
        rep.a = zlo;
        rep.b = zhi;
        return rep;
    }
    if (r >= n) return rep;

    // Intervals of estimated weight >= alpha^2 over [r+1, n]; the last runs to n.
    std::vector<std::size_t> rights;
    double acc = 0.0;
    for (std::size_t x = r + 1; x <= n; ++x) {
        acc += dhat[x - 1];
        if (acc >= alpha * alpha && x < n) {
            rights.push_back(x);
            acc = 0.0;
        }
    }
    rights.push_back(n);
    const std::size_t t = rights.size();

    std::vector<double> counts(n, 0.0);
    for (std::size_t s : samples) counts[s - 1] += 1.0;
    const double delta_test = delta / (2.0 * static_cast<double>(t));

    for (std::size_t l = 0; l < t; ++l) {
        const std::size_t lo = r + 1, hi = rights[l];
        bool reject;
        if (exact) {
            std::vector<double> cond(dhat.p().begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                     dhat.p().begin() + static_cast<std::ptrdiff_t>(hi));
            double mass = 0.0;
            for (double v : cond) mass += v;
            reject = mass > 0.0 && distance_to_monotone_exact(Pmf::normalized(cond)) > kExactTol;
        } else {
            std::vector<double> cond(counts.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                     counts.begin() + static_cast<std::ptrdiff_t>(hi));
            double m = 0.0;
            for (double v : cond) m += v;
            if (m <= 0.0) continue;
            const double eta = std::sqrt(std::log(2.0 / delta_test) / (2.0 * m));
            reject = concavity_gap(cond) > 2.0 * eta;
        }
        if (reject) {
            rep.kind = MissingDataReport::Kind::Gap;
            rep.a = l == 0 ? r + 1 : (l == 1 ? r + 1 : rights[l - 2] + 1);
            rep.b = rights[l];
            return rep;
        }
    }
    return rep;
}

MissingDataReport estimate_weights(DistAccess& access, const MissingDataReport& gap, double alpha, double delta,
                                   std::optional<double> eps) {
    if (gap.kind != MissingDataReport::Kind::Gap) throw ParameterError("weight estimation needs a gap report");
    const std::size_t n = access.n();
    if (gap.a < 1 || gap.a > gap.b || gap.b > n) throw ParameterError("invalid gap endpoints");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
    const double a3 = alpha * alpha * alpha;
    const Pmf dhat = learn(access, a3 / 2.0, delta);

    MissingDataReport rep = gap;
    rep.weighted = true;
    rep.gamma = gap.b < n ? std::clamp(dhat.mass(rep.j_left(), rep.j_right(n)), 0.0, 1.0) : 0.0;
    double tail = 0.0;
    rep.c = n;
    for (std::size_t x = n; x >= 1; --x) {
        tail += dhat[x - 1];
        if (tail >= rep.gamma) {
            rep.c = x;
            break;
        }
    }
    rep.gamma_prime = std::max(rep.gamma, dhat.mass(rep.c, n));
    if (eps && rep.gamma > 2.0 * *eps + 4.0 * a3)
        throw PromiseViolation("estimated gap-adjacent weight exceeds 2 eps + 4 alpha^3");
    return rep;
}

Pmf corrected_pmf_exact(const Pmf& dprime, const MissingDataReport& report) {
    if (report.kind == MissingDataReport::Kind::Close || report.gamma <= 0.0) return dprime;
    if (!report.weighted) throw ParameterError("report lacks weight estimates");
    const std::size_t n = dprime.n();
    const std::size_t jl = report.j_left(), jr = report.j_right(n);
    const double ratio = report.gamma_prime > 0.0 ? std::min(1.0, report.gamma / report.gamma_prime) : 0.0;
    // Same branch order as the sampler: K = [c,n] first, then J, else unchanged.
    const double kmass = dprime.mass(report.c, n);
    double jmass = 0.0;
    std::vector<double> p(n, 0.0);
    for (std::size_t x = 1; x <= n; ++x) {
        if (x >= report.c)
            p[x - 1] += (1.0 - ratio) * dprime[x - 1];
        else if (x >= jl && x <= jr)
            jmass += dprime[x - 1];
        else
            p[x - 1] += dprime[x - 1];
    }
    const double ilen = static_cast<double>(report.b - report.a + 1);
    for (std::size_t x = report.a; x <= report.b; ++x) p[x - 1] += ratio * kmass / ilen;
    if (jl <= jr)
        for (std::size_t x = jl; x <= jr; ++x) p[x - 1] += jmass / static_cast<double>(jr - jl + 1);
    return Pmf::normalized(std::move(p));
}

MissingDataImprover::MissingDataImprover(DistAccess& access, const CorrectorParams& params)
    : access_(&access), params_(params), alpha_(std::sqrt(params.eps2)) {
    if (!(params.eps > 0.0 && params.eps <= 1.0)) throw ParameterError("eps must lie in (0,1]");
    if (!(params.eps2 > 0.0 && params.eps2 < params.eps)) throw ParameterError("eps2 must lie in (0, eps)");
    if (!(alpha_ < 1.0 / 3.0)) throw ParameterError("eps2 too large: sqrt(eps2) must be below 1/3");
    const double delta = params.delta > 0.0 ? params.delta : 0.1;
    const std::size_t before = access.draws();
    report_ = detect_gap(access, alpha_, delta / 2.0);
    if (report_.kind == MissingDataReport::Kind::Gap) {
        report_ = estimate_weights(access, report_, alpha_, delta / 2.0);
        pass_ = report_.gamma < 5.0 * std::pow(params.eps2, 1.5);
    }
    pre_draws_ = access.draws() - before;
}

std::size_t MissingDataImprover::sample(CounterRng& rng) {
    const std::size_t x = access_->draw();
    if (pass_) return x;
    const std::size_t n = access_->n();
    if (x >= report_.c) {
        if (rng.bernoulli(report_.gamma / report_.gamma_prime))
            return report_.a + static_cast<std::size_t>(rng.below(report_.b - report_.a + 1));
        return x;
    }
    const std::size_t jl = report_.j_left(), jr = report_.j_right(n);
    if (x >= jl && x <= jr) return jl + static_cast<std::size_t>(rng.below(jr - jl + 1));
    return x;
}

std::vector<std::size_t> MissingDataImprover::batch(std::size_t q, CounterRng& rng) {
    access_->require(q);
    std::vector<std::size_t> out(q);
    for (auto& x : out) x = sample(rng);
    return out;
}

Pmf MissingDataImprover::materialize(const Pmf& dprime) const {
    if (pass_) return dprime;
    return corrected_pmf_exact(dprime, report_);
}

}  // namespace sampcorr
