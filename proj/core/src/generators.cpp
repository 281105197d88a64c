#include "sampcorr/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sampcorr/isotonic.hpp"

namespace sampcorr {

namespace {

void require_n(std::size_t n) {
    if (n == 0) throw ParameterError("n must be >= 1");
}

Pmf mix(const Pmf& a, const Pmf& b, double t) {
    std::vector<double> out(a.n());
    for (std::size_t i = 0; i < a.n(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
    return Pmf::normalized(std::move(out));
}

}  // namespace

Pmf gen_uniform(std::size_t n) { return Pmf::uniform(n); }

Pmf gen_zipf_monotone(std::size_t n, double s) {
    require_n(n);
    if (!(s >= 0.0)) throw ParameterError("zipf exponent must be non-negative");
    std::vector<double> w(n);
    for (std::size_t x = 1; x <= n; ++x) w[x - 1] = std::pow(static_cast<double>(x), -s);
    return Pmf::normalized(std::move(w));
}

Pmf gen_geometric_monotone(std::size_t n, double q) {
    require_n(n);
    if (!(q > 0.0 && q <= 1.0)) throw ParameterError("geometric ratio must lie in (0,1]");
    std::vector<double> w(n);
    double v = 1.0;
    for (std::size_t x = 0; x < n; ++x, v *= q) w[x] = v;
    return Pmf::normalized(std::move(w));
}

Pmf gen_staircase(std::size_t n, std::size_t steps, CounterRng& rng) {
    require_n(n);
    steps = std::clamp<std::size_t>(steps, 1, n);
    std::vector<std::size_t> cuts;
    while (cuts.size() + 1 < steps) {
        const std::size_t c = 1 + static_cast<std::size_t>(rng.below(n - 1));
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    cuts.push_back(n);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> levels(cuts.size());
    for (double& l : levels) l = rng.uniform() + 1e-3;
    std::sort(levels.begin(), levels.end(), std::greater<>());
    std::vector<double> w(n);
    std::size_t s = 0;
    for (std::size_t x = 0; x < n; ++x) {
        if (x >= cuts[s]) ++s;
        w[x] = levels[s];
    }
    return Pmf::normalized(std::move(w));
}

Pmf gen_interval_uniform(std::size_t n, double eps) {
    require_n(n);
    if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("eps must lie in [0,1)");
    const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround((1.0 - eps) * static_cast<double>(n))));
    const std::size_t start = (n - len) / 2;
    std::vector<double> w(n, 0.0);
    for (std::size_t x = start; x < start + len; ++x) w[x] = 1.0;
    return Pmf::normalized(std::move(w));
}

Pmf gen_random_monotone(std::size_t n, CounterRng& rng) {
    require_n(n);
    const double power = 0.5 + 3.0 * rng.uniform();
    std::vector<double> w(n);
    for (double& v : w) v = std::pow(rng.uniform(), power) + 1e-6;
    std::sort(w.begin(), w.end(), std::greater<>());
    return Pmf::normalized(std::move(w));
}

Fixture perturb_to_distance(const Pmf& base, double dist, CounterRng& rng, double tol) {
    const std::size_t n = base.n();
    if (!is_monotone(base, 0.0)) throw ParameterError("base must be monotone");
    if (!(dist >= 0.0 && dist < 1.0)) throw ParameterError("distance must lie in [0,1)");
    if (dist == 0.0) return {base, 0.0};
    std::vector<double> bump(n, 0.0);
    const std::size_t lo = n / 2 + static_cast<std::size_t>(rng.below(std::max<std::size_t>(1, n - n / 2)));
    const std::size_t width = 1 + static_cast<std::size_t>(rng.below(std::max<std::size_t>(1, (n - lo) / 4 + 1)));
    for (std::size_t x = lo; x < std::min(n, lo + width); ++x) bump[x] = 1.0;
    Pmf q = Pmf::normalized(bump);
    if (distance_to_monotone_exact(q) < dist) q = Pmf::point(n, n);
    if (distance_to_monotone_exact(q) < dist) throw ParameterError("requested distance is not reachable");
    // Illinois regula falsi on t -> distance(mix(base, q, t)) - dist, convex with value -dist at 0.
    double a = 0.0, fa = -dist;
    double b = 1.0, fb = distance_to_monotone_exact(q) - dist;
    Pmf cur = q;
    double d = fb + dist;
    int side = 0;
    for (int it = 0; it < 200 && std::abs(d - dist) > tol; ++it) {
        const double t = (a * fb - b * fa) / (fb - fa);
        cur = mix(base, q, t);
        d = distance_to_monotone_exact(cur);
        const double ft = d - dist;
        if (ft < 0.0) {
            a = t;
            fa = ft;
            if (side == -1) fb /= 2.0;
            side = -1;
        } else {
            b = t;
            fb = ft;
            if (side == 1) fa /= 2.0;
            side = 1;
        }
    }
    return {cur, d};
}

Fixture gen_perturbed_monotone(std::size_t n, double dist, CounterRng& rng, double tol) {
    return perturb_to_distance(gen_random_monotone(n, rng), dist, rng, tol);
}

Pmf gen_near_uniform(std::size_t n, double eps, CounterRng& rng) {
    require_n(n);
    if (!(eps >= 0.0 && eps <= 0.5)) throw ParameterError("eps must lie in [0, 1/2]");
    if (n < 2 || eps == 0.0) return Pmf::uniform(n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
    const std::size_t neg = n / 2 + n % 2, pos = n - neg;
    const double u = 1.0 / static_cast<double>(n);
    std::vector<double> p(n, u);
    for (std::size_t i = 0; i < neg; ++i) p[idx[i]] -= eps / static_cast<double>(neg);
    std::vector<double> w(pos);
    double ws = 0.0;
    for (double& v : w) ws += (v = rng.uniform() + 0.05);
    for (std::size_t i = 0; i < pos; ++i) p[idx[neg + i]] += eps * w[i] / ws;
    return Pmf::normalized(std::move(p));
}

Pmf gen_near_subgroup(std::size_t n, std::size_t h, double eps, CounterRng& rng) {
    require_n(n);
    if (h == 0 || n % h != 0) throw ParameterError("h must divide n");
    if (!(eps >= 0.0 && eps <= 1.0)) throw ParameterError("eps must lie in [0,1]");
    const std::size_t m = n / h;
    std::vector<double> p(n, 0.0), off(n, 0.0);
    double offsum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        if (x % h == 0)
            p[x] = (1.0 - eps) / static_cast<double>(m);
        else
            offsum += (off[x] = rng.uniform() + 0.01);
    }
    if (offsum == 0.0) return Pmf::normalized(std::move(p));
    for (std::size_t x = 0; x < n; ++x) p[x] += eps * off[x] / offsum;
    return Pmf::normalized(std::move(p));
}

}  // namespace sampcorr
