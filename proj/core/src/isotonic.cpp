#include "sampcorr/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <utility>

namespace sampcorr {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;

// Dense tableau in canonical form. Column `cols` is the right-hand side.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    std::vector<double> reduced_costs(const std::vector<double>& cost) const {
        std::vector<double> d(cost);
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c < cols_; ++c) d[c] -= cb * at(r, c);
        }
        return d;
    }

    // Minimizes cost over the current face with Bland's rule; banned columns never enter.
    std::vector<double> minimize(const std::vector<double>& cost, const std::vector<char>& banned) {
        std::vector<char> in_basis(cols_, 0);
        for (;;) {
            std::fill(in_basis.begin(), in_basis.end(), 0);
            for (std::size_t b : basis_) in_basis[b] = 1;
            const auto d = reduced_costs(cost);
            std::size_t enter = cols_;
            for (std::size_t c = 0; c < cols_; ++c) {
                if (banned[c] || in_basis[c]) continue;
                if (d[c] < -kCostTol) {
                    enter = c;
                    break;
                }
            }
            if (enter == cols_) return d;
            std::size_t leave = rows_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double coef = at(r, enter);
                if (coef <= kPivotTol) continue;
                const double ratio = std::max(0.0, rhs(r)) / coef;
                if (leave == rows_ || ratio < best - 1e-14) {
                    best = ratio;
                    leave = r;
                } else if (ratio <= best + 1e-14 && basis_[r] < basis_[leave]) {
                    leave = r;
                }
            }
            if (leave == rows_) throw PromiseViolation("isotonic program unbounded");
            pivot(leave, enter);
        }
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
    std::vector<std::size_t> basis_;
};

void ban_positive(const std::vector<double>& d, const std::vector<std::size_t>& basis, std::vector<char>& banned) {
    std::vector<char> in_basis(d.size(), 0);
    for (std::size_t b : basis) in_basis[b] = 1;
    for (std::size_t c = 0; c < d.size(); ++c)
        if (!in_basis[c] && d[c] > kCostTol) banned[c] = 1;
}

// Value at mu of min over non-increasing x >= 0 of sum w (|x - h| - mu x), plus mu.
double dual_value(const std::vector<double>& h, const std::vector<double>& w, double mu) {
    using Break = std::pair<double, double>;  // (position, slope increase)
    std::priority_queue<Break> heap;
    heap.emplace(0.0, std::numeric_limits<double>::infinity());
    double base = 0.0;
    for (std::size_t j = h.size(); j-- > 0;) {
        const double wj = w[j];
        heap.emplace(h[j], 2.0 * wj);
        double r = wj * (1.0 - mu);
        double k = base - wj * mu * h[j];
        double ref = h[j];
        for (;;) {
            const Break top = heap.top();
            k += r * (top.first - ref);
            ref = top.first;
            if (top.second > r) {
                heap.pop();
                if (top.second - r > 0.0) heap.emplace(top.first, top.second - r);
                break;
            }
            heap.pop();
            r -= top.second;
        }
        base = k;
    }
    return mu + base;
}

}  // namespace

double WeightedHistogram::mass() const {
    double s = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) s += levels[j] * static_cast<double>(lengths[j]);
    return s;
}

void WeightedHistogram::validate() const {
    if (levels.empty()) throw ParameterError("histogram must have at least one interval");
    if (levels.size() != lengths.size()) throw ParameterError("levels and lengths differ in size");
    for (std::size_t j = 0; j < levels.size(); ++j) {
        if (lengths[j] == 0) throw ParameterError("interval lengths must be positive");
        if (!std::isfinite(levels[j]) || levels[j] < 0.0) throw ParameterError("levels must be non-negative");
    }
}

IsotonicResult closest_monotone_histogram(const WeightedHistogram& input) {
    input.validate();
    const double total = input.mass();
    if (!(total > 0.0)) throw ParameterError("histogram has zero mass");
    const std::size_t l = input.levels.size();
    std::vector<double> h(l), w(l), cum(l);
    double acc = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
        h[j] = input.levels[j] / total;
        w[j] = static_cast<double>(input.lengths[j]);
        acc += w[j];
        cum[j] = acc;
    }

    // Columns: y_0..y_{l-1}, u_0.., v_0.., artificial. x_k = sum_{i>=k} y_i.
    const std::size_t Y = 0, U = l, V = 2 * l, A = 3 * l, cols = 3 * l + 1;
    Tableau t(l + 1, cols);
    for (std::size_t j = 0; j < l; ++j) {
        for (std::size_t k = j; k < l; ++k) t.at(j, Y + k) = 1.0;
        t.at(j, U + j) = -1.0;
        t.at(j, V + j) = 1.0;
        t.rhs(j) = h[j];
        t.basis()[j] = V + j;
    }
    for (std::size_t k = 0; k < l; ++k) t.at(l, Y + k) = cum[k];
    t.at(l, A) = 1.0;
    t.rhs(l) = 1.0;
    t.basis()[l] = A;

    std::vector<char> banned(cols, 0);
    std::vector<double> cost(cols, 0.0);
    cost[A] = 1.0;
    t.minimize(cost, banned);
    banned[A] = 1;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.basis()[r] != A) continue;
        for (std::size_t c = 0; c < A; ++c) {
            if (std::abs(t.at(r, c)) > kPivotTol) {
                t.pivot(r, c);
                break;
            }
        }
    }

    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < l; ++j) cost[U + j] = cost[V + j] = w[j];
    ban_positive(t.minimize(cost, banned), t.basis(), banned);

    for (std::size_t k = 0; k < l; ++k) {
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t i = k; i < l; ++i) cost[Y + i] = -1.0;
        ban_positive(t.minimize(cost, banned), t.basis(), banned);
    }

    std::vector<double> y(l, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r)
        if (t.basis()[r] < l) y[t.basis()[r]] = std::max(0.0, t.rhs(r));
    IsotonicResult out;
    out.hist.lengths = input.lengths;
    out.hist.levels.assign(l, 0.0);
    double run = 0.0;
    for (std::size_t k = l; k-- > 0;) {
        run += y[k];
        out.hist.levels[k] = run;
    }
    const double m = out.hist.mass();
    for (double& x : out.hist.levels) x /= m;
    for (std::size_t j = 0; j < l; ++j) out.cost += w[j] * std::abs(out.hist.levels[j] - h[j]);
    return out;
}

double monotone_l1_cost(const std::vector<double>& levels, const std::vector<double>& weights) {
    if (levels.empty() || levels.size() != weights.size()) throw ParameterError("levels and weights differ in size");
    for (std::size_t j = 0; j < levels.size(); ++j)
        if (!(weights[j] > 0.0) || levels[j] < 0.0) throw ParameterError("invalid levels or weights");
    // Golden-section search; the dual is concave in mu.
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = -1.0, hi = 1.0;
    double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
    double f1 = dual_value(levels, weights, m1), f2 = dual_value(levels, weights, m2);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + r * (hi - lo);
            f2 = dual_value(levels, weights, m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - r * (hi - lo);
            f1 = dual_value(levels, weights, m1);
        }
    }
    double best = std::max({f1, f2, dual_value(levels, weights, 0.5 * (lo + hi))});
    best = std::max({best, dual_value(levels, weights, lo), dual_value(levels, weights, hi)});
    return std::max(0.0, best);
}

double distance_to_monotone_exact(const Pmf& d) {
    if (d.n() > 10000) throw CapabilityError("distance oracle limited to n <= 10000");
    if (is_monotone(d, 0.0)) return 0.0;
    return 0.5 * monotone_l1_cost(d.p(), std::vector<double>(d.n(), 1.0));
}

Pmf closest_monotone_pmf(const Pmf& d) {
    if (d.n() > 10000) throw CapabilityError("projection limited to n <= 10000");
    if (is_monotone(d, 0.0)) return d;
    WeightedHistogram h{d.p(), std::vector<std::size_t>(d.n(), 1)};
    return Pmf::normalized(closest_monotone_histogram(h).hist.levels);
}

Pmf project_flattened(const Pmf& d, const IntervalPartition& part) {
    auto masses = interval_masses(d, part);
    WeightedHistogram h{std::vector<double>(part.ell()), part.lengths()};
    for (std::size_t k = 0; k < part.ell(); ++k) h.levels[k] = masses[k] / static_cast<double>(part.length(k));
    return Pmf::normalized(expand_levels(closest_monotone_histogram(h).hist.levels, part));
}

}  // namespace sampcorr
