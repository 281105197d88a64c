#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sampcorr/rng.hpp"

// Elements of the domain are 1-based ({1..n}); vectors holding per-element
// values are 0-based, so p[x-1] is the mass of element x.
namespace sampcorr {

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input broke the promise an algorithm relies on, or a probabilistic step failed.
class PromiseViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
public:
    InsufficientSamples(std::size_t required, std::size_t available);
    std::size_t required() const { return required_; }
    std::size_t available() const { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

class Pmf {
public:
    Pmf() = default;
    // Validates non-negativity and |sum - 1| <= tol.
    explicit Pmf(std::vector<double> p, double tol = 1e-9);

    // Scales non-negative weights to sum 1; the applied |sum - 1| is kept.
    static Pmf normalized(std::vector<double> w);
    static Pmf uniform(std::size_t n);
    static Pmf point(std::size_t n, std::size_t x);

    std::size_t n() const { return p_.size(); }
    const std::vector<double>& p() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }
    double renormalization() const { return renorm_; }

    // D([a,b]) for 1-based inclusive bounds; empty when a > b.
    double mass(std::size_t a, std::size_t b) const;
    // D([1,j]); cdf(0) == 0.
    double cdf(std::size_t j) const;
    std::vector<double> prefix() const;

    bool operator==(const Pmf& o) const { return p_ == o.p_; }

private:
    std::vector<double> p_;
    double renorm_ = 0.0;
};

struct CorrectorParams {
    double eps = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double delta = 0.0;
    std::size_t batch = 1;

    void validate() const;
};

class DistAccess {
public:
    using Sampler = std::function<std::size_t()>;
    using Ceval = std::function<double(std::size_t)>;

    DistAccess(std::size_t n, Sampler sampler, Ceval ceval = {}, std::optional<Pmf> exact = std::nullopt,
               std::uint64_t seed = 0);

    // Sampler and ceval both derived from the pmf; draws are i.i.d. under seed.
    // With expose_exact = false the pmf itself is hidden, forcing sample-mode code paths.
    static DistAccess from_pmf(const Pmf& pmf, std::uint64_t seed, bool expose_exact = true);
    // Replays a finite sample stream; an optional cdf table (size n) enables ceval.
    static DistAccess from_stream(std::vector<std::size_t> samples, std::size_t n,
                                  std::optional<std::vector<double>> cdf_table = std::nullopt);

    std::size_t n() const { return n_; }
    std::uint64_t seed() const { return seed_; }
    bool has_sampler() const { return static_cast<bool>(sampler_); }
    bool has_ceval() const { return static_cast<bool>(ceval_); }
    bool has_exact() const { return exact_.has_value(); }
    const Pmf& exact() const;

    std::size_t draw();
    std::vector<std::size_t> draw_many(std::size_t m);
    double ceval(std::size_t j);

    std::size_t draws() const { return draws_; }
    std::size_t queries() const { return queries_; }
    // Remaining samples for finite streams; nullopt for unbounded samplers.
    std::optional<std::size_t> remaining() const;
    void require(std::size_t m) const;

private:
    std::size_t n_;
    Sampler sampler_;
    Ceval ceval_;
    std::optional<Pmf> exact_;
    std::uint64_t seed_;
    std::size_t draws_ = 0;
    std::size_t queries_ = 0;
    std::optional<std::size_t> stream_size_;
};

double tv_distance(const Pmf& p, const Pmf& q);
double kolmogorov_distance(const Pmf& p, const Pmf& q);
Pmf empirical_pmf(const std::vector<std::size_t>& samples, std::size_t n);
// Cyclic convolution on Z_n; element x stands for group element x-1.
Pmf convolve(const Pmf& p, const Pmf& q);
// k-fold self convolution (k >= 1) by repeated squaring.
Pmf convolve_power(const Pmf& p, std::size_t k);
// Smallest m with 2 exp(-2 m eps^2) <= delta.
std::size_t dkw_sample_count(double eps, double delta);

bool is_monotone(const std::vector<double>& v, double tol = 1e-12);
bool is_monotone(const Pmf& p, double tol = 1e-12);

// Index i with probability (prefix[i] - prefix[i-1]) / prefix.back(); prefix is inclusive.
std::size_t sample_index(const std::vector<double>& prefix_sums, CounterRng& rng);

}  // namespace sampcorr
