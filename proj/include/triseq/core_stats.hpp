#pragma once

// Streaming sufficient statistics, the Kullback-Leibler information number
// and the generalized likelihood ratio statistic for the normal mean
// problem with unknown variance.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace triseq {

/// Thrown when an operation needs a non-degenerate sample (n >= 2 and a
/// strictly positive variance estimate) and does not have one.
class degenerate_sample_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Separated one-sided hypotheses about a normal mean: H0: mu <= mu0
/// versus H1: mu >= mu1, with mu0 < mu1.
struct HypothesisSpec {
    double mu0;
    double mu1;

    HypothesisSpec(double mu0_, double mu1_) : mu0(mu0_), mu1(mu1_) {
        if (!(mu0 < mu1))
            throw std::invalid_argument("HypothesisSpec: require mu0 < mu1");
    }

    double mu(int i) const { return i == 0 ? mu0 : mu1; }
};

/// A-priori parameter box J = [mu_lo, mu_hi] x [var_lo, var_hi] with the
/// inflation margin eps used by the stopping windows (J_eps inflates the
/// box by eps in each coordinate).
struct ParameterBox {
    double mu_lo;
    double mu_hi;
    double var_lo;
    double var_hi;
    double eps;

    ParameterBox(double mu_lo_, double mu_hi_, double var_lo_, double var_hi_,
                 double eps_)
        : mu_lo(mu_lo_), mu_hi(mu_hi_), var_lo(var_lo_), var_hi(var_hi_),
          eps(eps_) {
        if (!(mu_lo < mu_hi))
            throw std::invalid_argument("ParameterBox: require mu_lo < mu_hi");
        if (!(0 < var_lo && var_lo <= var_hi))
            throw std::invalid_argument(
                "ParameterBox: require 0 < var_lo <= var_hi");
        if (!(0 < eps && eps < var_lo))
            throw std::invalid_argument(
                "ParameterBox: require 0 < eps < var_lo");
    }

    void require_encloses(const HypothesisSpec& spec) const {
        if (!(mu_lo < spec.mu0 && spec.mu1 < mu_hi))
            throw std::invalid_argument(
                "ParameterBox: require mu_lo < mu0 < mu1 < mu_hi");
    }

    bool contains(double mu, double var) const {
        return mu_lo <= mu && mu <= mu_hi && var_lo <= var && var <= var_hi;
    }

    /// Open inflated box J_eps.
    bool contains_inflated(double mu, double var) const {
        return mu_lo - eps < mu && mu < mu_hi + eps && var_lo - eps < var &&
               var < var_hi + eps;
    }
};

/// One-pass accumulator of (n, sample mean, centered sum of squares).
/// Uses the centered Welford update; the naive sum-of-squares form loses
/// digits exactly where the GLR sits near its threshold.
class SampleAccumulator {
public:
    SampleAccumulator() = default;

    SampleAccumulator push(double x) const {
        SampleAccumulator out = *this;
        out.n_ += 1;
        const double delta = x - out.mean_;
        out.mean_ += delta / static_cast<double>(out.n_);
        out.m2_ += delta * (x - out.mean_);
        return out;
    }

    void push_inplace(double x) {
        n_ += 1;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    /// Builds an accumulator directly from sufficient statistics.
    static SampleAccumulator from_moments(std::int64_t n, double mean,
                                          double m2) {
        if (n < 0 || m2 < 0)
            throw std::invalid_argument(
                "SampleAccumulator: require n >= 0 and m2 >= 0");
        SampleAccumulator acc;
        acc.n_ = n;
        acc.mean_ = mean;
        acc.m2_ = m2;
        return acc;
    }

    std::int64_t n() const { return n_; }
    double mean() const { return mean_; }
    double m2() const { return m2_; }

    /// MLE variance estimate, divisor n (not n-1).
    double variance() const {
        return n_ == 0 ? 0.0 : m2_ / static_cast<double>(n_);
    }

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Kullback-Leibler information number
///   I_i(u, v2) = (1/2) log(1 + (u - mu_i)^2 / v2),
/// the per-observation discrimination rate between N(u, v2) and the
/// closest normal with mean mu_i.
inline double kl_info(int i, double u, double v2, const HypothesisSpec& spec) {
    if (!(v2 > 0))
        throw std::domain_error("kl_info: require v2 > 0");
    const double d = u - spec.mu(i);
    // log1p keeps full precision for small displacements.
    return 0.5 * std::log1p(d * d / v2);
}

/// Log generalized likelihood ratio Lambda_{i,n} = n * I_i(mean, variance).
/// Requires n >= 2 and a strictly positive variance estimate.
inline double glr_stat(int i, const SampleAccumulator& acc,
                       const HypothesisSpec& spec) {
    if (acc.n() < 2)
        throw degenerate_sample_error("glr_stat: require n >= 2");
    const double v2 = acc.variance();
    if (!(v2 > 0))
        throw degenerate_sample_error("glr_stat: zero variance estimate");
    return static_cast<double>(acc.n()) * kl_info(i, acc.mean(), v2, spec);
}

} // namespace triseq
