#pragma once

// Design-time constants of the three-stage test: the sample-size surfaces
// n_i(u, v2) = A_i / I_i(u, v2), their crossing point mu2, the worst-case
// size n_bar, the total-sample cap m, the first-stage size N1 and the
// inflation factor rho_n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "triseq/core_stats.hpp"

namespace triseq {

struct DesignInputs {
    double a0;     // GLR threshold for H0, nats
    double a1;     // GLR threshold for H1, nats
    double c_frac; // first-stage fraction C, 0 < C <= 1
    double b_const; // rho_n constant B
    HypothesisSpec spec;
    ParameterBox box;

    DesignInputs(double a0_, double a1_, double c_frac_, double b_const_,
                 HypothesisSpec spec_, ParameterBox box_)
        : a0(a0_), a1(a1_), c_frac(c_frac_), b_const(b_const_), spec(spec_),
          box(box_) {
        if (!(a0 > 0 && a1 > 0))
            throw std::invalid_argument("DesignInputs: require A0, A1 > 0");
        if (!(0 < c_frac && c_frac <= 1))
            throw std::invalid_argument("DesignInputs: require 0 < C <= 1");
        if (!(b_const > 0))
            throw std::invalid_argument("DesignInputs: require B > 0");
        box.require_encloses(spec);
    }

    double a(int i) const { return i == 0 ? a0 : a1; }
};

/// Sample-size surface n_i(u, v2) = A_i / I_i(u, v2).
/// Returns +inf at u = mu_i where the information vanishes.
inline double surface(int i, double u, double v2, const DesignInputs& in) {
    const double info = kl_info(i, u, v2, in.spec);
    if (info == 0.0)
        return std::numeric_limits<double>::infinity();
    return in.a(i) / info;
}

/// n(u, v2) = min_i n_i(u, v2); finite for every u because the two
/// informations cannot vanish simultaneously.
inline double min_surface(double u, double v2, const DesignInputs& in) {
    return std::min(surface(0, u, v2, in), surface(1, u, v2, in));
}

/// rho_n = 1 + B sqrt(log(n) / n).
inline double rho(std::int64_t n, double b_const) {
    if (n < 1)
        throw std::domain_error("rho: require n >= 1");
    const double nd = static_cast<double>(n);
    return 1.0 + b_const * std::sqrt(std::log(nd) / nd);
}

/// Solves A0/A1 = I0(mu2, var_hi) / I1(mu2, var_hi) for mu2 in (mu0, mu1).
/// Bisection on log I0 - log I1 - log(A0/A1), which is strictly increasing
/// on the interval; the log form stays finite away from the endpoints.
inline double solve_mu2(const DesignInputs& in, double tol = 1e-10) {
    if (!(tol > 0))
        throw std::invalid_argument("solve_mu2: require tol > 0");
    const double mu0 = in.spec.mu0, mu1 = in.spec.mu1;
    const double v2 = in.box.var_hi;
    const double target = std::log(in.a0 / in.a1);
    const auto g = [&](double u) {
        return std::log(kl_info(0, u, v2, in.spec)) -
               std::log(kl_info(1, u, v2, in.spec)) - target;
    };
    const double delta = 1e-12 * (mu1 - mu0);
    double lo = mu0 + delta, hi = mu1 - delta;
    // g(lo) < 0 < g(hi) once delta is small enough. Bisect to the floating
    // point floor; tol is the guaranteed residual, and symmetric designs
    // land on the exact midpoint on the first step.
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// All derived design constants.
struct TestDesign {
    DesignInputs inputs;
    double mu2;          // surface crossing point
    double n_bar;        // n(mu2, var_hi), worst-case size
    std::int64_t m_cap;  // ceil(n_bar), total-sample cap
    std::int64_t n1;     // first-stage size
};

/// Computes mu2, n_bar = n(mu2, var_hi), m = ceil(n_bar) and
/// N1 = max(2, floor(C * min over the low-variance corners)), capped at m.
inline TestDesign make_design(const DesignInputs& in, double tol = 1e-10) {
    const double mu2 = solve_mu2(in, tol);
    const double n_bar = min_surface(mu2, in.box.var_hi, in);
    const auto m_cap = static_cast<std::int64_t>(std::ceil(n_bar));
    const double corner =
        std::min(min_surface(in.box.mu_hi, in.box.var_lo, in),
                 min_surface(in.box.mu_lo, in.box.var_lo, in));
    auto n1 = static_cast<std::int64_t>(std::floor(in.c_frac * corner));
    n1 = std::max<std::int64_t>(n1, 2);
    n1 = std::min(n1, m_cap);
    return TestDesign{in, mu2, n_bar, m_cap, n1};
}

} // namespace triseq
