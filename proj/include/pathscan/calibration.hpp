#pragma once

// Threshold calibration for the increment-counting test.
//
// The test counts path increments with |X_{s_{j+1}} - X_{s_j}| <= sqrt(2) t
// and rejects when the best path collects more than k/2 of them.  Under the
// null each increment is a standard normal times sqrt(2), so a single count
// is Bernoulli(p_t) with p_t = 2 Phi(t) - 1.  Bennett's inequality turns the
// class-size union bound into the scalar equation
//
//     h(2 p_t) = max((8/k) log|C|, 1),     h(x) = x - log x - 1,
//
// solved on the p_t < 1/2 branch, where h(2 p_t) decreases strictly from
// +infinity (t -> 0) to 0 (p_t -> 1/2).  The solution is the largest
// admissible threshold on the branch the concentration step actually uses.

#include <cmath>
#include <stdexcept>

#include "pathscan/normal.hpp"

namespace pathscan {

/// p_t = P(|Z| <= t) = 2 Phi(t) - 1, evaluated as erf(t / sqrt 2) so small
/// thresholds keep full relative precision.
inline double pt(double t) {
    if (!(t >= 0.0)) throw std::domain_error("pt: t must be >= 0");
    return std::erf(t / kSqrt2);
}

/// h(x) = x - log x - 1: strictly decreasing on (0,1), zero at x = 1.
inline double h(double x) {
    if (!(x > 0.0)) throw std::domain_error("h: x must be > 0");
    return x - std::log(x) - 1.0;
}

/// Solves h(2 p_t) = max((8/k) log_card, 1) for t on the p_t in (0, 1/2)
/// branch by bisection (the target is >= 1 > 0, so the branch is always
/// crossed exactly once).  Converges to |dt| well under 1e-10.
inline double calibrate(int k, double log_card) {
    if (k < 2) throw std::domain_error("calibrate: k must be >= 2");
    if (!(log_card >= 0.0))
        throw std::domain_error("calibrate: log_card must be >= 0");
    const double target = std::max(8.0 * log_card / static_cast<double>(k), 1.0);

    // p_t = 1/2 exactly at t = Phi^{-1}(3/4); h(2 p_t) = h(1) = 0 there.
    // Extreme targets push t* below 1e-100, and halving from Phi^{-1}(3/4)
    // down to the subnormal floor costs ~1100 steps, so the cap must sit
    // above that; the loop still exits early at float resolution.
    double lo = 0.0;                       // h(2 p_t) -> +inf
    double hi = norm_quantile(0.75);       // h(2 p_t) = 0 < target
    for (int iter = 0; iter < 1200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at float resolution
        if (h(2.0 * pt(mid)) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Smallest correlation the power guarantee covers at threshold t:
/// 1 - (t / Phi^{-1}(4/5))^2.  May be negative, meaning every psi >= 0 works.
inline double psi_min(double t) {
    if (!(t > 0.0)) throw std::domain_error("psi_min: t must be > 0");
    const double q = norm_quantile(0.8);
    return 1.0 - (t / q) * (t / q);
}

}  // namespace pathscan
