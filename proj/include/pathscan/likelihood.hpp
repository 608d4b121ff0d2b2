#pragma once

// Log likelihood ratios for a planted AR(1) path against the white-noise
// null.  Because only the path coordinates change law, the ratio depends on
// the observation vector through x_S alone:
//
//   log L_S(x) = (1/2) [ x_S^T x_S - x_S^T Gamma^{-1} x_S ] - (1/2) log det Gamma,
//
// evaluated in O(k) with the tridiagonal closed form.  Mixtures over a path
// class average the ratios with a log-sum-exp guard.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pathscan/ar_model.hpp"
#include "pathscan/lattice.hpp"
#include "pathscan/path_class.hpp"
#include "pathscan/sample.hpp"

namespace pathscan {

/// Core form on already-gathered path coordinates.
inline double log_likelihood_ratio_values(const std::vector<double>& x_path,
                                          double psi) {
    if (x_path.size() < 2)
        throw std::domain_error(
            "log_likelihood_ratio_values: need at least 2 coordinates");
    if (!(psi > -1.0 && psi < 1.0))
        throw std::domain_error(
            "log_likelihood_ratio_values: psi must lie in (-1, 1)");
    if (psi == 0.0) return 0.0;  // identical laws, exactly
    double xtx = 0.0;
    for (double v : x_path) xtx += v * v;
    const double k = static_cast<double>(x_path.size());
    const double log_det = (k - 1.0) * std::log1p(-psi * psi);
    return 0.5 * (xtx - quad_form_inverse(x_path, psi)) - 0.5 * log_det;
}

inline std::vector<double> gather_path(const Sample& sample, const Path& path) {
    std::vector<double> x;
    x.reserve(path.size());
    for (NodeId v : path) {
        if (v >= sample.values.size())
            throw std::domain_error("gather_path: node outside the sample");
        x.push_back(sample.values[static_cast<std::size_t>(v)]);
    }
    return x;
}

inline double log_likelihood_ratio(const Sample& sample, const Path& path,
                                   const CorrelationModel& model) {
    return log_likelihood_ratio_values(gather_path(sample, path), model.psi);
}

/// log of a weighted average of exp(llr) values, computed stably.  Empty
/// weights mean the uniform mixture.
inline double log_mixture_from_llrs(const std::vector<double>& llrs,
                                    const std::vector<double>& weights = {}) {
    if (llrs.empty())
        throw std::domain_error("log_mixture_from_llrs: empty mixture");
    if (!weights.empty() && weights.size() != llrs.size())
        throw std::domain_error(
            "log_mixture_from_llrs: weights must match llrs in length");
    const double peak = *std::max_element(llrs.begin(), llrs.end());
    double acc = 0.0;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < llrs.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w >= 0.0))
            throw std::domain_error(
                "log_mixture_from_llrs: weights must be non-negative");
        acc += w * std::exp(llrs[i] - peak);
        total_weight += w;
    }
    if (!(total_weight > 0.0))
        throw std::domain_error(
            "log_mixture_from_llrs: weights must not all vanish");
    return peak + std::log(acc / total_weight);
}

/// Uniform-mixture log likelihood ratio over an explicit list of paths.
inline double log_mixture_likelihood_ratio(const Sample& sample,
                                           const std::vector<Path>& paths,
                                           const CorrelationModel& model,
                                           const std::vector<double>& weights = {}) {
    std::vector<double> llrs;
    llrs.reserve(paths.size());
    for (const Path& p : paths)
        llrs.push_back(log_likelihood_ratio(sample, p, model));
    return log_mixture_from_llrs(llrs, weights);
}

/// Uniform mixture over a whole path class.  Enumeration must fit the
/// budget; otherwise the underlying enumerator refuses with BudgetError.
inline double log_mixture_likelihood_ratio(
    const Sample& sample, const PathClass& path_class,
    const CorrelationModel& model,
    std::uint64_t budget = kDefaultEnumerationBudget) {
    std::vector<double> llrs;
    enumerate_paths(
        path_class,
        [&](const Path& p) {
            llrs.push_back(log_likelihood_ratio(sample, p, model));
        },
        budget);
    return log_mixture_from_llrs(llrs);
}

}  // namespace pathscan
