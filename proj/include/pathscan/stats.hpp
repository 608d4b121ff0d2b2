#pragma once

// Small statistical toolbox shared by the estimators and the experiment
// harness: 95% Wilson score intervals for binomial rates (well-behaved at
// zero counts, unlike Wald) and a percentile bootstrap for means.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pathscan/rng.hpp"

namespace pathscan {

/// Two-sided 95% normal quantile, Phi^{-1}(0.975).
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double radius() const { return 0.5 * (hi - lo); }
};

/// 95% Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) throw std::domain_error("wilson_interval: trials must be > 0");
    if (successes > trials)
        throw std::domain_error("wilson_interval: successes exceed trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double radius =
        (kZ95 / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    Interval out;
    // Pin the boundary counts: the closed form cancels to 0 (resp. 1) there
    // in exact arithmetic but can leave a one-ulp residue in floating point.
    out.lo = successes == 0 ? 0.0 : std::max(0.0, center - radius);
    out.hi = successes == trials ? 1.0 : std::min(1.0, center + radius);
    return out;
}

struct MeanEstimate {
    double mean = 0.0;
    Interval ci;
    std::uint64_t count = 0;
};

inline double mean_of(const std::vector<double>& values) {
    if (values.empty()) throw std::domain_error("mean_of: empty input");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

/// Percentile bootstrap 95% CI for the mean.  Deterministic given the seed;
/// resampling uses its own labelled counter stream so it never perturbs
/// simulation streams.
inline MeanEstimate bootstrap_mean(const std::vector<double>& values,
                                   std::uint64_t seed,
                                   int resamples = 1000) {
    if (values.size() < 2)
        throw std::domain_error("bootstrap_mean: need at least 2 values");
    if (resamples < 100)
        throw std::domain_error("bootstrap_mean: need at least 100 resamples");
    MeanEstimate out;
    out.count = values.size();
    out.mean = mean_of(values);

    CounterRng rng(seed, RngDomain::kBootstrap);
    const auto n = values.size();
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += values[static_cast<std::size_t>(
                rng.uniform_below(static_cast<std::uint64_t>(n)))];
        means[static_cast<std::size_t>(b)] = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const auto at = [&](double q) {
        const auto idx = static_cast<std::size_t>(
            q * static_cast<double>(resamples - 1) + 0.5);
        return means[std::min(idx, means.size() - 1)];
    };
    out.ci.lo = at(0.025);
    out.ci.hi = at(0.975);
    return out;
}

/// True when the largest decile of the (sorted) values carries more than
/// half the total mass — the reporting flag for heavy-tailed summands whose
/// bootstrap CI should be read with suspicion.
inline bool top_decile_dominates(std::vector<double> values) {
    if (values.empty()) throw std::domain_error("top_decile_dominates: empty input");
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= 0.0) return false;
    const std::size_t tail = std::max<std::size_t>(1, values.size() / 10);
    double top = 0.0;
    for (std::size_t i = values.size() - tail; i < values.size(); ++i)
        top += values[i];
    return top > 0.5 * total;
}

}  // namespace pathscan
