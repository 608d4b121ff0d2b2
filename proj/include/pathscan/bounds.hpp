#pragma once

// Information-theoretic lower bounds on the detection risk.
//
// The Bayes risk against a prior on paths obeys
//
//     risk >= 1 - (1/2) sqrt(E[exp(lambda(psi) |S ∩ T|)] - 1),
//
// with S, T independent prior draws and lambda(psi) an explicit rate that is
// finite only for |psi| < 1/9.  The exponential moment is consumed through
//two routes: the closed-form envelope Xi built from a measured exponential
// intersection tail (eta, c0), and direct Monte Carlo over prior pairs.
// Reports always say which route produced the number.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathscan/ar_model.hpp"
#include "pathscan/eit.hpp"
#include "pathscan/lattice.hpp"
#include "pathscan/likelihood.hpp"
#include "pathscan/path_class.hpp"
#include "pathscan/prior.hpp"
#include "pathscan/sample.hpp"
#include "pathscan/stats.hpp"

namespace pathscan {

/// Exponential-moment rate lambda(psi) = (1/4)[sqrt((1-|psi|)/(1-9|psi|))
/// - (1+|psi|)/(1-|psi|)].  Even in psi, zero at zero, increasing in |psi|;
/// requires |psi| < 1/9.
inline double lambda(double psi) {
    const double p = std::fabs(psi);
    if (!(p < 1.0 / 9.0))
        throw std::domain_error(
            "lambda: requires |psi| < 1/9 (beyond it the exponential moment "
            "rate is undefined)");
    return 0.25 * (std::sqrt((1.0 - p) / (1.0 - 9.0 * p)) -
                   (1.0 + p) / (1.0 - p));
}

/// Closed-form envelope on E[exp(a |S ∩ T|)] for a prior with exponential
/// intersection tails P(|S ∩ T| >= l) <= c0 eta^l (l >= 2):
/// Xi(a) = e^a + c0 (e^a - 1) e^a eta^2 / (1 - e^a eta).
inline double xi(double a, double eta, double c0) {
    if (!(a >= 0.0)) throw std::domain_error("xi: a must be >= 0");
    if (!(eta >= 0.0 && eta < 1.0))
        throw std::domain_error("xi: eta must lie in [0, 1)");
    if (!(c0 >= 0.0)) throw std::domain_error("xi: c0 must be >= 0");
    const double ea = std::exp(a);
    if (ea * eta >= 1.0)
        throw std::domain_error("xi: geometric series diverges (e^a * eta >= 1)");
    return ea + c0 * (ea - 1.0) * ea * eta * eta / (1.0 - ea * eta);
}

/// Risk lower bound from an exponential moment: max(0, 1 - sqrt(M - 1)/2).
inline double theorem1_bound(double psi, double exp_moment) {
    lambda(psi);  // domain check: |psi| < 1/9
    if (!(exp_moment >= 1.0))
        throw std::domain_error("theorem1_bound: exp_moment must be >= 1");
    return std::max(0.0, 1.0 - 0.5 * std::sqrt(exp_moment - 1.0));
}

enum class BoundRegime { kKnownStart, kUnknownStart, kGeneric };

inline const char* to_string(BoundRegime r) {
    switch (r) {
        case BoundRegime::kKnownStart: return "known_start";
        case BoundRegime::kUnknownStart: return "unknown_start";
        default: return "generic";
    }
}

enum class MomentRoute { kClosedFormXi, kMonteCarlo };

inline const char* to_string(MomentRoute r) {
    return r == MomentRoute::kClosedFormXi ? "closed_form_xi" : "monte_carlo";
}

struct LowerBoundReport {
    double psi = 0.0;
    double lambda_val = 0.0;
    BoundRegime regime = BoundRegime::kGeneric;
    MomentRoute route = MomentRoute::kClosedFormXi;
    bool vacuous = false;        // envelope series diverged at this psi
    double exp_moment = 1.0;     // meaningful only when !vacuous
    double risk_bound = 0.0;     // clamped to [0,1]; 0 when vacuous
    double eta = 0.0;            // closed-form route inputs
    double c0 = 0.0;
    std::uint64_t j_blocks = 0;  // unknown-start regime only
    std::uint64_t trials = 0;    // Monte Carlo route only
    Interval moment_ci;          // Monte Carlo route only
};

namespace detail {

inline void require_usable(const EITFit& eit, const char* where) {
    if (!eit.usable())
        throw std::domain_error(std::string(where) +
                                ": EIT fit is not usable (tail fit failed)");
}

}  // namespace detail

/// Bound for a known-start prior certified by an EIT envelope.  When the
/// envelope's geometric series diverges at this psi the report comes back
/// flagged vacuous (risk_bound 0) rather than erroring out: the bound says
/// nothing there, and reports must say so.
inline LowerBoundReport known_start_bound(double psi, const EITFit& eit) {
    detail::require_usable(eit, "known_start_bound");
    LowerBoundReport out;
    out.psi = psi;
    out.lambda_val = lambda(psi);
    out.regime = BoundRegime::kKnownStart;
    out.route = MomentRoute::kClosedFormXi;
    out.eta = eit.eta;
    out.c0 = eit.c0;
    if (std::exp(out.lambda_val) * eit.eta >= 1.0) {
        out.vacuous = true;
        out.risk_bound = 0.0;
        return out;
    }
    out.exp_moment = xi(out.lambda_val, eit.eta, eit.c0);
    out.risk_bound = theorem1_bound(psi, out.exp_moment);
    return out;
}

/// Unknown-start variant: J disjoint-support mixture blocks dilute the
/// intersections, E <= 1 + Xi(a)/J, so the bound improves to
/// 1 - sqrt(Xi/J)/2 and tends to 1 as J grows.
inline LowerBoundReport unknown_start_bound(double psi, const EITFit& eit,
                                            std::uint64_t j_blocks) {
    detail::require_usable(eit, "unknown_start_bound");
    if (j_blocks < 1)
        throw std::domain_error("unknown_start_bound: J must be >= 1");
    LowerBoundReport out;
    out.psi = psi;
    out.lambda_val = lambda(psi);
    out.regime = BoundRegime::kUnknownStart;
    out.route = MomentRoute::kClosedFormXi;
    out.eta = eit.eta;
    out.c0 = eit.c0;
    out.j_blocks = j_blocks;
    if (std::exp(out.lambda_val) * eit.eta >= 1.0) {
        out.vacuous = true;
        out.risk_bound = 0.0;
        return out;
    }
    const double xi_val = xi(out.lambda_val, eit.eta, eit.c0);
    out.exp_moment = 1.0 + xi_val / static_cast<double>(j_blocks);
    out.risk_bound = theorem1_bound(psi, out.exp_moment);
    return out;
}

/// Largest psi in (0, 1/9) where the known-start envelope still certifies
/// risk >= 1/2, i.e. e^{lambda} eta < 1 and Xi(lambda) <= 2.  Returns 0 when
/// even tiny psi fails, and the interval cap when nothing fails below it.
inline double critical_psi(const EITFit& eit) {
    detail::require_usable(eit, "critical_psi");
    const auto feasible = [&](double psi) {
        const double a = lambda(psi);
        if (std::exp(a) * eit.eta >= 1.0) return false;
        return xi(a, eit.eta, eit.c0) <= 2.0;
    };
    const double cap = (1.0 / 9.0) * (1.0 - 1e-12);
    double lo = 0.0;  // lambda(0) = 0, Xi(0) = 1 <= 2: always feasible
    if (feasible(cap)) return cap;
    double hi = cap;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct MomentEstimate {
    double estimate = 0.0;
    Interval ci;
    std::uint64_t trials = 0;
    bool heavy_tail = false;  // top decile carries > 50% of the mass
};

/// Direct Monte Carlo of E[exp(a |S ∩ T|)] over independent prior pairs.
/// The bootstrap CI is honest only for light tails; heavy_tail flags when
/// the top decile dominates and the interval should be distrusted.
inline MomentEstimate empirical_exp_moment(const PriorSampler& sampler,
                                           double a, std::uint64_t trials,
                                           std::uint64_t bootstrap_seed = 1) {
    if (!(a >= 0.0))
        throw std::domain_error("empirical_exp_moment: a must be >= 0");
    if (trials < 1000)
        throw std::domain_error("empirical_exp_moment: needs >= 1000 trials");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (std::uint64_t i = 0; i < trials; ++i) {
        const Path s = sampler.sample(2 * i);
        const Path t = sampler.sample(2 * i + 1);
        values.push_back(std::exp(
            a * static_cast<double>(intersection_size(s, t))));
    }
    MomentEstimate out;
    out.trials = trials;
    if (a == 0.0) {
        out.estimate = 1.0;  // exp(0) summands: exactly one, no MC noise
        out.ci = {1.0, 1.0};
        return out;
    }
    MeanEstimate boot = bootstrap_mean(values, bootstrap_seed);
    out.estimate = boot.mean;
    out.ci = boot.ci;
    out.heavy_tail = top_decile_dominates(values);
    return out;
}

/// Monte Carlo estimate of the exact Bayes risk 1 - E_0|L_nu - 1|/2 for a
/// uniform (or weighted) prior over an enumerable class.
///
/// Since E_0[L_nu] = 1, the identity E_0|L_nu - 1| = 2 E_0[(1 - L_nu)_+]
/// lets us average min(1, L_nu) instead of 1 - |L_nu - 1|/2.  The two have
/// the same expectation, but the absolute-difference form inherits the
/// heavy right tail of L_nu under the null: once the signal is strong, half
/// the total-variation mass sits on null draws too rare to ever sample, and
/// the realized average stalls near 1/2 for any feasible trial count.  The
/// positive-part form is bounded in [0, 1] and has no such tail.
inline MomentEstimate bayes_risk_estimate(
    const PathClass& pc, double psi, std::uint64_t trials, std::uint64_t seed,
    const std::vector<double>& weights = {},
    std::uint64_t budget = kDefaultEnumerationBudget) {
    if (trials < 100)
        throw std::domain_error("bayes_risk_estimate: needs >= 100 trials");
    CorrelationModel model(psi);
    const std::vector<Path> support = enumerate_paths(pc, budget);
    if (!weights.empty() && weights.size() != support.size())
        throw std::domain_error(
            "bayes_risk_estimate: weights must match the class size");

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (std::uint64_t i = 0; i < trials; ++i) {
        const Sample x = simulate_null(pc.lattice, seed, i);
        const double log_l =
            log_mixture_likelihood_ratio(x, support, model, weights);
        values.push_back(std::min(1.0, std::exp(log_l)));
    }
    MomentEstimate out;
    out.trials = trials;
    if (psi == 0.0) {
        out.estimate = 1.0;  // L identically 1
        out.ci = {1.0, 1.0};
        return out;
    }
    MeanEstimate boot = bootstrap_mean(values, seed);
    out.estimate = boot.mean;
    out.ci = boot.ci;
    return out;
}

inline nlohmann::json lower_bound_to_json(const LowerBoundReport& r) {
    nlohmann::json j{{"psi", r.psi},
                     {"lambda", r.lambda_val},
                     {"regime", to_string(r.regime)},
                     {"route", to_string(r.route)},
                     {"vacuous", r.vacuous},
                     {"risk_bound", r.risk_bound}};
    if (!r.vacuous) j["exp_moment"] = r.exp_moment;
    if (r.route == MomentRoute::kClosedFormXi) {
        j["eta"] = r.eta;
        j["c0"] = r.c0;
    } else {
        j["trials"] = r.trials;
        j["moment_ci"] = {r.moment_ci.lo, r.moment_ci.hi};
    }
    if (r.regime == BoundRegime::kUnknownStart) j["j_blocks"] = r.j_blocks;
    return j;
}

}  // namespace pathscan
