#pragma once

// Empirical certification of exponential intersection tails: draw i.i.d.
// path pairs (S, T) from a prior, tabulate P(|S ∩ T| >= l), and fit the
// least-slope exponential envelope c0 * eta^l that dominates the table.
// The lower-bound calculator consumes the measured (c0, eta) rather than
// assuming published constants.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathscan/lattice.hpp"
#include "pathscan/prior.hpp"

namespace pathscan {

enum class EITStatus {
    kOk,          // envelope fitted: tail[l] <= c0 * eta^l for all l
    kAllZero,     // sampled pairs never intersect; envelope degenerate (c0 = 0)
    kFitFailure,  // tail does not decay (e.g. constant S = T); no envelope
};

inline std::string to_string(EITStatus s) {
    switch (s) {
        case EITStatus::kOk: return "ok";
        case EITStatus::kAllZero: return "all_zero";
        case EITStatus::kFitFailure: return "fit_failure";
    }
    return "unknown";
}

/// Measured intersection-tail table with its fitted exponential envelope.
struct EITFit {
    EITStatus status = EITStatus::kFitFailure;
    double eta = 0.0;           // decay rate in (0,1) when status == kOk
    double c0 = 0.0;            // prefactor; 0 when the table is all-zero
    std::vector<double> tail;   // tail[l-1] = empirical P(|S∩T| >= l), l = 1..k
    std::uint64_t trials = 0;

    /// True when the fit can feed the closed-form bound machinery.
    bool usable() const { return status != EITStatus::kFitFailure; }
};

/// Least-squares slope fit of log tail over l, intercept raised until the
/// envelope dominates the table pointwise.
inline EITFit fit_eit_envelope(const std::vector<double>& tail,
                               std::uint64_t trials) {
    EITFit fit;
    fit.tail = tail;
    fit.trials = trials;
    if (tail.empty()) throw std::domain_error("fit_eit_envelope: empty table");
    for (std::size_t i = 0; i + 1 < tail.size(); ++i)
        if (tail[i] < tail[i + 1])
            throw std::domain_error("fit_eit_envelope: tail table must be non-increasing");
    if (tail.front() > 1.0 || tail.back() < 0.0)
        throw std::domain_error("fit_eit_envelope: tail entries must lie in [0,1]");

    if (tail.front() == 0.0) {
        // Disjoint-support prior: all intersection mass at zero.
        fit.status = EITStatus::kAllZero;
        fit.eta = 0.0;
        fit.c0 = 0.0;
        return fit;
    }

    // Collect (l, log tail[l]) over positive entries.
    std::vector<double> ls, logs;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        if (tail[i] > 0.0) {
            ls.push_back(static_cast<double>(i + 1));
            logs.push_back(std::log(tail[i]));
        }
    }

    double eta;
    if (ls.size() < 2) {
        // A single positive entry fixes no slope; any eta < 1 gives a valid
        // envelope, and 1/2 is the documented convention.
        eta = 0.5;
    } else {
        double ml = 0.0, my = 0.0;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            ml += ls[i];
            my += logs[i];
        }
        ml /= static_cast<double>(ls.size());
        my /= static_cast<double>(ls.size());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ls.size(); ++i) {
            num += (ls[i] - ml) * (logs[i] - my);
            den += (ls[i] - ml) * (ls[i] - ml);
        }
        const double slope = num / den;
        eta = std::exp(slope);
    }

    if (!(eta < 1.0)) {
        // Tail does not decay (the S = T degenerate case gives slope 0).
        fit.status = EITStatus::kFitFailure;
        return fit;
    }

    // Positive intercept adjustment: raise c0 until the envelope dominates.
    double c0 = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i)
        if (tail[i] > 0.0)
            c0 = std::max(c0, tail[i] / std::pow(eta, static_cast<double>(i + 1)));

    fit.status = EITStatus::kOk;
    fit.eta = eta;
    fit.c0 = c0;
    return fit;
}

/// Draw `trials` i.i.d. pairs, tabulate the intersection tail for
/// l = 1..k, and fit the envelope.  Requires trials >= 1000.
inline EITFit estimate_eit(const PriorSampler& sampler, std::uint64_t trials) {
    if (trials < 1000)
        throw std::domain_error("estimate_eit: requires at least 1000 trials");
    const int k = sampler.k();
    std::vector<std::uint64_t> at_least(static_cast<std::size_t>(k) + 1, 0);
    for (std::uint64_t i = 0; i < trials; ++i) {
        const Path s = sampler.sample(2 * i);
        const Path t = sampler.sample(2 * i + 1);
        const std::size_t isz = intersection_size(s, t);
        for (std::size_t l = 1; l <= isz && l <= static_cast<std::size_t>(k); ++l)
            ++at_least[l];
    }
    std::vector<double> tail(static_cast<std::size_t>(k));
    for (int l = 1; l <= k; ++l)
        tail[static_cast<std::size_t>(l - 1)] =
            static_cast<double>(at_least[static_cast<std::size_t>(l)]) /
            static_cast<double>(trials);
    return fit_eit_envelope(tail, trials);
}

/// JSON form: {eta, c0, tail: [...], trials, status}.
inline nlohmann::json eit_to_json(const EITFit& fit) {
    return nlohmann::json{{"eta", fit.eta},
                          {"c0", fit.c0},
                          {"tail", fit.tail},
                          {"trials", fit.trials},
                          {"status", to_string(fit.status)}};
}

inline EITFit eit_from_json(const nlohmann::json& j) {
    EITFit fit;
    fit.eta = j.at("eta").get<double>();
    fit.c0 = j.at("c0").get<double>();
    fit.tail = j.at("tail").get<std::vector<double>>();
    fit.trials = j.at("trials").get<std::uint64_t>();
    const std::string status = j.value("status", "ok");
    if (status == "ok") fit.status = EITStatus::kOk;
    else if (status == "all_zero") fit.status = EITStatus::kAllZero;
    else fit.status = EITStatus::kFitFailure;
    return fit;
}

}  // namespace pathscan
