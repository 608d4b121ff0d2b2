#pragma once

// Experiment orchestration: seeded Monte Carlo risk curves over a psi grid
// and moment diagnostics on a planted path.
//
// Determinism contract: every trial's sample is a pure function of
// (master seed, cell index, trial index), cells are numbered by sorted grid
// position, and reductions are sums of integers — so reports are
// byte-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pathscan/bounds.hpp"
#include "pathscan/calibration.hpp"
#include "pathscan/config.hpp"
#include "pathscan/eit.hpp"
#include "pathscan/errors.hpp"
#include "pathscan/prior.hpp"
#include "pathscan/sample.hpp"
#include "pathscan/scan.hpp"
#include "pathscan/stats.hpp"

namespace pathscan {

struct RiskRow {
    double psi = 0.0;
    double type_i = 0.0;
    Interval type_i_ci;
    double type_ii_worst = 0.0;   // worst planted path in the panel
    Interval type_ii_worst_ci;
    double type_ii_mean = 0.0;    // panel average
    Interval type_ii_mean_ci;
    double null_bound = 0.0;      // 2 exp(-k/8)
    double psi_min_t = 0.0;       // psi_min at the operating threshold
    double lower_bound = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t trials = 0;
};

struct RiskReport {
    ExperimentConfig config;
    double t = 0.0;               // operating threshold (calibrated or fixed)
    double log_cardinality = 0.0;
    std::uint64_t panel_size = 0;
    bool panel_exhaustive = false;
    bool engine_exact = false;
    std::vector<RiskRow> rows;    // sorted by psi
};

namespace detail {

/// Runs fn(trial) for trial in [0, trials) on `threads` workers in strided
/// assignment.  fn writes only to its own trial's slot, so the thread count
/// changes wall time, never values.
template <typename Fn>
inline void for_each_trial(std::uint64_t trials, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < trials; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_lock;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (std::uint64_t i = static_cast<std::uint64_t>(w);
                     i < trials; i += static_cast<std::uint64_t>(threads))
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> hold(error_lock);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline PathClass class_from_config(const ExperimentConfig& cfg,
                                   const TorusLattice& lat) {
    if (cfg.start_mode == StartMode::kKnown)
        return PathClass(lat, cfg.k, cfg.start, cfg.oriented);
    return PathClass(lat, cfg.k, cfg.oriented);
}

/// Uniform neighbor walk that retries until it produces a self-avoiding
/// path.  Used only for panels over free classes too large to enumerate;
/// the panel is a fixed seed-derived sample, not a uniform draw from the
/// class, and reports label it as such.
inline Path sample_free_path_rejection(const TorusLattice& lat, int length,
                                       NodeId start, CounterRng& rng) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        Path path{start};
        path.reserve(static_cast<std::size_t>(length));
        NodeId v = start;
        bool dead = false;
        for (int j = 1; j < length && !dead; ++j) {
            std::vector<NodeId> open;
            for (NodeId u : lat.neighbors(v))
                if (std::find(path.begin(), path.end(), u) == path.end())
                    open.push_back(u);
            if (open.empty()) {
                dead = true;
                break;
            }
            v = open[rng.uniform_below(open.size())];
            path.push_back(v);
        }
        if (!dead) return path;
    }
    throw std::domain_error(
        "panel: could not sample a self-avoiding path of length " +
        std::to_string(length) + " (class appears too constrained)");
}

/// The type-II panel: every path when the class enumerates within budget,
/// otherwise `panel` distinct seed-derived planted paths.
inline std::vector<Path> build_panel(const ExperimentConfig& cfg,
                                     const TorusLattice& lat,
                                     const PathClass& pc, bool* exhaustive) {
    const PathCount count = count_paths(pc, cfg.budget);
    if (count.exact && count.value <= cfg.budget) {
        *exhaustive = true;
        return enumerate_paths(pc, cfg.budget);
    }
    *exhaustive = false;
    std::set<Path> panel;
    CounterRng starts(cfg.seed, RngDomain::kPanel, /*label0=*/1);
    for (std::uint64_t draw = 0; panel.size() < cfg.panel; ++draw) {
        if (draw > 1000 * cfg.panel)
            throw std::domain_error(
                "panel: class yields too few distinct paths to fill the panel");
        const NodeId start =
            cfg.start_mode == StartMode::kKnown
                ? cfg.start
                : static_cast<NodeId>(starts.uniform_below(
                      static_cast<std::uint64_t>(lat.n())));
        CounterRng rng(cfg.seed, RngDomain::kPanel, /*label0=*/2, draw);
        panel.insert(cfg.oriented
                         ? sample_oriented_path_rejection(lat, cfg.k, start, rng)
                         : sample_free_path_rejection(lat, cfg.k, start, rng));
    }
    return {panel.begin(), panel.end()};
}

/// Accept/reject at an explicit threshold; Both rejects when either sign's
/// scan does.  (The calibrated path through run_test computes the same t.)
inline bool decide(const Sample& sample, const PathClass& pc, Sign sign,
                   const ScanEngine& engine, double t) {
    if (sign == Sign::kBoth) {
        if (scan(sample, pc, t, Sign::kPlus, engine).rejected) return true;
        return scan(sample, pc, t, Sign::kMinus, engine).rejected;
    }
    return scan(sample, pc, t, sign, engine).rejected;
}

/// The shared-start prior used for lower-bound columns; for a free class it
/// is still supported inside the class, so the Bayes bound stays valid.
inline std::unique_ptr<PriorSampler> bound_sampler(
    const ExperimentConfig& cfg, const TorusLattice& lat) {
    if (cfg.mixture_prior)
        return std::make_unique<HypercubeMixtureSampler>(lat, cfg.k,
                                                         cfg.seed + 1);
    const NodeId start = cfg.start_mode == StartMode::kKnown ? cfg.start : 0;
    return std::make_unique<OrientedUniformSampler>(lat, cfg.k, start,
                                                    cfg.seed + 1);
}

}  // namespace detail

inline RiskReport run_risk_curve(const ExperimentConfig& cfg) {
    validate(cfg);
    const TorusLattice lat(cfg.d, cfg.m);
    const PathClass pc = detail::class_from_config(cfg, lat);

    RiskReport report;
    report.config = cfg;
    report.log_cardinality = log_cardinality(pc, cfg.budget);
    const double log_adjusted = cfg.sign == Sign::kBoth
                                    ? report.log_cardinality + std::log(2.0)
                                    : report.log_cardinality;
    report.t = std::isnan(cfg.threshold) ? calibrate(cfg.k, log_adjusted)
                                         : cfg.threshold;
    report.engine_exact =
        cfg.engine.kind == EngineKind::kExhaustive ||
        (cfg.engine.kind == EngineKind::kOrientedDP && cfg.k <= cfg.m);

    const std::vector<Path> panel =
        detail::build_panel(cfg, lat, pc, &report.panel_exhaustive);
    report.panel_size = panel.size();

    // Optional lower-bound column: one EIT fit, reused across the grid.
    EITFit fit;
    std::uint64_t j_blocks = 0;
    if (cfg.lower_bound_columns) {
        const auto sampler = detail::bound_sampler(cfg, lat);
        fit = estimate_eit(*sampler, cfg.bound_trials);
        if (cfg.mixture_prior)
            j_blocks = static_cast<const HypercubeMixtureSampler&>(*sampler)
                           .block_count();
    }

    std::vector<double> grid = cfg.psi_grid;
    std::sort(grid.begin(), grid.end());

    // Null cell (index 0): the type-I estimate is grid-independent and is
    // computed once from its own stream.
    std::vector<char> null_hits(cfg.trials, 0);
    detail::for_each_trial(cfg.trials, cfg.threads, [&](std::uint64_t trial) {
        const Sample draw = simulate_null(lat, cfg.seed, trial, /*cell=*/0);
        null_hits[trial] =
            detail::decide(draw, pc, cfg.sign, cfg.engine, report.t) ? 1 : 0;
    });
    std::uint64_t false_alarms = 0;
    for (char h : null_hits) false_alarms += static_cast<std::uint64_t>(h);

    const double null_bound = 2.0 * std::exp(-static_cast<double>(cfg.k) / 8.0);
    const double psi_min_t = psi_min(report.t);

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        RiskRow row;
        row.psi = grid[gi];
        row.trials = cfg.trials;
        row.type_i = static_cast<double>(false_alarms) /
                     static_cast<double>(cfg.trials);
        row.type_i_ci = wilson_interval(false_alarms, cfg.trials);
        row.null_bound = null_bound;
        row.psi_min_t = psi_min_t;

        const CorrelationModel model(row.psi);
        std::uint64_t worst_misses = 0;
        std::uint64_t total_misses = 0;
        for (std::size_t pi = 0; pi < panel.size(); ++pi) {
            const std::uint64_t cell =
                1 + gi * panel.size() + pi;  // cell 0 is the null
            std::vector<char> misses(cfg.trials, 0);
            detail::for_each_trial(
                cfg.trials, cfg.threads, [&](std::uint64_t trial) {
                    const Sample draw = simulate_alternative(
                        lat, panel[pi], model, cfg.seed, trial, cell);
                    misses[trial] = detail::decide(draw, pc, cfg.sign,
                                                   cfg.engine, report.t)
                                        ? 0
                                        : 1;
                });
            std::uint64_t missed = 0;
            for (char h : misses) missed += static_cast<std::uint64_t>(h);
            total_misses += missed;
            worst_misses = std::max(worst_misses, missed);
        }
        row.type_ii_worst = static_cast<double>(worst_misses) /
                            static_cast<double>(cfg.trials);
        row.type_ii_worst_ci = wilson_interval(worst_misses, cfg.trials);
        const std::uint64_t pooled =
            cfg.trials * static_cast<std::uint64_t>(panel.size());
        row.type_ii_mean =
            static_cast<double>(total_misses) / static_cast<double>(pooled);
        row.type_ii_mean_ci = wilson_interval(total_misses, pooled);

        if (cfg.lower_bound_columns) {
            const LowerBoundReport bound =
                cfg.mixture_prior
                    ? unknown_start_bound(row.psi, fit, j_blocks)
                    : known_start_bound(row.psi, fit);
            row.lower_bound = bound.risk_bound;
        }
        report.rows.push_back(row);
    }
    return report;
}

struct MomentCell {
    double psi = 0.0;
    double t = 0.0;
    double q = 0.0;              // per-increment hit probability
    double expected_mean = 0.0;  // (k-1) q
    double mean = 0.0;
    Interval mean_ci;
    double variance = 0.0;
    double var_slack = 0.0;      // CI slack on the 3x-mean cap
    bool mean_ok = false;
    bool var_ok = false;
    bool applicable = false;     // psi >= psi_min(t)
    std::uint64_t trials = 0;
};

struct MomentReport {
    ExperimentConfig config;
    Path planted;
    std::vector<MomentCell> cells;  // sorted by psi
};

/// Monte Carlo check of the planted-path score moments: the mean must match
/// (k-1)(2 Phi(t / sqrt(1-psi)) - 1) within CI and the variance must stay
/// below three times the mean plus CI slack.  Both identities hold for any
/// |psi| < 1; cells additionally flag whether psi >= psi_min(t), the regime
/// the guarantees quote (there q >= 3/5).
inline MomentReport run_moment_check(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.start_mode != StartMode::kKnown)
        throw ConfigError(
            "class.start: the moment check plants a fixed path and needs a "
            "known start");
    const TorusLattice lat(cfg.d, cfg.m);
    const PathClass pc = detail::class_from_config(cfg, lat);

    MomentReport report;
    report.config = cfg;
    // The planted path: straight along axis 0 (k <= m makes it valid).
    report.planted.push_back(cfg.start);
    for (int j = 1; j < cfg.k; ++j)
        report.planted.push_back(lat.step(report.planted.back(), 0, +1));

    const double t = std::isnan(cfg.threshold)
                         ? calibrate(cfg.k, log_cardinality(pc, cfg.budget))
                         : cfg.threshold;
    const double floor = psi_min(t);

    std::vector<double> grid = cfg.psi_grid;
    std::sort(grid.begin(), grid.end());

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        MomentCell cell;
        cell.psi = grid[gi];
        cell.t = t;
        cell.trials = cfg.trials;
        cell.q = pt(t / std::sqrt(1.0 - cell.psi));
        cell.expected_mean = static_cast<double>(cfg.k - 1) * cell.q;
        cell.applicable = cell.psi >= floor;

        const CorrelationModel model(cell.psi);
        std::vector<double> scores(cfg.trials, 0.0);
        detail::for_each_trial(
            cfg.trials, cfg.threads, [&](std::uint64_t trial) {
                const Sample draw = simulate_alternative(
                    lat, report.planted, model, cfg.seed, trial, gi);
                scores[trial] = static_cast<double>(
                    pair_score(draw, report.planted, t, Sign::kPlus));
            });

        // Scores are small integers, so these sums are exact and
        // order-independent.
        const double n = static_cast<double>(cfg.trials);
        double sum = 0.0;
        for (double v : scores) sum += v;
        cell.mean = sum / n;
        double m2 = 0.0, m4 = 0.0;
        for (double v : scores) {
            const double dev = v - cell.mean;
            m2 += dev * dev;
            m4 += dev * dev * dev * dev;
        }
        cell.variance = cfg.trials > 1 ? m2 / (n - 1.0) : 0.0;
        const double sd = std::sqrt(cell.variance);
        const double mean_radius = kZ95 * sd / std::sqrt(n);
        cell.mean_ci = {cell.mean - mean_radius, cell.mean + mean_radius};
        const double var_se = std::sqrt(
            std::max(m4 / n - cell.variance * cell.variance, 0.0) / n);
        cell.var_slack = 3.0 * mean_radius + kZ95 * var_se;

        cell.mean_ok =
            std::fabs(cell.mean - cell.expected_mean) <= mean_radius;
        cell.var_ok = cell.variance <= 3.0 * cell.mean + cell.var_slack;
        report.cells.push_back(cell);
    }
    return report;
}

}  // namespace pathscan
