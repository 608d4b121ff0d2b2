#pragma once

// Scan statistics over path classes: count near-equal (or near-opposite)
// increments along a path, maximize over the class, reject when the best
// path collects more than k/2 hits.
//
// Exact maximization over self-avoiding paths is a prize-collecting path
// problem, so three engines with different contracts are provided:
//
//   Exhaustive  — true maximum by pruned DFS; needs an enumeration budget.
//   OrientedDP  — dynamic program over (steps-left, node); exact on oriented
//                 classes with k <= m, where forward-step sequences cannot
//                 self-intersect.  For k > m it scores forward *walks*, an
//                 upper relaxation, and says so via engine_exactness.
//   Beam        — width-limited best-first search; never exceeds the true
//                 maximum, never certified exact.
//
// All engines break score ties toward the lexicographically smallest path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathscan/ar_model.hpp"
#include "pathscan/calibration.hpp"
#include "pathscan/errors.hpp"
#include "pathscan/lattice.hpp"
#include "pathscan/likelihood.hpp"
#include "pathscan/path_class.hpp"
#include "pathscan/sample.hpp"

namespace pathscan {

enum class Sign { kPlus, kMinus, kBoth };

inline const char* to_string(Sign s) {
    switch (s) {
        case Sign::kPlus: return "plus";
        case Sign::kMinus: return "minus";
        default: return "both";
    }
}

enum class EngineKind { kExhaustive, kOrientedDP, kBeam };

struct ScanEngine {
    EngineKind kind = EngineKind::kExhaustive;
    std::uint64_t budget = kDefaultEnumerationBudget;  // Exhaustive only
    int width = 0;                                     // Beam only

    static ScanEngine exhaustive(std::uint64_t budget = kDefaultEnumerationBudget) {
        ScanEngine e;
        e.kind = EngineKind::kExhaustive;
        e.budget = budget;
        return e;
    }
    static ScanEngine oriented_dp() {
        ScanEngine e;
        e.kind = EngineKind::kOrientedDP;
        return e;
    }
    static ScanEngine beam(int width) {
        if (width < 1) throw std::domain_error("ScanEngine: beam width must be >= 1");
        ScanEngine e;
        e.kind = EngineKind::kBeam;
        e.width = width;
        return e;
    }
};

struct TestConfig {
    double t;   // increment threshold, > 0
    int k;      // path length; reject iff v_star > k/2
    Sign sign;
};

struct DetectionOutcome {
    int v_star = 0;
    Path argmax_path;
    bool rejected = false;
    bool engine_exactness = true;
};

namespace detail {

inline void require_single_sign(Sign sign, const char* where) {
    if (sign == Sign::kBoth)
        throw std::domain_error(std::string(where) +
                                ": needs a single sign (plus or minus); "
                                "combine signs at the run_test level");
}

inline void require_shape_match(const Sample& sample, const PathClass& pc) {
    if (sample.d != pc.lattice.d() || sample.m != pc.lattice.m() ||
        sample.values.size() != static_cast<std::size_t>(pc.lattice.n()))
        throw std::domain_error("scan: sample shape does not match the class lattice");
}

// 1 iff the increment between values a (earlier) and b (later) scores a hit.
inline int increment_hit(double a, double b, double t, Sign sign) {
    const double z = sign == Sign::kPlus ? b - a : b + a;
    return std::fabs(z) <= kSqrt2 * t ? 1 : 0;
}

}  // namespace detail

/// Number of scoring increments along one path: counts j with
/// |x_{s_{j+1}} -+ x_{s_j}| <= sqrt(2) t (Plus: difference; Minus: sum).
inline int pair_score(const Sample& sample, const Path& path, double t,
                      Sign sign) {
    detail::require_single_sign(sign, "pair_score");
    if (!(t > 0.0)) throw std::domain_error("pair_score: t must be > 0");
    TorusLattice lattice(sample.d, sample.m);
    if (!is_valid_path(lattice, path))
        throw std::domain_error("pair_score: invalid path for the sample lattice");
    int score = 0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j)
        score += detail::increment_hit(
            sample.values[static_cast<std::size_t>(path[j])],
            sample.values[static_cast<std::size_t>(path[j + 1])], t, sign);
    return score;
}

namespace detail {

// Pruned DFS for the exact maximum.  Prunes when even all-hit remaining
// increments cannot strictly beat the best; because paths are visited in
// lexicographic order and the record only moves on strict improvement, the
// recorded argmax is the lexicographically smallest maximizer.
struct ExhaustiveScanner {
    const Sample& sample;
    const PathClass& pc;
    double t;
    Sign sign;
    int best = -1;
    Path best_path;
    Path current;
    std::vector<char> visited;
    std::vector<NodeId> scratch;

    ExhaustiveScanner(const Sample& s, const PathClass& c, double t_, Sign sg)
        : sample(s), pc(c), t(t_), sign(sg),
          visited(static_cast<std::size_t>(c.lattice.n()), 0) {}

    void run_from(NodeId origin) {
        current.assign(1, origin);
        visited[static_cast<std::size_t>(origin)] = 1;
        descend(0);
        visited[static_cast<std::size_t>(origin)] = 0;
    }

    void descend(int score) {
        const int depth = static_cast<int>(current.size());
        if (depth == pc.k) {
            if (score > best) {
                best = score;
                best_path = current;
            }
            return;
        }
        if (score + (pc.k - depth) <= best) return;  // cannot strictly beat
        std::vector<NodeId> next;
        extensions(pc.lattice, pc.oriented, current.back(), next);
        for (NodeId w : next) {
            if (visited[static_cast<std::size_t>(w)]) continue;
            const int gained = increment_hit(
                sample.values[static_cast<std::size_t>(current.back())],
                sample.values[static_cast<std::size_t>(w)], t, sign);
            visited[static_cast<std::size_t>(w)] = 1;
            current.push_back(w);
            descend(score + gained);
            current.pop_back();
            visited[static_cast<std::size_t>(w)] = 0;
        }
    }
};

inline DetectionOutcome scan_exhaustive(const Sample& sample,
                                        const PathClass& pc, double t,
                                        Sign sign, std::uint64_t budget) {
    const double log_bound = log_count_bound(pc);
    if (log_bound > std::log(static_cast<double>(budget)))
        throw BudgetError("scan: exhaustive class-size bound exp(" +
                          std::to_string(log_bound) +
                          ") exceeds enumeration budget " +
                          std::to_string(budget));
    ExhaustiveScanner scanner(sample, pc, t, sign);
    if (pc.start_mode == StartMode::kKnown) {
        scanner.run_from(pc.start);
    } else {
        for (NodeId v = 0; v < pc.lattice.n(); ++v) scanner.run_from(v);
    }
    if (scanner.best < 0)
        throw std::domain_error("scan: the class contains no path");
    DetectionOutcome out;
    out.v_star = scanner.best;
    out.argmax_path = scanner.best_path;
    out.engine_exactness = true;
    return out;
}

inline DetectionOutcome scan_oriented_dp(const Sample& sample,
                                         const PathClass& pc, double t,
                                         Sign sign) {
    if (!pc.oriented)
        throw std::domain_error("scan: OrientedDP requires an oriented class");
    const TorusLattice& lat = pc.lattice;
    const auto n = static_cast<std::size_t>(lat.n());
    const int d = lat.d();
    const int steps = pc.k - 1;

    // g[l][v] = best score of an oriented walk of l forward steps from v.
    // Stored fully for the argmax reconstruction; scores fit easily in int.
    std::vector<std::vector<int>> g(static_cast<std::size_t>(steps) + 1,
                                    std::vector<int>(n, 0));
    for (int l = 1; l <= steps; ++l) {
        const auto& prev = g[static_cast<std::size_t>(l - 1)];
        auto& cur = g[static_cast<std::size_t>(l)];
        for (NodeId v = 0; v < lat.n(); ++v) {
            int best = std::numeric_limits<int>::min();
            for (int axis = 0; axis < d; ++axis) {
                const NodeId w = lat.step(v, axis, +1);
                const int cand =
                    increment_hit(sample.values[static_cast<std::size_t>(v)],
                                  sample.values[static_cast<std::size_t>(w)], t,
                                  sign) +
                    prev[static_cast<std::size_t>(w)];
                if (cand > best) best = cand;
            }
            cur[static_cast<std::size_t>(v)] = best;
        }
    }

    NodeId origin = 0;
    if (pc.start_mode == StartMode::kKnown) {
        origin = pc.start;
    } else {
        // Smallest node id attaining the maximum keeps ties lexicographic.
        for (NodeId v = 1; v < lat.n(); ++v)
            if (g[static_cast<std::size_t>(steps)][static_cast<std::size_t>(v)] >
                g[static_cast<std::size_t>(steps)][static_cast<std::size_t>(origin)])
                origin = v;
    }

    DetectionOutcome out;
    out.v_star = g[static_cast<std::size_t>(steps)][static_cast<std::size_t>(origin)];
    // Greedy reconstruction, preferring the smallest next node id among the
    // optimal continuations — the lexicographically smallest optimal walk.
    Path path{origin};
    NodeId v = origin;
    for (int l = steps; l >= 1; --l) {
        std::vector<NodeId> nexts;
        for (int axis = 0; axis < d; ++axis) nexts.push_back(lat.step(v, axis, +1));
        std::sort(nexts.begin(), nexts.end());
        nexts.erase(std::unique(nexts.begin(), nexts.end()), nexts.end());
        const int want = g[static_cast<std::size_t>(l)][static_cast<std::size_t>(v)];
        for (NodeId w : nexts) {
            const int cand =
                increment_hit(sample.values[static_cast<std::size_t>(v)],
                              sample.values[static_cast<std::size_t>(w)], t,
                              sign) +
                g[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(w)];
            if (cand == want) {
                path.push_back(w);
                v = w;
                break;
            }
        }
    }
    out.argmax_path = path;
    // Forward walks of fewer than m steps cannot revisit a node, so the DP
    // is exact on paths; beyond that it is an upper relaxation over walks.
    out.engine_exactness = pc.k <= lat.m();
    return out;
}

inline DetectionOutcome scan_beam(const Sample& sample, const PathClass& pc,
                                  double t, Sign sign, int width) {
    if (width < 1) throw std::domain_error("scan: beam width must be >= 1");
    struct Entry {
        int score;
        Path path;
    };
    const auto better = [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.path < b.path;
    };

    std::vector<Entry> beam;
    if (pc.start_mode == StartMode::kKnown) {
        beam.push_back({0, Path{pc.start}});
    } else {
        for (NodeId v = 0; v < pc.lattice.n() &&
                           beam.size() < static_cast<std::size_t>(width);
             ++v)
            beam.push_back({0, Path{v}});
    }

    std::vector<NodeId> next;
    for (int depth = 1; depth < pc.k; ++depth) {
        std::vector<Entry> expanded;
        for (const Entry& e : beam) {
            extensions(pc.lattice, pc.oriented, e.path.back(), next);
            for (NodeId w : next) {
                if (std::find(e.path.begin(), e.path.end(), w) != e.path.end())
                    continue;
                Entry grown;
                grown.score =
                    e.score +
                    increment_hit(
                        sample.values[static_cast<std::size_t>(e.path.back())],
                        sample.values[static_cast<std::size_t>(w)], t, sign);
                grown.path = e.path;
                grown.path.push_back(w);
                expanded.push_back(std::move(grown));
            }
        }
        if (expanded.empty())
            throw std::domain_error("scan: the class contains no path");
        std::sort(expanded.begin(), expanded.end(), better);
        if (expanded.size() > static_cast<std::size_t>(width))
            expanded.resize(static_cast<std::size_t>(width));
        beam = std::move(expanded);
    }

    DetectionOutcome out;
    out.v_star = beam.front().score;
    out.argmax_path = beam.front().path;
    out.engine_exactness = false;  // a lower bound, never certified exact
    return out;
}

}  // namespace detail

/// Maximum pair_score over the class, with the decision V* > k/2 attached.
inline DetectionOutcome scan(const Sample& sample, const PathClass& pc,
                             double t, Sign sign, const ScanEngine& engine) {
    detail::require_single_sign(sign, "scan");
    if (!(t > 0.0)) throw std::domain_error("scan: t must be > 0");
    detail::require_shape_match(sample, pc);

    DetectionOutcome out;
    switch (engine.kind) {
        case EngineKind::kExhaustive:
            out = detail::scan_exhaustive(sample, pc, t, sign, engine.budget);
            break;
        case EngineKind::kOrientedDP:
            out = detail::scan_oriented_dp(sample, pc, t, sign);
            break;
        case EngineKind::kBeam:
            out = detail::scan_beam(sample, pc, t, sign, engine.width);
            break;
    }
    out.rejected = 2 * out.v_star > pc.k;
    return out;
}

/// Calibrated accept/reject decision.  Plus and Minus calibrate against
/// log|C|; Both doubles the effective class size (union bound over the two
/// signs) and rejects when either sign's scan exceeds k/2.
inline bool run_test(const Sample& sample, const PathClass& pc, Sign sign,
                     const ScanEngine& engine,
                     std::uint64_t budget = kDefaultEnumerationBudget) {
    const double log_card = log_cardinality(pc, budget);
    if (sign == Sign::kBoth) {
        const double t = calibrate(pc.k, log_card + std::log(2.0));
        if (scan(sample, pc, t, Sign::kPlus, engine).rejected) return true;
        return scan(sample, pc, t, Sign::kMinus, engine).rejected;
    }
    const double t = calibrate(pc.k, log_card);
    return scan(sample, pc, t, sign, engine).rejected;
}

struct GlrtResult {
    double statistic = 0.0;
    Path argmax_path;
};

/// Generalized-likelihood-ratio scan: max over the enumerated class of
/// x_S^T (I - Gamma^{-1}) x_S.  A raw statistic — thresholds come from
/// Monte Carlo under the null, not from a closed form.
inline GlrtResult glrt_scan_result(const Sample& sample, const PathClass& pc,
                                   const CorrelationModel& model,
                                   const ScanEngine& engine) {
    if (engine.kind != EngineKind::kExhaustive)
        throw std::domain_error("glrt_scan: requires the Exhaustive engine");
    detail::require_shape_match(sample, pc);
    GlrtResult best;
    bool seen = false;
    enumerate_paths(
        pc,
        [&](const Path& path) {
            std::vector<double> x = gather_path(sample, path);
            double xtx = 0.0;
            for (double v : x) xtx += v * v;
            const double stat =
                model.psi == 0.0 ? 0.0 : xtx - quad_form_inverse(x, model.psi);
            if (!seen || stat > best.statistic) {
                best.statistic = stat;
                best.argmax_path = path;
                seen = true;
            }
        },
        engine.budget);
    if (!seen) throw std::domain_error("glrt_scan: the class contains no path");
    return best;
}

inline double glrt_scan(const Sample& sample, const PathClass& pc,
                        const CorrelationModel& model,
                        const ScanEngine& engine) {
    return glrt_scan_result(sample, pc, model, engine).statistic;
}

}  // namespace pathscan
