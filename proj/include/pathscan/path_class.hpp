#pragma once

// Declarative descriptions of path classes (lattice, length, start
// constraint, orientation constraint) with counting, log-cardinality, and
// budgeted exhaustive enumeration.
//
// Counting rules:
//   - oriented classes with k <= m have the closed-form count d^(k-1) per
//     start (every oriented step sequence is self-avoiding inside one
//     period);
//   - otherwise an exhaustive DFS runs when the class-size bound fits the
//     enumeration budget, and the bound itself is returned (tagged) when it
//     does not.  The bound is (2d)^(k-1) per start for free classes and
//     d^(k-1) per start for oriented ones, times n when the start is free.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathscan/errors.hpp"
#include "pathscan/lattice.hpp"

namespace pathscan {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10000000;

enum class StartMode { kKnown, kUnknown };

/// A class C of self-avoiding paths on a torus lattice.
struct PathClass {
    TorusLattice lattice;
    int k;                // node count per path
    StartMode start_mode;
    NodeId start;         // meaningful only when start_mode == kKnown
    bool oriented;        // restrict steps to the d forward unit directions

    PathClass(const TorusLattice& lat, int length, NodeId start_node,
              bool oriented_paths)
        : lattice(lat), k(length), start_mode(StartMode::kKnown),
          start(start_node), oriented(oriented_paths) {
        if (k < 2) throw std::domain_error("PathClass: k must be >= 2");
        lattice.require_valid(start_node);
    }

    PathClass(const TorusLattice& lat, int length, bool oriented_paths)
        : lattice(lat), k(length), start_mode(StartMode::kUnknown), start(0),
          oriented(oriented_paths) {
        if (k < 2) throw std::domain_error("PathClass: k must be >= 2");
    }
};

struct PathCount {
    bool exact;    // true when `value` is the exact cardinality
    double value;  // exact count, or the upper bound when !exact
};

namespace detail {

// log of the per-start class-size bound times the start multiplicity.
inline double log_count_bound(const PathClass& pc) {
    const double base = pc.oriented ? static_cast<double>(pc.lattice.d())
                                    : 2.0 * pc.lattice.d();
    double lb = (pc.k - 1) * std::log(base);
    if (pc.start_mode == StartMode::kUnknown)
        lb += std::log(static_cast<double>(pc.lattice.n()));
    return lb;
}

// Candidate continuations of v, ascending by node index.
inline void extensions(const TorusLattice& lat, bool oriented, NodeId v,
                       std::vector<NodeId>& out) {
    if (oriented) {
        out.clear();
        for (int axis = 0; axis < lat.d(); ++axis)
            out.push_back(lat.step(v, axis, +1));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    } else {
        out = lat.neighbors(v);
    }
}

// Depth-first traversal of all self-avoiding extensions of `path` up to k
// nodes, in lexicographic node-sequence order.  `visit` sees each complete
// path; visited/scratch buffers are caller-owned so loops can reuse them.
inline void dfs_paths(const TorusLattice& lat, bool oriented, int k,
                      Path& path, std::vector<char>& visited,
                      const std::function<void(const Path&)>& visit) {
    if (static_cast<int>(path.size()) == k) {
        visit(path);
        return;
    }
    std::vector<NodeId> next;
    extensions(lat, oriented, path.back(), next);
    for (NodeId w : next) {
        if (visited[static_cast<std::size_t>(w)]) continue;
        visited[static_cast<std::size_t>(w)] = 1;
        path.push_back(w);
        dfs_paths(lat, oriented, k, path, visited, visit);
        path.pop_back();
        visited[static_cast<std::size_t>(w)] = 0;
    }
}

inline std::uint64_t count_from(const PathClass& pc, NodeId origin) {
    std::vector<char> visited(pc.lattice.n(), 0);
    Path path{origin};
    visited[static_cast<std::size_t>(origin)] = 1;
    std::uint64_t count = 0;
    dfs_paths(pc.lattice, pc.oriented, pc.k, path, visited,
              [&count](const Path&) { ++count; });
    return count;
}

}  // namespace detail

/// Exact cardinality of C when affordable, else the tagged upper bound.
inline PathCount count_paths(const PathClass& pc,
                             std::uint64_t budget = kDefaultEnumerationBudget) {
    const int d = pc.lattice.d();
    const bool free_start = pc.start_mode == StartMode::kUnknown;
    const double n = static_cast<double>(pc.lattice.n());

    // Closed form: oriented step sequences within one period never revisit.
    if (pc.oriented && pc.k <= pc.lattice.m()) {
        double value = std::pow(static_cast<double>(d), pc.k - 1);
        if (free_start) value *= n;
        return {true, value};
    }

    const double log_bound = detail::log_count_bound(pc);
    if (log_bound <= std::log(static_cast<double>(budget))) {
        // All nodes of a torus are equivalent, so a free-start count is n
        // times the count from any one origin.
        const std::uint64_t from_one = detail::count_from(
            pc, pc.start_mode == StartMode::kKnown ? pc.start : NodeId{0});
        const double value = free_start
                                 ? n * static_cast<double>(from_one)
                                 : static_cast<double>(from_one);
        return {true, value};
    }

    double bound = std::exp(log_bound);
    return {false, bound};
}

/// log |C| when the exact count is affordable, else the log of the upper
/// bound — never less than the true log-cardinality, so calibration built
/// on it stays conservative.
inline double log_cardinality(const PathClass& pc,
                              std::uint64_t budget = kDefaultEnumerationBudget) {
    const int d = pc.lattice.d();
    const bool free_start = pc.start_mode == StartMode::kUnknown;
    const double log_n = std::log(static_cast<double>(pc.lattice.n()));

    if (pc.oriented && pc.k <= pc.lattice.m()) {
        // Exact in closed form, evaluated in logs to dodge overflow.
        double lc = (pc.k - 1) * std::log(static_cast<double>(d));
        if (free_start) lc += log_n;
        return lc;
    }
    const PathCount c = count_paths(pc, budget);
    if (c.exact) return std::log(c.value);
    return detail::log_count_bound(pc);
}

/// Emits every path of C exactly once, in lexicographic node-sequence
/// order.  Refuses (BudgetError) when the class-size bound exceeds the
/// budget; the bound is quoted in the message.
inline void enumerate_paths(const PathClass& pc,
                            const std::function<void(const Path&)>& visit,
                            std::uint64_t budget = kDefaultEnumerationBudget) {
    const double log_bound = detail::log_count_bound(pc);
    if (log_bound > std::log(static_cast<double>(budget)))
        throw BudgetError(
            "enumerate_paths: class-size bound exp(" + std::to_string(log_bound) +
            ") exceeds enumeration budget " + std::to_string(budget));

    std::vector<char> visited(pc.lattice.n(), 0);
    std::vector<NodeId> starts;
    if (pc.start_mode == StartMode::kKnown) {
        starts.push_back(pc.start);
    } else {
        starts.resize(pc.lattice.n());
        for (NodeId v = 0; v < pc.lattice.n(); ++v)
            starts[static_cast<std::size_t>(v)] = v;
    }
    for (NodeId origin : starts) {
        Path path{origin};
        visited[static_cast<std::size_t>(origin)] = 1;
        detail::dfs_paths(pc.lattice, pc.oriented, pc.k, path, visited, visit);
        visited[static_cast<std::size_t>(origin)] = 0;
    }
}

/// Convenience collector for small classes.
inline std::vector<Path> enumerate_paths(
    const PathClass& pc, std::uint64_t budget = kDefaultEnumerationBudget) {
    std::vector<Path> out;
    enumerate_paths(pc, [&out](const Path& p) { out.push_back(p); }, budget);
    return out;
}

/// Plain-text path format: one path per line, comma-separated node indices.
inline std::string paths_to_text(const std::vector<Path>& paths) {
    std::string out;
    for (const Path& path : paths) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i > 0) out += ',';
            out += std::to_string(path[i]);
        }
        out += '\n';
    }
    return out;
}

/// Parses the one-path-per-line format.  When a lattice is supplied every
/// parsed path is checked against it; pass nullptr to skip validation.
inline std::vector<Path> paths_from_text(const std::string& text,
                                         const TorusLattice* lat) {
    std::vector<Path> out;
    std::size_t lineno = 0, begin = 0;
    while (begin < text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string::npos) end = text.size();
        ++lineno;
        const std::string line = text.substr(begin, end - begin);
        begin = end + 1;
        if (line.empty()) continue;
        Path path;
        std::size_t at = 0;
        while (at <= line.size()) {
            std::size_t comma = line.find(',', at);
            if (comma == std::string::npos) comma = line.size();
            const std::string token = line.substr(at, comma - at);
            try {
                std::size_t used = 0;
                path.push_back(std::stoull(token, &used));
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw std::domain_error("paths: line " + std::to_string(lineno) +
                                        ": bad node index \"" + token + "\"");
            }
            at = comma + 1;
        }
        if (lat != nullptr && !is_valid_path(*lat, path))
            throw std::domain_error(
                "paths: line " + std::to_string(lineno) +
                " is not a valid self-avoiding lattice path");
        out.push_back(std::move(path));
    }
    return out;
}

}  // namespace pathscan
