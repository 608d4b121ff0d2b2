#pragma once

// The ambient graph: a d-dimensional torus lattice {0..m-1}^d with
// wraparound adjacency, plus path validation helpers.
//
// Node identity is a flat row-major integer index; coordinates are a view.
// That keeps path storage compact for the scan engines.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pathscan {

using NodeId = std::uint64_t;

/// An ordered node sequence; validity (adjacency + self-avoidance) is a
/// property checked against a host lattice, not enforced by the type.
using Path = std::vector<NodeId>;

/// d-dimensional torus lattice with side length m and n = m^d nodes.
/// Immutable after construction; safe to share across workers.
class TorusLattice {
  public:
    TorusLattice(int d, std::int64_t m) : d_(d), m_(m) {
        if (d < 1) throw std::domain_error("TorusLattice: d must be >= 1");
        if (m < 2) throw std::domain_error("TorusLattice: m must be >= 2");
        n_ = 1;
        for (int i = 0; i < d; ++i) {
            if (n_ > std::uint64_t(-1) / static_cast<std::uint64_t>(m))
                throw std::domain_error("TorusLattice: m^d overflows 64 bits");
            n_ *= static_cast<std::uint64_t>(m);
        }
    }

    int d() const { return d_; }
    std::int64_t m() const { return m_; }
    std::uint64_t n() const { return n_; }

    bool is_valid_node(NodeId v) const { return v < n_; }

    void require_valid(NodeId v) const {
        if (!is_valid_node(v))
            throw std::domain_error("TorusLattice: node index " +
                                    std::to_string(v) + " out of range [0, " +
                                    std::to_string(n_) + ")");
    }

    /// Row-major encoding: index = sum_i c_i * m^(d-1-i); coords[0] is the
    /// most significant digit.
    NodeId encode(const std::vector<std::int64_t>& coords) const {
        if (static_cast<int>(coords.size()) != d_)
            throw std::domain_error("TorusLattice::encode: wrong coordinate count");
        NodeId idx = 0;
        for (int i = 0; i < d_; ++i) {
            if (coords[i] < 0 || coords[i] >= m_)
                throw std::domain_error("TorusLattice::encode: coordinate out of range");
            idx = idx * static_cast<NodeId>(m_) + static_cast<NodeId>(coords[i]);
        }
        return idx;
    }

    std::vector<std::int64_t> decode(NodeId v) const {
        require_valid(v);
        std::vector<std::int64_t> coords(static_cast<std::size_t>(d_));
        for (int i = d_ - 1; i >= 0; --i) {
            coords[static_cast<std::size_t>(i)] =
                static_cast<std::int64_t>(v % static_cast<NodeId>(m_));
            v /= static_cast<NodeId>(m_);
        }
        return coords;
    }

    /// Neighbor one step along `axis` in direction `dir` (+1 or -1), with wrap.
    NodeId step(NodeId v, int axis, int dir) const {
        require_valid(v);
        if (axis < 0 || axis >= d_)
            throw std::domain_error("TorusLattice::step: axis out of range");
        const NodeId stride = stride_of(axis);
        const auto coord =
            static_cast<std::int64_t>((v / stride) % static_cast<NodeId>(m_));
        const std::int64_t next = (coord + dir + m_) % m_;
        return v + (static_cast<NodeId>(next) - static_cast<NodeId>(coord)) * stride;
    }

    /// The set of wraparound neighbors (2d of them for m >= 3; duplicates
    /// collapse when m = 2), sorted ascending.
    std::vector<NodeId> neighbors(NodeId v) const {
        require_valid(v);
        std::vector<NodeId> out;
        out.reserve(static_cast<std::size_t>(2 * d_));
        for (int axis = 0; axis < d_; ++axis) {
            out.push_back(step(v, axis, +1));
            out.push_back(step(v, axis, -1));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool adjacent(NodeId u, NodeId v) const {
        require_valid(u);
        require_valid(v);
        if (u == v) return false;
        for (int axis = 0; axis < d_; ++axis)
            if (step(u, axis, +1) == v || step(u, axis, -1) == v) return true;
        return false;
    }

  private:
    NodeId stride_of(int axis) const {
        NodeId s = 1;
        for (int i = axis + 1; i < d_; ++i) s *= static_cast<NodeId>(m_);
        return s;
    }

    int d_;
    std::int64_t m_;
    std::uint64_t n_;
};

/// True iff the sequence has length >= 2, consecutive nodes are adjacent,
/// and no node repeats.  Total function: invalid indices just yield false.
inline bool is_valid_path(const TorusLattice& lattice, const Path& p) {
    if (p.size() < 2) return false;
    for (NodeId v : p)
        if (!lattice.is_valid_node(v)) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (!lattice.adjacent(p[i], p[i + 1])) return false;
    Path sorted = p;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

/// Size of the node-set intersection, order-insensitive.
inline std::size_t intersection_size(const Path& s, const Path& t) {
    Path a = s, b = t;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t count = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace pathscan
