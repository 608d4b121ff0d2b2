#pragma once

// Priors over path classes used by the lower-bound machinery.
//
// OrientedUniform draws each forward step uniformly; for d > 3 the
// construction embeds the 3-dimensional one in the first three coordinates
// (extra axes are never stepped).  HypercubeMixture partitions the lattice
// into side-2k blocks, picks a block uniformly, and grows an oriented path
// from the block's center; paths from different blocks can never intersect.
//
// Samplers are addressed streams: draw i is a pure function of
// (seed, i), so independent workers given disjoint index ranges reproduce
// the serial sequence exactly.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathscan/lattice.hpp"
#include "pathscan/rng.hpp"

namespace pathscan {

/// Deterministic i.i.d. path source: draw index -> Path.
class PriorSampler {
  public:
    virtual ~PriorSampler() = default;
    virtual Path sample(std::uint64_t draw) const = 0;
    virtual int k() const = 0;
    virtual const TorusLattice& lattice() const = 0;
};

/// i.i.d. draws 0..count-1 from the sampler.
inline std::vector<Path> sample_prior(const PriorSampler& sampler,
                                      std::uint64_t count) {
    std::vector<Path> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(sampler.sample(i));
    return out;
}

namespace detail {

// Number of forward directions used by the oriented constructions: the
// d >= 3 cases all embed the 3-dimensional lattice.
inline int oriented_directions(const TorusLattice& lat) {
    return lat.d() < 3 ? lat.d() : 3;
}

}  // namespace detail

/// Uniform distribution over oriented paths of k nodes from a fixed start.
/// Requires k <= m so that every step sequence is self-avoiding (no
/// rejection and no bias).
class OrientedUniformSampler final : public PriorSampler {
  public:
    OrientedUniformSampler(const TorusLattice& lat, int length, NodeId start,
                           std::uint64_t seed)
        : lat_(lat), k_(length), start_(start), seed_(seed) {
        if (k_ < 2)
            throw std::domain_error("OrientedUniformSampler: k must be >= 2");
        if (k_ > lat_.m())
            throw std::domain_error(
                "OrientedUniformSampler: requires k <= m (k = " +
                std::to_string(k_) + ", m = " + std::to_string(lat_.m()) +
                "); longer oriented walks can self-intersect");
        lat_.require_valid(start_);
    }

    Path sample(std::uint64_t draw) const override {
        CounterRng rng(seed_, RngDomain::kPrior, draw);
        const int dirs = detail::oriented_directions(lat_);
        Path path{start_};
        path.reserve(static_cast<std::size_t>(k_));
        NodeId v = start_;
        for (int j = 1; j < k_; ++j) {
            const int axis = static_cast<int>(rng.uniform_below(
                static_cast<std::uint64_t>(dirs)));
            v = lat_.step(v, axis, +1);
            path.push_back(v);
        }
        return path;
    }

    int k() const override { return k_; }
    const TorusLattice& lattice() const override { return lat_; }
    NodeId start() const { return start_; }

  private:
    TorusLattice lat_;
    int k_;
    NodeId start_;
    std::uint64_t seed_;
};

/// Even mixture over hypercube blocks: the lattice is partitioned into
/// (m/2k)^d blocks of side 2k; each block contributes oriented paths grown
/// from its center v_j = 2k*j + (k-1)*(1,...,1).  A path reaches at most
/// k-1 steps beyond the center per coordinate, so it stays inside its
/// block and cross-block draws are disjoint.
class HypercubeMixtureSampler final : public PriorSampler {
  public:
    HypercubeMixtureSampler(const TorusLattice& lat, int length,
                            std::uint64_t seed)
        : lat_(lat), k_(length), seed_(seed) {
        if (k_ < 2)
            throw std::domain_error("HypercubeMixtureSampler: k must be >= 2");
        if (lat_.m() % (2 * static_cast<std::int64_t>(k_)) != 0)
            throw std::domain_error(
                "HypercubeMixtureSampler: requires m divisible by 2k (m = " +
                std::to_string(lat_.m()) + ", 2k = " + std::to_string(2 * k_) +
                ")");
        blocks_per_axis_ = lat_.m() / (2 * k_);
        block_count_ = 1;
        for (int i = 0; i < lat_.d(); ++i)
            block_count_ *= static_cast<std::uint64_t>(blocks_per_axis_);
    }

    std::uint64_t block_count() const { return block_count_; }

    /// Center node of block j (j in [0, block_count)).
    NodeId block_center(std::uint64_t j) const {
        if (j >= block_count_)
            throw std::domain_error("HypercubeMixtureSampler: block index out of range");
        std::vector<std::int64_t> coords(static_cast<std::size_t>(lat_.d()));
        for (int i = lat_.d() - 1; i >= 0; --i) {
            const auto digit =
                static_cast<std::int64_t>(j % static_cast<std::uint64_t>(blocks_per_axis_));
            coords[static_cast<std::size_t>(i)] = 2 * k_ * digit + (k_ - 1);
            j /= static_cast<std::uint64_t>(blocks_per_axis_);
        }
        return lat_.encode(coords);
    }

    /// Block index that node v falls in.
    std::uint64_t block_of(NodeId v) const {
        const auto coords = lat_.decode(v);
        std::uint64_t j = 0;
        for (int i = 0; i < lat_.d(); ++i)
            j = j * static_cast<std::uint64_t>(blocks_per_axis_) +
                static_cast<std::uint64_t>(coords[static_cast<std::size_t>(i)] /
                                           (2 * k_));
        return j;
    }

    Path sample(std::uint64_t draw) const override {
        CounterRng rng(seed_, RngDomain::kPrior, draw);
        const std::uint64_t j = rng.uniform_below(block_count_);
        const int dirs = detail::oriented_directions(lat_);
        NodeId v = block_center(j);
        Path path{v};
        path.reserve(static_cast<std::size_t>(k_));
        for (int step = 1; step < k_; ++step) {
            const int axis = static_cast<int>(rng.uniform_below(
                static_cast<std::uint64_t>(dirs)));
            v = lat_.step(v, axis, +1);
            path.push_back(v);
        }
        return path;
    }

    int k() const override { return k_; }
    const TorusLattice& lattice() const override { return lat_; }

  private:
    TorusLattice lat_;
    int k_;
    std::uint64_t seed_;
    std::int64_t blocks_per_axis_ = 0;
    std::uint64_t block_count_ = 0;
};

/// Uniform oriented step sequence conditioned on self-avoidance, drawn by
/// rejection.  Only needed when k > m (a run of m equal steps would close a
/// loop); used for planted-path panels outside the samplers' k <= m regime.
inline Path sample_oriented_path_rejection(const TorusLattice& lat, int length,
                                           NodeId start, CounterRng& rng) {
    if (length < 2)
        throw std::domain_error("sample_oriented_path_rejection: k must be >= 2");
    lat.require_valid(start);
    const int dirs = detail::oriented_directions(lat);
    for (;;) {
        Path path{start};
        path.reserve(static_cast<std::size_t>(length));
        NodeId v = start;
        for (int j = 1; j < length; ++j) {
            const int axis = static_cast<int>(rng.uniform_below(
                static_cast<std::uint64_t>(dirs)));
            v = lat.step(v, axis, +1);
            path.push_back(v);
        }
        if (is_valid_path(lat, path)) return path;
    }
}

}  // namespace pathscan
