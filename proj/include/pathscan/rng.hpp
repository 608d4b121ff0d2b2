#pragma once

// Counter-based random number generation built on Philox4x64-10.
//
// Every random quantity produced by this library is a pure function of
// (seed, domain, stream labels, block index).  That makes Monte Carlo
// experiments reproducible bit-for-bit across runs, platforms, and worker
// counts: a trial's stream is addressed by labels, not by how many draws
// some other trial consumed before it.

#include <array>
#include <cmath>
#include <cstdint>

namespace pathscan {

namespace philox {

// Round constants of the philox4x64 generator.
inline constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b,
                    std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

// One full 10-round philox4x64 block: 256 bits of counter, 128 bits of key.
inline std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                          std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMult0, ctr[0], hi0, lo0);
        mulhilo(kMult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace philox

// Stream-separation constants: the second key word.  Two streams with
// different domains never collide even if all counter labels coincide.
enum class RngDomain : std::uint64_t {
    kGeneric = 0,
    kField = 1,      // per-node Gaussian observations
    kPrior = 2,      // prior path sampling
    kPanel = 3,      // planted-path panel selection
    kBootstrap = 4,  // bootstrap resampling
};

/// A deterministic random stream addressed by (seed, domain, three labels).
///
/// key = {seed, domain}; counter = {block, label0, label1, label2} with the
/// block index advancing as values are consumed.  Distinct label triples give
/// statistically independent streams under one seed.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, RngDomain domain, std::uint64_t label0 = 0,
               std::uint64_t label1 = 0, std::uint64_t label2 = 0)
        : key_{seed, static_cast<std::uint64_t>(domain)},
          labels_{label0, label1, label2} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buf_ = philox::block({block_, labels_[0], labels_[1], labels_[2]},
                                 key_);
            ++block_;
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    /// Uniform double in the open interval (0, 1): 53 random bits, centered.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) without modulo bias (Lemire rejection).
    std::uint64_t uniform_below(std::uint64_t bound) {
        unsigned __int128 m =
            static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal deviate via the polar (Marsaglia) method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 3> labels_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// The per-node Gaussian field value for (seed, trial, cell, node).
///
/// Each node owns its own substream, so a simulation can be evaluated
/// lazily on any subset of nodes and still agree with the full vector.
inline double field_normal(std::uint64_t seed, std::uint64_t node,
                           std::uint64_t trial = 0, std::uint64_t cell = 0) {
    CounterRng rng(seed, RngDomain::kField, node, trial, cell);
    return rng.normal();
}

}  // namespace pathscan
