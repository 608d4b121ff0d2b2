#pragma once

// Sampling the observation field and planting a correlated path.
//
// Under the null every node carries an independent standard normal.  Under
// the alternative the nodes of one path are rewired to the stationary AR(1)
// recursion X_{s_{j+1}} = psi X_{s_j} + sqrt(1-psi^2) Z_{s_{j+1}} while every
// off-path node keeps the same draw it would have had under the null.  Both
// regimes read from one lazy counter-based field, so a simulation with
// psi = 0 reproduces the null vector bit for bit and a scan can evaluate
// single nodes without materialising the lattice.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathscan/ar_model.hpp"
#include "pathscan/lattice.hpp"
#include "pathscan/rng.hpp"

namespace pathscan {

static_assert(std::endian::native == std::endian::little,
              "sample serialization assumes a little-endian host");

enum class Provenance { kNull, kAlternative };

inline const char* to_string(Provenance p) {
    return p == Provenance::kNull ? "null" : "alternative";
}

/// Lazy standard-normal field: one independent N(0,1) per node, addressed by
/// (seed, trial, cell) so replications and experiment cells never collide.
class GaussianField {
  public:
    explicit GaussianField(std::uint64_t seed, std::uint64_t trial = 0,
                           std::uint64_t cell = 0)
        : seed_(seed), trial_(trial), cell_(cell) {}

    double operator()(NodeId node) const {
        return field_normal(seed_, node, trial_, cell_);
    }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::uint64_t trial_;
    std::uint64_t cell_;
};

/// One simulated observation vector together with how it was produced.
struct Sample {
    int d = 0;
    std::int64_t m = 0;
    std::vector<double> values;      // length m^d, indexed by NodeId
    Provenance provenance = Provenance::kNull;
    Path path;                       // planted path; empty under the null
    double psi = 0.0;
    std::uint64_t seed = 0;
};

inline Sample simulate_null(const TorusLattice& lattice, std::uint64_t seed,
                            std::uint64_t trial = 0, std::uint64_t cell = 0) {
    GaussianField field(seed, trial, cell);
    Sample out;
    out.d = lattice.d();
    out.m = lattice.m();
    out.seed = seed;
    out.provenance = Provenance::kNull;
    out.values.resize(static_cast<std::size_t>(lattice.n()));
    for (NodeId v = 0; v < lattice.n(); ++v)
        out.values[static_cast<std::size_t>(v)] = field(v);
    return out;
}

inline Sample simulate_alternative(const TorusLattice& lattice,
                                   const Path& path,
                                   const CorrelationModel& model,
                                   std::uint64_t seed, std::uint64_t trial = 0,
                                   std::uint64_t cell = 0) {
    if (!is_valid_path(lattice, path))
        throw std::domain_error(
            "simulate_alternative: path is not a valid self-avoiding lattice path");
    Sample out = simulate_null(lattice, seed, trial, cell);
    out.provenance = Provenance::kAlternative;
    out.path = path;
    out.psi = model.psi;

    // Rewire the path nodes: the null draws become the AR(1) innovations.
    const double psi = model.psi;
    const double innovation_scale = std::sqrt(1.0 - psi * psi);
    double prev = out.values[static_cast<std::size_t>(path.front())];
    for (std::size_t j = 1; j < path.size(); ++j) {
        const auto idx = static_cast<std::size_t>(path[j]);
        const double z = out.values[idx];
        prev = psi * prev + innovation_scale * z;
        out.values[idx] = prev;
    }
    return out;
}

/// Writes <base>.f64 (raw little-endian doubles, node order) and <base>.json
/// (shape, seed, provenance; plus psi and the path for alternatives).
inline void write_sample(const Sample& sample, const std::string& base) {
    {
        std::ofstream bin(base + ".f64", std::ios::binary | std::ios::trunc);
        if (!bin)
            throw std::runtime_error("write_sample: cannot open " + base + ".f64");
        bin.write(reinterpret_cast<const char*>(sample.values.data()),
                  static_cast<std::streamsize>(sample.values.size() *
                                               sizeof(double)));
        if (!bin) throw std::runtime_error("write_sample: short write");
    }
    nlohmann::json sidecar{{"d", sample.d},
                           {"m", sample.m},
                           {"seed", sample.seed},
                           {"provenance", to_string(sample.provenance)}};
    if (sample.provenance == Provenance::kAlternative) {
        sidecar["psi"] = sample.psi;
        sidecar["path"] = sample.path;
    }
    std::ofstream meta(base + ".json", std::ios::trunc);
    if (!meta)
        throw std::runtime_error("write_sample: cannot open " + base + ".json");
    meta << sidecar.dump(2) << '\n';
}

inline Sample read_sample(const std::string& base) {
    std::ifstream meta(base + ".json");
    if (!meta)
        throw std::runtime_error("read_sample: cannot open " + base + ".json");
    nlohmann::json sidecar = nlohmann::json::parse(meta);

    Sample out;
    out.d = sidecar.at("d").get<int>();
    out.m = sidecar.at("m").get<std::int64_t>();
    out.seed = sidecar.at("seed").get<std::uint64_t>();
    const std::string provenance = sidecar.at("provenance").get<std::string>();
    if (provenance == "null") {
        out.provenance = Provenance::kNull;
    } else if (provenance == "alternative") {
        out.provenance = Provenance::kAlternative;
        out.psi = sidecar.at("psi").get<double>();
        out.path = sidecar.at("path").get<Path>();
    } else {
        throw std::runtime_error("read_sample: unknown provenance '" +
                                 provenance + "'");
    }

    TorusLattice lattice(out.d, out.m);  // validates the recorded shape
    std::ifstream bin(base + ".f64", std::ios::binary);
    if (!bin)
        throw std::runtime_error("read_sample: cannot open " + base + ".f64");
    out.values.resize(static_cast<std::size_t>(lattice.n()));
    bin.read(reinterpret_cast<char*>(out.values.data()),
             static_cast<std::streamsize>(out.values.size() * sizeof(double)));
    if (bin.gcount() !=
        static_cast<std::streamsize>(out.values.size() * sizeof(double)))
        throw std::runtime_error("read_sample: truncated value file");
    return out;
}

}  // namespace pathscan
