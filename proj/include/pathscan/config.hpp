#pragma once

// Experiment configuration: one JSON document describing the lattice, the
// path class, the psi grid, and the Monte Carlo budget, optionally patched
// by --set key=value overrides before parsing.
//
// Validation happens up front and names the offending field, so a bad
// config dies before any trial is simulated.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathscan/errors.hpp"
#include "pathscan/path_class.hpp"
#include "pathscan/scan.hpp"

namespace pathscan {

struct ExperimentConfig {
    // Lattice.
    int d = 3;
    std::int64_t m = 8;

    // Path class.
    int k = 4;
    StartMode start_mode = StartMode::kKnown;
    NodeId start = 0;
    bool oriented = true;

    // Sweep.
    std::vector<double> psi_grid = {0.0};
    std::uint64_t trials = 1000;
    Sign sign = Sign::kPlus;
    ScanEngine engine = ScanEngine::oriented_dp();
    double threshold = std::numeric_limits<double>::quiet_NaN();  // NaN = auto

    // Reproducibility and resources.
    std::uint64_t seed = 1;
    int threads = 1;
    std::uint64_t budget = kDefaultEnumerationBudget;

    // Type-II panel: exhaustive when the class enumerates within budget,
    // otherwise a fixed seed-derived panel of this many planted paths.
    std::uint64_t panel = 32;

    // Optional report columns.
    bool lower_bound_columns = false;   // requires |psi| < 1/9 on the grid
    bool mixture_prior = false;         // requires unknown start, m % 2k == 0
    std::uint64_t bound_trials = 20000; // EIT / moment measurement size

    // Output path prefix ("<out>.csv", "<out>.json", "<out>.svg").
    std::string out = "report";
};

inline Sign sign_from_string(const std::string& s) {
    if (s == "plus") return Sign::kPlus;
    if (s == "minus") return Sign::kMinus;
    if (s == "both") return Sign::kBoth;
    throw ConfigError("sign: expected plus, minus, or both (got \"" + s + "\")");
}

/// Engine spec: "exhaustive", "dp", or "beam:<width>".
inline ScanEngine engine_from_string(const std::string& s,
                                     std::uint64_t budget) {
    if (s == "exhaustive") return ScanEngine::exhaustive(budget);
    if (s == "dp") return ScanEngine::oriented_dp();
    if (s.rfind("beam:", 0) == 0) {
        const std::string width = s.substr(5);
        try {
            std::size_t used = 0;
            const long long w = std::stoll(width, &used);
            if (used != width.size() || w < 1 ||
                w > std::numeric_limits<int>::max())
                throw std::invalid_argument(width);
            return ScanEngine::beam(static_cast<int>(w));
        } catch (const std::exception&) {
            throw ConfigError("engine: beam width must be a positive integer "
                              "(got \"" + width + "\")");
        }
    }
    throw ConfigError("engine: expected exhaustive, dp, or beam:<width> "
                      "(got \"" + s + "\")");
}

inline std::string engine_to_string(const ScanEngine& e) {
    switch (e.kind) {
        case EngineKind::kExhaustive: return "exhaustive";
        case EngineKind::kOrientedDP: return "dp";
        case EngineKind::kBeam: return "beam:" + std::to_string(e.width);
    }
    throw std::logic_error("engine_to_string: unreachable");
}

namespace detail {

template <typename T>
T field_as(const nlohmann::json& j, const std::string& dotted) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(dotted + ": " + e.what());
    }
}

}  // namespace detail

/// Parses a config document.  Unknown keys are rejected by name so typos
/// cannot silently fall back to defaults.
inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known = {
        "lattice", "class",  "psi_grid",     "trials",       "sign",
        "engine",  "seed",   "threads",      "budget",       "panel",
        "lower_bound", "mixture_prior", "bound_trials", "threshold", "out"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& key : known) ok = ok || key == it.key();
        if (!ok) throw ConfigError(it.key() + ": unknown config key");
    }

    ExperimentConfig cfg;
    if (j.contains("lattice")) {
        const auto& lat = j.at("lattice");
        for (auto it = lat.begin(); it != lat.end(); ++it)
            if (it.key() != "d" && it.key() != "m")
                throw ConfigError("lattice." + it.key() + ": unknown config key");
        if (lat.contains("d")) cfg.d = detail::field_as<int>(lat.at("d"), "lattice.d");
        if (lat.contains("m"))
            cfg.m = detail::field_as<std::int64_t>(lat.at("m"), "lattice.m");
    }
    if (j.contains("class")) {
        const auto& cls = j.at("class");
        for (auto it = cls.begin(); it != cls.end(); ++it)
            if (it.key() != "k" && it.key() != "start" && it.key() != "oriented")
                throw ConfigError("class." + it.key() + ": unknown config key");
        if (cls.contains("k")) cfg.k = detail::field_as<int>(cls.at("k"), "class.k");
        if (cls.contains("oriented"))
            cfg.oriented = detail::field_as<bool>(cls.at("oriented"), "class.oriented");
        if (cls.contains("start")) {
            const auto& start = cls.at("start");
            if (start.is_string()) {
                if (start.get<std::string>() != "unknown")
                    throw ConfigError(
                        "class.start: expected a node id or \"unknown\"");
                cfg.start_mode = StartMode::kUnknown;
            } else {
                cfg.start_mode = StartMode::kKnown;
                cfg.start = detail::field_as<NodeId>(start, "class.start");
            }
        }
    }
    if (j.contains("psi_grid")) {
        // A bare number is accepted as a one-point grid so that
        // "--set psi_grid=0.9" works without array syntax.
        if (j.at("psi_grid").is_number())
            cfg.psi_grid = {detail::field_as<double>(j.at("psi_grid"), "psi_grid")};
        else
            cfg.psi_grid = detail::field_as<std::vector<double>>(j.at("psi_grid"),
                                                                 "psi_grid");
    }
    if (j.contains("trials"))
        cfg.trials = detail::field_as<std::uint64_t>(j.at("trials"), "trials");
    if (j.contains("seed"))
        cfg.seed = detail::field_as<std::uint64_t>(j.at("seed"), "seed");
    if (j.contains("threads"))
        cfg.threads = detail::field_as<int>(j.at("threads"), "threads");
    if (j.contains("budget"))
        cfg.budget = detail::field_as<std::uint64_t>(j.at("budget"), "budget");
    if (j.contains("panel"))
        cfg.panel = detail::field_as<std::uint64_t>(j.at("panel"), "panel");
    if (j.contains("lower_bound"))
        cfg.lower_bound_columns =
            detail::field_as<bool>(j.at("lower_bound"), "lower_bound");
    if (j.contains("mixture_prior"))
        cfg.mixture_prior =
            detail::field_as<bool>(j.at("mixture_prior"), "mixture_prior");
    if (j.contains("bound_trials"))
        cfg.bound_trials =
            detail::field_as<std::uint64_t>(j.at("bound_trials"), "bound_trials");
    if (j.contains("sign"))
        cfg.sign = sign_from_string(
            detail::field_as<std::string>(j.at("sign"), "sign"));
    // budget is parsed before this point: a beam/exhaustive engine spec
    // picks up the configured enumeration budget.
    if (j.contains("engine"))
        cfg.engine = engine_from_string(
            detail::field_as<std::string>(j.at("engine"), "engine"), cfg.budget);
    if (j.contains("threshold")) {
        const auto& t = j.at("threshold");
        if (t.is_string()) {
            if (t.get<std::string>() != "auto")
                throw ConfigError("threshold: expected a number or \"auto\"");
        } else {
            cfg.threshold = detail::field_as<double>(t, "threshold");
        }
    }
    if (j.contains("out"))
        cfg.out = detail::field_as<std::string>(j.at("out"), "out");
    return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["lattice"] = {{"d", cfg.d}, {"m", cfg.m}};
    j["class"] = {{"k", cfg.k}, {"oriented", cfg.oriented}};
    if (cfg.start_mode == StartMode::kKnown)
        j["class"]["start"] = cfg.start;
    else
        j["class"]["start"] = "unknown";
    j["psi_grid"] = cfg.psi_grid;
    j["trials"] = cfg.trials;
    j["sign"] = to_string(cfg.sign);
    j["engine"] = engine_to_string(cfg.engine);
    if (std::isnan(cfg.threshold))
        j["threshold"] = "auto";
    else
        j["threshold"] = cfg.threshold;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["budget"] = cfg.budget;
    j["panel"] = cfg.panel;
    j["lower_bound"] = cfg.lower_bound_columns;
    j["mixture_prior"] = cfg.mixture_prior;
    j["bound_trials"] = cfg.bound_trials;
    j["out"] = cfg.out;
    return j;
}

/// Applies one --set override of the form "dotted.key=value" to a raw JSON
/// document.  The value is parsed as JSON when it is valid JSON ("12",
/// "true", "[0,0.1]"), as a comma-separated number list when every piece is
/// numeric ("0,0.05,0.1"), and as a bare string otherwise ("beam:8").
inline void apply_override(nlohmann::json& doc, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set: expected key=value (got \"" + spec + "\")");
    const std::string key = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        // Not standalone JSON: try a comma-separated number list.
        std::vector<double> numbers;
        bool all_numeric = raw.find(',') != std::string::npos;
        std::stringstream pieces(raw);
        std::string piece;
        while (all_numeric && std::getline(pieces, piece, ',')) {
            try {
                std::size_t used = 0;
                numbers.push_back(std::stod(piece, &used));
                all_numeric = used == piece.size();
            } catch (const std::exception&) {
                all_numeric = false;
            }
        }
        if (all_numeric)
            value = numbers;
        else
            value = raw;  // bare string ("unknown", "beam:8", ...)
    }

    nlohmann::json* node = &doc;
    std::stringstream path(key);
    std::string part, next;
    if (!std::getline(path, part, '.'))
        throw ConfigError("--set: empty key in \"" + spec + "\"");
    while (std::getline(path, next, '.')) {
        node = &(*node)[part];
        if (!node->is_object() && !node->is_null())
            throw ConfigError("--set: " + key + " descends through a non-object");
        part = next;
    }
    (*node)[part] = value;
}

/// Reads a config file, applies overrides in order, and parses the result.
inline ExperimentConfig load_config(const std::string& path,
                                    const std::vector<std::string>& overrides) {
    nlohmann::json doc;
    if (path.empty()) {
        doc = nlohmann::json::object();
    } else {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config: cannot read \"" + path + "\"");
        doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw ConfigError("config: \"" + path + "\" is not valid JSON");
    }
    for (const auto& spec : overrides) apply_override(doc, spec);
    return experiment_from_json(doc);
}

/// Cross-field validation; throws ConfigError naming the offending field.
/// Runs before any simulation so violations never burn compute.
inline void validate(const ExperimentConfig& cfg) {
    if (cfg.d < 1) throw ConfigError("lattice.d: must be >= 1");
    if (cfg.m < 2) throw ConfigError("lattice.m: must be >= 2");
    if (cfg.k < 2) throw ConfigError("class.k: must be >= 2");
    std::uint64_t n = 0;
    try {
        n = TorusLattice(cfg.d, cfg.m).n();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("lattice: ") + e.what());
    }
    if (cfg.start_mode == StartMode::kKnown) {
        if (cfg.start >= n)
            throw ConfigError("class.start: node id exceeds the lattice size");
        if (cfg.k > cfg.m)
            throw ConfigError(
                "class.k: the known-start regime requires k <= m (k = " +
                std::to_string(cfg.k) + ", m = " + std::to_string(cfg.m) + ")");
    }
    if (cfg.psi_grid.empty())
        throw ConfigError("psi_grid: must contain at least one value");
    for (double psi : cfg.psi_grid) {
        if (!(std::fabs(psi) < 1.0))
            throw ConfigError("psi_grid: every entry needs |psi| < 1");
        if (cfg.lower_bound_columns && !(std::fabs(psi) < 1.0 / 9.0))
            throw ConfigError(
                "psi_grid: lower-bound columns require |psi| < 1/9 on the "
                "whole grid");
    }
    if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
    if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
    if (cfg.budget < 1) throw ConfigError("budget: must be >= 1");
    if (cfg.panel < 32)
        throw ConfigError("panel: the planted-path panel must hold >= 32 paths");
    if (!std::isnan(cfg.threshold) && !(cfg.threshold > 0.0))
        throw ConfigError("threshold: must be positive (or \"auto\")");
    if (cfg.mixture_prior) {
        if (cfg.start_mode != StartMode::kUnknown)
            throw ConfigError(
                "mixture_prior: the mixture construction needs an unknown "
                "start");
        if (cfg.m % (2 * static_cast<std::int64_t>(cfg.k)) != 0)
            throw ConfigError(
                "lattice.m: mixture-prior experiments require m divisible by "
                "2k (m = " + std::to_string(cfg.m) +
                ", 2k = " + std::to_string(2 * cfg.k) + ")");
    }
    if (cfg.engine.kind == EngineKind::kOrientedDP && !cfg.oriented)
        throw ConfigError(
            "engine: dp applies to oriented classes only; use exhaustive or "
            "beam:<width>");
    if (cfg.bound_trials < 1000)
        throw ConfigError("bound_trials: must be >= 1000");
    if (cfg.out.empty()) throw ConfigError("out: must not be empty");
}

}  // namespace pathscan
