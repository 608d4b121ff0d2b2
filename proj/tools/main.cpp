// Command-line front end: simulate observations, calibrate thresholds, scan
// samples, sweep risk curves, fit intersection-tail envelopes, and evaluate
// risk lower bounds — everything the library does, scriptable.
//
// Exit codes: 0 success, 2 validation error, 3 budget refusal.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathscan/bounds.hpp"
#include "pathscan/calibration.hpp"
#include "pathscan/config.hpp"
#include "pathscan/eit.hpp"
#include "pathscan/errors.hpp"
#include "pathscan/report.hpp"
#include "pathscan/risk.hpp"
#include "pathscan/sample.hpp"
#include "pathscan/scan.hpp"

namespace {

using namespace pathscan;

/// Class spec grammar: comma-separated key=value pairs, e.g.
/// "k=4,start=0,oriented=true" or "k=6,start=unknown".
struct ClassSpec {
    int k = 0;
    bool known_start = true;
    NodeId start = 0;
    bool oriented = true;
};

ClassSpec parse_class_spec(const std::string& spec) {
    ClassSpec out;
    bool have_k = false;
    std::stringstream pieces(spec);
    std::string piece;
    while (std::getline(pieces, piece, ',')) {
        const std::size_t eq = piece.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("class: expected key=value pairs (got \"" +
                              piece + "\")");
        const std::string key = piece.substr(0, eq);
        const std::string value = piece.substr(eq + 1);
        try {
            if (key == "k") {
                out.k = std::stoi(value);
                have_k = true;
            } else if (key == "start") {
                if (value == "unknown") {
                    out.known_start = false;
                } else {
                    out.known_start = true;
                    out.start = std::stoull(value);
                }
            } else if (key == "oriented") {
                if (value != "true" && value != "false")
                    throw std::invalid_argument(value);
                out.oriented = value == "true";
            } else {
                throw ConfigError("class: unknown key \"" + key + "\"");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("class: bad value for " + key + " (\"" + value +
                              "\")");
        }
    }
    if (!have_k) throw ConfigError("class: k is required");
    return out;
}

PathClass class_from_spec(const TorusLattice& lat, const ClassSpec& spec) {
    if (spec.known_start)
        return PathClass(lat, spec.k, spec.start, spec.oriented);
    return PathClass(lat, spec.k, spec.oriented);
}

Path parse_inline_path(const std::string& text) {
    const std::vector<Path> parsed = paths_from_text(text + "\n", nullptr);
    if (parsed.size() != 1)
        throw ConfigError("path: expected one comma-separated node list");
    return parsed.front();
}

void print_and_maybe_write(const nlohmann::json& j, const std::string& out) {
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) detail::write_text_file(out, j.dump(2) + "\n");
}

nlohmann::json outcome_to_json(const DetectionOutcome& o, double t,
                               Sign sign) {
    return nlohmann::json{{"t", t},
                          {"sign", to_string(sign)},
                          {"v_star", o.v_star},
                          {"argmax_path", o.argmax_path},
                          {"rejected", o.rejected},
                          {"engine_exactness", o.engine_exactness}};
}

// ---- simulate ------------------------------------------------------------

struct SimulateOpts {
    int d = 3;
    std::int64_t m = 8;
    double psi = 0.0;
    std::string path_text;
    std::string path_file;
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;
    std::uint64_t cell = 0;
    std::string out;
};

void run_simulate(const SimulateOpts& opt) {
    const TorusLattice lat(opt.d, opt.m);
    Path planted;
    if (!opt.path_text.empty() && !opt.path_file.empty())
        throw ConfigError("path: give --path or --path-file, not both");
    if (!opt.path_text.empty()) planted = parse_inline_path(opt.path_text);
    if (!opt.path_file.empty()) {
        std::ifstream in(opt.path_file);
        if (!in)
            throw ConfigError("path: cannot read \"" + opt.path_file + "\"");
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::vector<Path> paths = paths_from_text(buffer.str(), &lat);
        if (paths.empty())
            throw ConfigError("path: \"" + opt.path_file + "\" holds no paths");
        planted = paths.front();
    }

    const Sample sample =
        planted.empty()
            ? simulate_null(lat, opt.seed, opt.trial, opt.cell)
            : simulate_alternative(lat, planted, CorrelationModel(opt.psi),
                                   opt.seed, opt.trial, opt.cell);
    write_sample(sample, opt.out);
    nlohmann::json j{{"out", opt.out},
                     {"files", {opt.out + ".f64", opt.out + ".json"}},
                     {"d", sample.d},
                     {"m", sample.m},
                     {"provenance", to_string(sample.provenance)},
                     {"seed", sample.seed}};
    if (!planted.empty()) {
        j["psi"] = sample.psi;
        j["path"] = sample.path;
    }
    std::cout << j.dump(2) << "\n";
}

// ---- calibrate -----------------------------------------------------------

struct CalibrateOpts {
    int k = 0;
    double log_card = -1.0;  // < 0: compute from the class spec
    int d = 3;
    std::int64_t m = 8;
    std::string class_spec;
    std::uint64_t budget = kDefaultEnumerationBudget;
    std::string out;
};

void run_calibrate(const CalibrateOpts& opt) {
    double log_card = opt.log_card;
    int k = opt.k;
    nlohmann::json j;
    if (!opt.class_spec.empty()) {
        const TorusLattice lat(opt.d, opt.m);
        const ClassSpec spec = parse_class_spec(opt.class_spec);
        const PathClass pc = class_from_spec(lat, spec);
        log_card = log_cardinality(pc, opt.budget);
        k = spec.k;
        j["class"] = opt.class_spec;
    } else if (log_card < 0.0) {
        log_card = 0.0;  // a single-path class
    }
    if (k < 2) throw ConfigError("k: must be >= 2 (give --k or a class spec)");
    const double t = calibrate(k, log_card);
    j["k"] = k;
    j["log_cardinality"] = log_card;
    j["t"] = t;
    j["p_t"] = pt(t);
    j["psi_min"] = psi_min(t);
    print_and_maybe_write(j, opt.out);
}

// ---- scan ----------------------------------------------------------------

struct ScanOpts {
    std::string input;
    std::string class_spec;
    std::string t_spec = "auto";
    std::string sign = "plus";
    std::string engine = "dp";
    std::uint64_t budget = kDefaultEnumerationBudget;
    std::string out;
};

void run_scan(const ScanOpts& opt) {
    const Sample sample = read_sample(opt.input);
    const TorusLattice lat(sample.d, sample.m);
    const PathClass pc = class_from_spec(lat, parse_class_spec(opt.class_spec));
    const Sign sign = sign_from_string(opt.sign);
    const ScanEngine engine = engine_from_string(opt.engine, opt.budget);

    double t = 0.0;
    if (opt.t_spec == "auto") {
        const double log_card = log_cardinality(pc, opt.budget);
        t = sign == Sign::kBoth ? calibrate(pc.k, log_card + std::log(2.0))
                                : calibrate(pc.k, log_card);
    } else {
        try {
            std::size_t used = 0;
            t = std::stod(opt.t_spec, &used);
            if (used != opt.t_spec.size()) throw std::invalid_argument(opt.t_spec);
        } catch (const std::exception&) {
            throw ConfigError("t: expected a positive real or \"auto\" (got \"" +
                              opt.t_spec + "\")");
        }
    }

    nlohmann::json j;
    if (sign == Sign::kBoth) {
        const DetectionOutcome plus = scan(sample, pc, t, Sign::kPlus, engine);
        const DetectionOutcome minus = scan(sample, pc, t, Sign::kMinus, engine);
        j = nlohmann::json{{"t", t},
                           {"sign", "both"},
                           {"plus", outcome_to_json(plus, t, Sign::kPlus)},
                           {"minus", outcome_to_json(minus, t, Sign::kMinus)},
                           {"rejected", plus.rejected || minus.rejected}};
    } else {
        j = outcome_to_json(scan(sample, pc, t, sign, engine), t, sign);
    }
    print_and_maybe_write(j, opt.out);
}

// ---- eit-fit and lower-bound ----------------------------------------------

struct SamplerOpts {
    std::string kind = "oriented";  // oriented | mixture
    int d = 3;
    std::int64_t m = 8;
    int k = 6;
    NodeId start = 0;
    std::uint64_t trials = 20000;
    std::uint64_t seed = 1;
};

std::unique_ptr<PriorSampler> make_sampler(const TorusLattice& lat,
                                           const SamplerOpts& opt) {
    if (opt.kind == "oriented")
        return std::make_unique<OrientedUniformSampler>(lat, opt.k, opt.start,
                                                        opt.seed);
    if (opt.kind == "mixture")
        return std::make_unique<HypercubeMixtureSampler>(lat, opt.k, opt.seed);
    throw ConfigError("sampler: expected oriented or mixture (got \"" +
                      opt.kind + "\")");
}

void run_eit_fit(const SamplerOpts& opt, const std::string& out) {
    const TorusLattice lat(opt.d, opt.m);
    const auto sampler = make_sampler(lat, opt);
    const EITFit fit = estimate_eit(*sampler, opt.trials);
    print_and_maybe_write(eit_to_json(fit), out);
}

struct LowerBoundOpts {
    double psi = 0.0;
    std::string fit_file;
    std::string regime = "auto";  // known | unknown | auto
    std::uint64_t j_blocks = 0;
    bool inline_sampler = false;
    SamplerOpts sampler;
    std::string out;
};

void run_lower_bound(const LowerBoundOpts& opt) {
    EITFit fit;
    std::string regime = opt.regime;
    std::uint64_t j_blocks = opt.j_blocks;

    if (!opt.fit_file.empty() && opt.inline_sampler)
        throw ConfigError("fit: give --fit or a sampler spec, not both");
    if (!opt.fit_file.empty()) {
        std::ifstream in(opt.fit_file);
        if (!in)
            throw ConfigError("fit: cannot read \"" + opt.fit_file + "\"");
        const nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded())
            throw ConfigError("fit: \"" + opt.fit_file + "\" is not valid JSON");
        fit = eit_from_json(doc);
        if (regime == "auto") regime = "known";
    } else if (opt.inline_sampler) {
        const TorusLattice lat(opt.sampler.d, opt.sampler.m);
        const auto sampler = make_sampler(lat, opt.sampler);
        fit = estimate_eit(*sampler, opt.sampler.trials);
        if (regime == "auto")
            regime = opt.sampler.kind == "mixture" ? "unknown" : "known";
        if (opt.sampler.kind == "mixture" && j_blocks == 0)
            j_blocks = static_cast<const HypercubeMixtureSampler&>(*sampler)
                           .block_count();
    } else {
        throw ConfigError(
            "fit: give --fit <file> or an inline sampler (--sampler ...)");
    }

    LowerBoundReport report;
    if (regime == "known") {
        report = known_start_bound(opt.psi, fit);
    } else if (regime == "unknown") {
        if (j_blocks == 0)
            throw ConfigError("j: the unknown-start bound needs --j blocks");
        report = unknown_start_bound(opt.psi, fit, j_blocks);
    } else {
        throw ConfigError("regime: expected known or unknown (got \"" +
                          regime + "\")");
    }
    nlohmann::json j = lower_bound_to_json(report);
    j["fit"] = eit_to_json(fit);
    print_and_maybe_write(j, opt.out);
}

// ---- risk-curve and moment-check -------------------------------------------

struct SweepOpts {
    std::string config_file;
    std::vector<std::string> sets;
    std::string formats = "csv,json,svg";
    // Optional overrides for the config document.
    std::int64_t seed = -1;
    int threads = -1;
    std::string out;
};

ExperimentConfig sweep_config(const SweepOpts& opt) {
    std::vector<std::string> overrides = opt.sets;
    if (opt.seed >= 0)
        overrides.push_back("seed=" + std::to_string(opt.seed));
    if (opt.threads >= 0)
        overrides.push_back("threads=" + std::to_string(opt.threads));
    if (!opt.out.empty()) overrides.push_back("out=" + opt.out);
    return load_config(opt.config_file, overrides);
}

std::vector<EmitFormat> parse_formats(const std::string& spec) {
    std::vector<EmitFormat> out;
    std::stringstream pieces(spec);
    std::string piece;
    while (std::getline(pieces, piece, ',')) {
        if (piece == "csv")
            out.push_back(EmitFormat::kCsv);
        else if (piece == "json")
            out.push_back(EmitFormat::kJson);
        else if (piece == "svg")
            out.push_back(EmitFormat::kSvg);
        else
            throw ConfigError("formats: expected csv, json, or svg (got \"" +
                              piece + "\")");
    }
    if (out.empty()) throw ConfigError("formats: must list at least one format");
    return out;
}

void run_risk_curve_cmd(const SweepOpts& opt) {
    const ExperimentConfig cfg = sweep_config(opt);
    const RiskReport report = run_risk_curve(cfg);
    nlohmann::json files = nlohmann::json::array();
    for (EmitFormat f : parse_formats(opt.formats))
        for (const std::string& path : emit(report, f)) files.push_back(path);
    nlohmann::json j = risk_report_to_json(report);
    j["files"] = files;
    std::cout << j.dump(2) << "\n";
}

void run_moment_check_cmd(const SweepOpts& opt) {
    const ExperimentConfig cfg = sweep_config(opt);
    const MomentReport report = run_moment_check(cfg);
    nlohmann::json files = nlohmann::json::array();
    for (EmitFormat f : parse_formats(opt.formats)) {
        if (f == EmitFormat::kSvg) continue;  // no plot for moments
        for (const std::string& path : emit(report, f)) files.push_back(path);
    }
    nlohmann::json j = moment_report_to_json(report);
    j["files"] = files;
    std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "pathscan: simulation and detection laboratory for correlated paths "
        "hidden in lattice noise"};
    app.require_subcommand(1);

    SimulateOpts sim;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Draw a null or planted-path sample and write it to disk");
    simulate->add_option("--d", sim.d, "lattice dimension");
    simulate->add_option("--m", sim.m, "lattice side length");
    simulate->add_option("--psi", sim.psi, "AR(1) correlation along the path");
    simulate->add_option("--path", sim.path_text,
                         "planted path, comma-separated node ids");
    simulate->add_option("--path-file", sim.path_file,
                         "file with one path per line; the first is planted");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--trial", sim.trial, "trial index within the seed");
    simulate->add_option("--cell", sim.cell, "experiment cell index");
    simulate->add_option("--out", sim.out, "output basename")->required();
    simulate->callback([&sim] { run_simulate(sim); });

    CalibrateOpts cal;
    CLI::App* calibrate_cmd = app.add_subcommand(
        "calibrate", "Solve for the scan threshold t at a class size");
    calibrate_cmd->add_option("--k", cal.k, "path length");
    calibrate_cmd->add_option("--log-card", cal.log_card,
                              "log class cardinality (default 0)");
    calibrate_cmd->add_option("--d", cal.d, "lattice dimension (with --class)");
    calibrate_cmd->add_option("--m", cal.m, "lattice side (with --class)");
    calibrate_cmd->add_option("--class", cal.class_spec,
                              "class spec k=..,start=..,oriented=..");
    calibrate_cmd->add_option("--budget", cal.budget, "enumeration budget");
    calibrate_cmd->add_option("--out", cal.out, "also write the JSON here");
    calibrate_cmd->callback([&cal] { run_calibrate(cal); });

    ScanOpts scan_opt;
    CLI::App* scan_cmd = app.add_subcommand(
        "scan", "Run the calibrated scan test on a stored sample");
    scan_cmd->add_option("--input", scan_opt.input, "sample basename")
        ->required();
    scan_cmd->add_option("--class", scan_opt.class_spec,
                         "class spec k=..,start=..,oriented=..")
        ->required();
    scan_cmd->add_option("--t", scan_opt.t_spec, "threshold, or \"auto\"");
    scan_cmd->add_option("--sign", scan_opt.sign, "plus | minus | both");
    scan_cmd->add_option("--engine", scan_opt.engine,
                         "exhaustive | dp | beam:<width>");
    scan_cmd->add_option("--budget", scan_opt.budget, "enumeration budget");
    scan_cmd->add_option("--out", scan_opt.out, "also write the JSON here");
    scan_cmd->callback([&scan_opt] { run_scan(scan_opt); });

    SamplerOpts eit;
    std::string eit_out;
    CLI::App* eit_cmd = app.add_subcommand(
        "eit-fit", "Measure an exponential intersection-tail envelope");
    eit_cmd->add_option("--sampler", eit.kind, "oriented | mixture");
    eit_cmd->add_option("--d", eit.d, "lattice dimension");
    eit_cmd->add_option("--m", eit.m, "lattice side length");
    eit_cmd->add_option("--k", eit.k, "path length");
    eit_cmd->add_option("--start", eit.start, "shared start (oriented only)");
    eit_cmd->add_option("--trials", eit.trials, "sample pairs to draw");
    eit_cmd->add_option("--seed", eit.seed, "master seed");
    eit_cmd->add_option("--out", eit_out, "also write the JSON here");
    eit_cmd->callback([&eit, &eit_out] { run_eit_fit(eit, eit_out); });

    LowerBoundOpts lb;
    CLI::App* lb_cmd = app.add_subcommand(
        "lower-bound", "Evaluate the Bayes risk lower bound at a psi");
    lb_cmd->add_option("--psi", lb.psi, "correlation level")->required();
    lb_cmd->add_option("--fit", lb.fit_file, "EIT fit JSON file");
    lb_cmd->add_option("--regime", lb.regime, "known | unknown | auto");
    lb_cmd->add_option("--j", lb.j_blocks, "block count (unknown regime)");
    CLI::Option* lb_sampler =
        lb_cmd->add_option("--sampler", lb.sampler.kind, "oriented | mixture");
    lb_cmd->add_option("--d", lb.sampler.d, "lattice dimension");
    lb_cmd->add_option("--m", lb.sampler.m, "lattice side length");
    lb_cmd->add_option("--k", lb.sampler.k, "path length");
    lb_cmd->add_option("--start", lb.sampler.start, "shared start");
    lb_cmd->add_option("--trials", lb.sampler.trials, "sample pairs to draw");
    lb_cmd->add_option("--seed", lb.sampler.seed, "master seed");
    lb_cmd->add_option("--out", lb.out, "also write the JSON here");
    lb_cmd->callback([&lb, lb_sampler] {
        lb.inline_sampler = lb_sampler->count() > 0;
        run_lower_bound(lb);
    });

    SweepOpts risk;
    CLI::App* risk_cmd = app.add_subcommand(
        "risk-curve", "Monte Carlo risk estimates across a psi grid");
    risk_cmd->add_option("--config", risk.config_file, "experiment JSON file");
    risk_cmd->add_option("--set", risk.sets, "key=value config override")
        ->take_all();
    risk_cmd->add_option("--formats", risk.formats, "csv,json,svg subset");
    risk_cmd->add_option("--seed", risk.seed, "override the config seed");
    risk_cmd->add_option("--threads", risk.threads, "override worker count");
    risk_cmd->add_option("--out", risk.out, "override the output prefix");
    risk_cmd->callback([&risk] { run_risk_curve_cmd(risk); });

    SweepOpts moment;
    CLI::App* moment_cmd = app.add_subcommand(
        "moment-check", "Verify planted-path score moments on a psi grid");
    moment_cmd->add_option("--config", moment.config_file,
                           "experiment JSON file");
    moment_cmd->add_option("--set", moment.sets, "key=value config override")
        ->take_all();
    moment_cmd->add_option("--formats", moment.formats, "csv,json subset");
    moment_cmd->add_option("--seed", moment.seed, "override the config seed");
    moment_cmd->add_option("--threads", moment.threads,
                           "override worker count");
    moment_cmd->add_option("--out", moment.out, "override the output prefix");
    moment_cmd->callback([&moment] { run_moment_check_cmd(moment); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const pathscan::BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
