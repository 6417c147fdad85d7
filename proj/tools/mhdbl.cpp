// mhdbl: batch driver for the boundary-layer lab.
//
//   mhdbl shear    [--config F] [--out D]
//   mhdbl simulate [--config F] [--epsilon E] [--b-bar B] [--resume STEM]
//   mhdbl sweep    [--config F] [--jobs N] [--synthetic LAMBDA]
//   mhdbl verify   [--config F] [--seed S] [--samples N] [--fault F]
//   mhdbl norms    --snapshot P [--field NAME] [--tau T] [--time T]
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime failure, 3 verification failure.

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mhdbl/config.hpp"
#include "mhdbl/errors.hpp"
#include "mhdbl/lifespan.hpp"
#include "mhdbl/norms.hpp"
#include "mhdbl/shear.hpp"
#include "mhdbl/snapshot.hpp"
#include "mhdbl/verify.hpp"

#ifndef MHDBL_VERSION
#define MHDBL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mhdbl;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2, kVerify = 3 };

void log(const std::string& msg) { std::cerr << "[mhdbl] " << msg << '\n'; }

struct Common {
    std::string config;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::vector<std::string> argv;
};

RunConfig load(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.out.empty()) cfg.out = c.out;
    check_config(cfg);
    return cfg;
}

void ensure_dir(const fs::path& d) {
    if (fs::exists(d)) return;
    fs::create_directories(d);
    log("created output directory " + d.string());
}

json manifest(const std::string& command, const RunConfig& cfg, const Common& c) {
    return {{"command", command},
            {"version", MHDBL_VERSION},
            {"config_hash", config_hash(cfg)},
            {"config", config_json(cfg)},
            {"config_file", c.config},
            {"seed", cfg.seed},
            {"argv", c.argv},
            {"compiler", __VERSION__},
            {"fftw", std::string(fftw_version)}};
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

json record_json(const ExperimentRecord& r) {
    return {{"epsilon", r.params.epsilon},
            {"b_bar", r.b_bar},
            {"T_end", r.t_end},
            {"end_reason", end_reason_name(r.end_reason)},
            {"tau_final", r.tau_final},
            {"steps", r.steps},
            {"cfl_warnings", r.cfl_warnings},
            {"detail", r.detail}};
}

json fit_json(const LambdaFit& f) {
    return {{"lambda", f.lambda},
            {"log_c", f.log_c},
            {"epsilon", f.epsilon},
            {"residuals", f.residuals},
            {"used", f.used},
            {"censored", f.censored}};
}

unsigned job_count(unsigned requested) {
    return requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
}

double c0_for(const RunConfig& cfg) {
    if (cfg.c0_source == C0Source::Fixed) return cfg.c0;
    ExperimentConfig cal = experiment_config(cfg, *std::max_element(cfg.epsilon.begin(), cfg.epsilon.end()), 1.0);
    cal.out_dir.clear();
    const double c0 = cfg.c0_source == C0Source::Monitor ? calibrate_c0(cal, cfg.calibration_time)
                                                         : calibrate_c0_quadratic(cal, cfg.calibration_time);
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        log("calibration gave C0 = " + std::to_string(c0) + "; using lifespan c0 = " + std::to_string(cfg.c0));
        return cfg.c0;
    }
    return c0;
}

int cmd_shear(const Common& c) {
    const RunConfig cfg = load(c);
    ensure_dir(cfg.out);
    const ShearCheckConfig& s = cfg.shear;
    const GridPtr g = Grid::stretched(4, s.ny, cfg.grid.lx, s.y_factor * std::sqrt(1.0 + s.t1), s.stretch);
    std::vector<double> times(s.samples);
    for (int k = 0; k < s.samples; ++k) times[k] = s.t0 * std::pow(s.t1 / s.t0, double(k) / (s.samples - 1));
    const auto trace = shear_trace(cfg.datum, g, cfg.u_bar, times);
    const HReport r = verify_H(trace, cfg.alpha);
    write_h_csv(cfg.out / "h_trace.csv", r);

    const double l1_err = std::max(std::abs(r.l1_min - cfg.u_bar), std::abs(r.l1_max - cfg.u_bar));
    const bool ok = std::abs(r.slope_dy1 + 0.5) <= 0.05 && std::abs(r.slope_dy2 + 1.0) <= 0.05 &&
                    std::abs(r.slope_weighted + 0.75) <= 0.05 && l1_err <= 1e-6;
    json m = manifest("shear", cfg, c);
    m["summary"] = {{"alpha", r.alpha},         {"t0", r.t0},
                    {"t1", r.t1},               {"slope_dy1", r.slope_dy1},
                    {"slope_dy2", r.slope_dy2}, {"slope_weighted", r.slope_weighted},
                    {"l1_min", r.l1_min},       {"l1_max", r.l1_max},
                    {"C_H", r.c_h},             {"within_tolerance", ok}};
    write_json(cfg.out / "shear_summary.json", m);
    std::printf("slopes: dy1 %.4f  dy2 %.4f  weighted %.4f  (expected -0.5, -1, -0.75)\n", r.slope_dy1,
                r.slope_dy2, r.slope_weighted);
    std::printf("int |d_y u_s| dy in [%.10f, %.10f]; C_H = %.6g\n", r.l1_min, r.l1_max, r.c_h);
    std::printf("%s\n", ok ? "shear decay: consistent" : "shear decay: slopes outside +-0.05");
    return ok ? kOk : kVerify;
}

int cmd_simulate(const Common& c, std::optional<double> epsilon, std::optional<double> b_bar,
                 const std::string& resume) {
    const RunConfig cfg = load(c);
    ExperimentConfig e = experiment_config(cfg, epsilon.value_or(cfg.epsilon.front()), b_bar.value_or(cfg.b_bar));
    e.c0 = c0_for(cfg);
    try {
        e.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
    }
    ensure_dir(e.out_dir);
    log("eps = " + std::to_string(e.epsilon) + ", b_bar = " + std::to_string(e.b_bar) +
        ", C0 = " + std::to_string(e.c0));
    const ExperimentRecord r = resume.empty() ? run_experiment(e) : resume_experiment(e, resume);
    json m = manifest("simulate", cfg, c);
    m["c0"] = e.c0;
    m["resumed_from"] = resume;
    m["record"] = record_json(r);
    m["lifespan_formula"] = r.params.epsilon > 0.0 ? json(theoretical_lifespan(r.params.epsilon, e.c_bar)) : json();
    write_json(e.out_dir / "manifest.json", m);
    std::printf("T_end = %.10g (%s), tau_final = %.6g, steps = %llu\n", r.t_end, end_reason_name(r.end_reason),
                r.tau_final, static_cast<unsigned long long>(r.steps));
    return kOk;
}

int cmd_sweep(const Common& c, std::optional<double> synthetic) {
    const RunConfig cfg = load(c);
    ensure_dir(cfg.out);
    json m = manifest("sweep", cfg, c);
    if (synthetic) {
        const auto recs = synthetic_records(cfg.epsilon, *synthetic);
        json fit;
        try {
            fit = fit_json(fit_lambda(recs));
            std::printf("synthetic lambda %.15g -> fitted %.15g\n", *synthetic, fit["lambda"].get<double>());
        } catch (const DegenerateFit& e) {
            fit = {{"error", e.what()}};
            log(std::string("warning: ") + e.what());
        }
        m["synthetic_lambda"] = *synthetic;
        m["fit"] = fit;
        write_sweep_csv(cfg.out / "sweep.csv", recs);
        write_json(cfg.out / "manifest.json", m);
        return kOk;
    }

    const SweepResult res = sweep(sweep_config(cfg, job_count(c.jobs)));
    write_sweep_csv(cfg.out / "sweep.csv", res.cells);
    m["c0"] = res.c0;
    m["c0_calibrated"] = res.c0_calibrated;
    json cells = json::array();
    for (const auto& r : res.cells) cells.push_back(record_json(r));
    m["cells"] = cells;
    json fits = json::array();
    for (std::size_t i = 0; i < res.fit_b_bar.size(); ++i) {
        json f = {{"b_bar", res.fit_b_bar[i]}};
        if (res.fits[i]) f["fit"] = fit_json(*res.fits[i]);
        else f["error"] = res.fit_errors[i];
        fits.push_back(f);
    }
    m["fits"] = fits;
    json stab = json::array();
    for (const auto& s : res.stabilization)
        stab.push_back({{"epsilon", s.epsilon}, {"T_mhd", s.t_mhd}, {"T_prandtl", s.t_prandtl},
                        {"stabilized", s.stabilized}});
    m["stabilization"] = stab;
    m["warnings"] = res.warnings;
    write_json(cfg.out / "manifest.json", m);

    for (const auto& w : res.warnings) log("warning: " + w);
    std::printf("C0 = %.6g (%s)\n", res.c0, res.c0_calibrated ? "calibrated" : "configured");
    std::printf("%-10s %-6s %-14s %s\n", "epsilon", "b_bar", "T_end", "end");
    for (const auto& r : res.cells)
        std::printf("%-10.4g %-6.3g %-14.8g %s\n", r.params.epsilon, r.b_bar, r.t_end, end_reason_name(r.end_reason));
    for (std::size_t i = 0; i < res.fit_b_bar.size(); ++i) {
        if (res.fits[i]) {
            const LambdaFit& f = *res.fits[i];
            std::printf("b_bar = %g: lambda_fit = %.4f over %zu cells (%zu censored)\n", res.fit_b_bar[i], f.lambda,
                        f.used, f.censored);
        } else {
            std::printf("b_bar = %g: no fit (%s)\n", res.fit_b_bar[i], res.fit_errors[i].c_str());
        }
    }
    for (const auto& s : res.stabilization)
        std::printf("eps %-8.4g T(b=1) %-12.6g T(b=0) %-12.6g %s\n", s.epsilon, s.t_mhd, s.t_prandtl,
                    s.stabilized ? "stabilized" : "not stabilized");
    return kOk;
}

int cmd_verify(const Common& c, std::optional<std::size_t> samples, double fault) {
    const RunConfig cfg = load(c);
    ensure_dir(cfg.out);
    VerifyOptions opt;
    opt.seed = cfg.seed;
    opt.samples = samples.value_or(cfg.verify.samples);
    opt.derivative_fault = fault;
    const auto suites = run_all_suites(opt);
    json report = suites_json(suites);
    report["manifest"] = manifest("verify", cfg, c);
    report["manifest"]["derivative_fault"] = fault;
    write_json(cfg.out / "verify.json", report);
    for (const auto& s : suites)
        std::printf("%-4s %-26s %s (%.1f s)\n", s.passed ? "PASS" : "FAIL", s.name.c_str(), s.detail.c_str(),
                    s.seconds);
    return report["passed"].get<bool>() ? kOk : kVerify;
}

int cmd_norms(const Common& c, const std::string& snapshot, const std::string& field, std::optional<double> tau,
              double time) {
    const RunConfig cfg = load(c);
    ensure_dir(cfg.out);
    const Snapshot snap = read_snapshot(snapshot);
    if (!snap.has(field)) throw ConfigError("norms: snapshot " + snapshot + " has no field '" + field + "'");
    const NormBundle nb = seminorms(snap.get(field), tau.value_or(cfg.tau0), cfg.alpha, time, cfg.m_max);
    const fs::path out = cfg.out / ("norms_" + field + ".csv");
    write_norms_csv(out, nb);
    std::printf("%s: X = %.10g  D = %.10g  Z = %.10g  Y = %.10g%s\n", field.c_str(), nb.total_x, nb.total_d,
                nb.total_z, nb.total_y, nb.truncation_warning ? "  (m_max truncation warning)" : "");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-layer lifespan lab"};
    app.require_subcommand(1);
    Common common;
    common.argv.assign(argv, argv + argc);
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "YAML configuration file")->check(CLI::ExistingFile);
        sub->add_option("--jobs", common.jobs, "parallel cells (default: hardware threads)");
        sub->add_option("--seed", seed, "override io.seed");
        sub->add_option("--out", common.out, "override io.out");
    };

    CLI::App* shear = app.add_subcommand("shear", "decay rates of the background shear");
    add_common(shear);

    CLI::App* simulate = app.add_subcommand("simulate", "one lifespan cell");
    add_common(simulate);
    std::optional<double> epsilon, b_bar;
    std::string resume;
    simulate->add_option("--epsilon", epsilon, "perturbation size (default: first lifespan.epsilon)");
    simulate->add_option("--b-bar", b_bar, "tangential field (default: physics.b_bar)");
    simulate->add_option("--resume", resume, "checkpoint stem to continue from");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "lifespan sweep over epsilon and b_bar");
    add_common(sweep_cmd);
    std::optional<double> synthetic;
    sweep_cmd->add_option("--synthetic", synthetic, "fit synthetic T = eps^-LAMBDA instead of running cells");

    CLI::App* verify = app.add_subcommand("verify", "randomized property suites");
    add_common(verify);
    std::optional<std::size_t> samples;
    double fault = 1.0;
    verify->add_option("--samples", samples, "fields per (alpha, t) cell");
    verify->add_option("--fault", fault, "scale first-derivative stencils (test hook)")->group("");

    CLI::App* norms = app.add_subcommand("norms", "weighted analytic norms of a snapshot field");
    add_common(norms);
    std::string snapshot, field = "u";
    std::optional<double> tau;
    double time = 0.0;
    norms->add_option("--snapshot", snapshot, "snapshot file")->required()->check(CLI::ExistingFile);
    norms->add_option("--field", field, "field name");
    norms->add_option("--tau", tau, "radius (default: norms.tau0)");
    norms->add_option("--time", time, "time entering the weight");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }
    for (CLI::App* sub : app.get_subcommands())
        if (sub->count("--seed")) common.seed = seed;

    try {
        if (*shear) return cmd_shear(common);
        if (*simulate) return cmd_simulate(common, epsilon, b_bar, resume);
        if (*sweep_cmd) return cmd_sweep(common, synthetic);
        if (*verify) return cmd_verify(common, samples, fault);
        if (*norms) return cmd_norms(common, snapshot, field, tau, time);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}
