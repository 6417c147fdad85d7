#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mhdbl/lifespan.hpp"

namespace mhdbl {

/// Parameters of the shear-flow check (decay hypotheses).
struct ShearCheckConfig {
    double t0 = 10.0;
    double t1 = 1000.0;
    int samples = 21;
    std::size_t ny = 1024;
    double stretch = 4.0;
    double y_factor = 15.0;  ///< y_max = y_factor sqrt(1 + t1)
};

struct VerifyConfig {
    std::size_t samples = 1000;
};

/// Everything a run needs, loaded from YAML. Every block and key is
/// optional; unknown keys are rejected.
///
///   grid:     nx, ny, lx, y_max, stretch
///   solver:   dt, t_max, scheme (imex-cn | explicit), blowup_threshold, norm_cap
///   physics:  b_bar, u_bar, shear (erf | cutoff)
///   norms:    tau0, alpha, m_max
///   lifespan: epsilon (list), b_bar (list), c0 (monitor | quadratic | number),
///             c_bar, c_shear, calibration_time, modes
///   io:       out, checkpoint_every, trace_every, seed
///   shear:    t0, t1, samples, ny, stretch, y_factor
///   verify:   samples
struct RunConfig {
    GridSpec grid;
    SolverConfig solver{1e-2, 50.0};
    double norm_cap = 1e3;

    double b_bar = 1.0;
    double u_bar = 1.0;
    ShearDatum datum = ShearDatum::Erf;

    double tau0 = 0.5;
    double alpha = 0.5;
    int m_max = 16;

    std::vector<double> epsilon{0.2, 0.1, 0.05, 0.025};
    std::vector<double> sweep_b_bar{1.0, 0.0};
    C0Source c0_source = C0Source::Monitor;
    double c0 = 1.0;
    double c_bar = 1.0;
    double c_shear = 1.0;
    double calibration_time = 1.0;
    int modes = 3;

    std::filesystem::path out = "out";
    std::uint64_t checkpoint_every = 0;
    std::uint64_t trace_every = 1;
    std::uint64_t seed = 1;

    ShearCheckConfig shear;
    VerifyConfig verify;
};

/// Throws ConfigError with "<origin>:<line>: <block>.<key> ..." messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks shared by the loader and command-line overrides.
void check_config(const RunConfig& c);

/// Effective configuration, as written into manifests.
nlohmann::json config_json(const RunConfig& c);
/// FNV-1a of the compact dump of config_json, as 16 hex digits.
std::string config_hash(const RunConfig& c);

ExperimentConfig experiment_config(const RunConfig& c, double epsilon, double b_bar);
SweepConfig sweep_config(const RunConfig& c, unsigned jobs);

}  // namespace mhdbl
