#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhdbl/norms.hpp"
#include "mhdbl/solver.hpp"

namespace mhdbl {

/// Parameter schedule for one perturbation size eps:
///   delta = 1 / ln(1/eps), alpha = 1/2 - delta, beta1 = beta2 = delta/2,
///   K = 4 C / delta, eta1 = delta, eta2 = delta / 8.
/// alpha_norm is alpha clamped to [1/4, 1/2]; it is the weight actually used
/// for the norms, since alpha leaves that range once eps > e^{-2} or
/// eps < e^{-4}.
struct LifespanParams {
    double epsilon = 0.0;
    double tau0 = 0.5;
    double delta = 0.0;
    double alpha = 0.5;
    double alpha_norm = 0.5;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double K = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
    double C = 1.0;       ///< shear constant C_H
    double C0 = 1.0;      ///< constant of the radius ODE
    double C_bar = 1.0;   ///< constant of the lifespan formula
    double lambda = 0.0;  ///< exponent 2 - 4 / (ln(1/eps) + 2)
    bool in_regime = false;  ///< eps < e^{-2}, so that alpha lies in (0, 1/2)
};

/// eps in [0, 1); eps = 0 gives delta = 0 and K = inf. Throws DomainError.
LifespanParams make_params(double epsilon, double c_shear, double tau0, double c0, double c_bar = 1.0);

/// C_bar (1 / (eps ln(1/eps)^3))^{2 - 4/(ln(1/eps) + 2)} - 1. Throws DomainError
/// unless 0 < eps < 1 and C_bar > 0.
double theoretical_lifespan(double epsilon, double c_bar);

/// Norm sums entering the radius ODE at one time: x = ||u~||_X + ||b~||_X,
/// d = ||u~||_D + ||b~||_D.
struct RateSample {
    double t = 0.0;
    double x = 0.0;
    double d = 0.0;
};

RateSample rate_sample(const NormBundle& u, const NormBundle& b);

/// int_{a.t}^{b.t} (<s>^{-1/4} x(s) + <s>^{1/4} d(s)) ds with x, d linear
/// between the samples and the weights integrated exactly.
double rate_integral(const RateSample& a, const RateSample& b);

/// One step of d(tau^{3/2})/dt = -(3 C0 (K + 1) / 2) (<t>^{-1/4} x + <t>^{1/4} d).
/// Never increases tau. Throws RadiusCollapsed when tau^{3/2} would drop to 0.
double tau_step(double tau, const RateSample& a, const RateSample& b, const LifespanParams& p);
double tau_step(double tau, const NormBundle& u0, const NormBundle& b0, const NormBundle& u1, const NormBundle& b1,
                const LifespanParams& p);

/// Sampled radius history.
struct TauTrace {
    std::vector<double> t;
    std::vector<double> tau;
    bool nonincreasing() const;
};

struct GridSpec {
    std::size_t nx = 32;
    std::size_t ny = 128;
    double lx = 6.283185307179586;
    double y_max = 15.0;
    double stretch = 3.0;

    GridPtr make() const;
};

enum class EndReason { RadiusFloor, NormCap, NonFinite, Horizon };

const char* end_reason_name(EndReason r);

struct TraceRow {
    std::uint64_t step = 0;
    double t = 0.0;
    double tau = 0.0;
    double xu = 0.0, xb = 0.0, du = 0.0, db = 0.0;
};

struct ExperimentConfig {
    GridSpec grid;
    SolverConfig solver{1e-2, 50.0};  ///< t_max is the horizon
    double b_bar = 1.0;
    double u_bar = 1.0;
    ShearDatum datum = ShearDatum::Erf;
    double epsilon = 0.1;
    double tau0 = 0.5;
    int m_max = 16;
    double c_shear = 1.0;
    double c0 = 1.0;
    double c_bar = 1.0;
    double norm_cap = 1e3;  ///< stop once a norm exceeds this multiple of its initial value
    int modes = 3;
    std::uint64_t seed = 1;
    std::uint64_t trace_every = 1;
    std::uint64_t checkpoint_every = 0;  ///< steps; 0 disables
    std::filesystem::path out_dir;       ///< empty: nothing is written

    void validate() const;
};

struct ExperimentRecord {
    LifespanParams params;
    double b_bar = 1.0;
    double t_end = 0.0;
    EndReason end_reason = EndReason::Horizon;
    double tau_final = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t cfl_warnings = 0;
    std::string detail;
    std::vector<TraceRow> trace;

    TauTrace tau_trace() const;
};

/// Initial (u, b) from the seeded shapes, each scaled to X_{2 tau0, 1/2} norm eps.
PerturbationState calibrated_initial(const GridPtr& grid, const ExperimentConfig& cfg);

/// Co-integrates the solver, the norms of (u~, b~) and the radius ODE until
/// the first end condition. Writes trace.csv, record.json and checkpoints
/// when cfg.out_dir is set.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

/// Continues a run from a checkpoint stem written by run_experiment.
ExperimentRecord resume_experiment(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint);

/// C0-hat of the a-priori monitor over [0, t_cal] of a run with cfg's data.
double calibrate_c0(const ExperimentConfig& cfg, double t_cal);

/// Quadratic part only: the monitor excess of the summed u~, b~ inequalities
/// at eps minus twice that at eps/2, divided by twice the nonlinear term at
/// eps. Cancels the part of the excess that is linear in the amplitude.
double calibrate_c0_quadratic(const ExperimentConfig& cfg, double t_cal);

/// Least-squares fit log T_end = log C + lambda log(1/eps).
struct LambdaFit {
    double lambda = 0.0;
    double log_c = 0.0;
    std::vector<double> epsilon;
    std::vector<double> residuals;
    std::size_t used = 0;
    std::size_t censored = 0;  ///< horizon cells left out
};

/// Excludes horizon-censored and non-finite cells. Throws DegenerateFit when
/// fewer than two cells with distinct eps remain.
LambdaFit fit_lambda(std::span<const ExperimentRecord> cells);

/// Fake records with T_end = c eps^{-lambda}, for checking the fit.
std::vector<ExperimentRecord> synthetic_records(std::span<const double> eps, double lambda, double c = 1.0);

enum class C0Source { Monitor, Quadratic, Fixed };

struct SweepConfig {
    ExperimentConfig base;
    std::vector<double> epsilon{0.2, 0.1, 0.05, 0.025};
    std::vector<double> b_bar{1.0, 0.0};
    unsigned jobs = 1;
    C0Source c0_source = C0Source::Monitor;  ///< Fixed uses base.c0
    double calibration_time = 1.0;
};

struct StabilizationRow {
    double epsilon;
    double t_mhd;       ///< b_bar = 1
    double t_prandtl;   ///< b_bar = 0
    bool stabilized;    ///< t_mhd >= t_prandtl
};

struct SweepResult {
    double c0 = 0.0;
    bool c0_calibrated = false;
    std::vector<ExperimentRecord> cells;  ///< b_bar-major, eps in config order
    std::vector<double> fit_b_bar;
    std::vector<std::optional<LambdaFit>> fits;
    std::vector<std::string> fit_errors;
    std::vector<StabilizationRow> stabilization;
    std::vector<std::string> warnings;
};

/// Runs every (b_bar, eps) cell on the same seeded data, jobs at a time.
/// Cells that throw are recorded as non-finite with the message in detail.
SweepResult sweep(const SweepConfig& cfg);

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows);
void write_sweep_csv(const std::filesystem::path& path, std::span<const ExperimentRecord> cells);

}  // namespace mhdbl
