#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mhdbl/grid.hpp"
#include "mhdbl/kernels.hpp"

namespace mhdbl {

enum class ShearDatum {
    Erf,     ///< u_s0(y) = (1/sqrt(pi)) int_0^y exp(-z^2/4) dz, evolved in closed form
    Cutoff,  ///< smooth step, 0 for y <= 1 and u_bar for y >= 2, evolved numerically
    Custom,  ///< caller-supplied samples (tests)
};

/// Background shear u_s(t, y) with cached y-derivatives on the grid nodes.
struct ShearProfile {
    GridPtr grid;
    double t = 0.0;
    double u_bar = 1.0;
    ShearDatum datum = ShearDatum::Erf;
    std::vector<double> values;
    std::vector<double> dy1;
    std::vector<double> dy2;
    std::vector<double> dy3;  ///< equals d/dt of dy1 for a heat-equation solution
};

/// Exact heat evolution of the erf datum: u_bar * erf(y / (2 sqrt(1 + t))).
ShearProfile erf_shear(GridPtr grid, double t, double u_bar);

/// Septic smootherstep cutoff datum at t = 0; derivatives from the y-stencils.
ShearProfile cutoff_shear(GridPtr grid, double u_bar);

/// Profile from samples; derivatives from the y-stencils.
ShearProfile profile_from_values(GridPtr grid, double t, double u_bar, std::vector<double> values,
                                 ShearDatum datum = ShearDatum::Custom);

/// Crank-Nicolson stepper for d_t u = d_y^2 u with u(0) = 0, u(y_max) = u_bar
/// using the fourth-order y-stencils. The banded factorization is built once.
class HeatStepper {
public:
    HeatStepper(GridPtr grid, double dt, double u_bar);
    double dt() const { return dt_; }
    ShearProfile step(const ShearProfile& p) const;

private:
    GridPtr grid_;
    double dt_;
    double u_bar_;
    kernels::BandedLU lhs_;
};

ShearProfile step_heat(const ShearProfile& p, double dt);

/// Profiles at each requested time (sorted, >= 0). Erf uses the closed form;
/// Cutoff integrates with Crank-Nicolson, using at most `max_dt` per step and
/// steps no longer than `dt_fraction` * (1 + t).
std::vector<ShearProfile> shear_trace(ShearDatum datum, GridPtr grid, double u_bar,
                                      std::span<const double> times, double max_dt = 0.05,
                                      double dt_fraction = 0.01);

/// One row of the decay table.
struct HSample {
    double t;
    double sup_dy1;
    double sup_dy2;
    double l1_dy1;
    double weighted_dy2;  ///< || theta_alpha d_y^2 u_s ||_{L^2_y}
};

/// Decay-rate fit for the shear-flow hypotheses over a finite time window.
struct HReport {
    double alpha = 0.5;
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<HSample> samples;
    double slope_dy1 = 0.0;       ///< expected -1/2
    double slope_dy2 = 0.0;       ///< expected -1
    double slope_weighted = 0.0;  ///< expected -3/4
    double l1_min = 0.0;
    double l1_max = 0.0;
    double c_dy1 = 0.0;  ///< max_t <t>^{1/2} ||d_y u_s||_inf
    double c_dy2 = 0.0;  ///< max_t <t> ||d_y^2 u_s||_inf
    double c_weighted = 0.0;
    double c_h = 0.0;  ///< max of all ratios and the L^1 bound
};

/// The weighted norm skips nodes where theta exceeds e^27 (the stepped
/// profiles only hold round-off there).
/// Needs >= 20 profiles with t0 >= 1 and t1 >= 10 t0; throws InsufficientSamples.
HReport verify_H(std::span<const ShearProfile> trace, double alpha);

/// Columns: t, sup_dy1, sup_dy2, l1_dy1, weighted_dy2.
void write_h_csv(const std::filesystem::path& path, const HReport& report);

/// Least-squares slope of ys against xs.
double ls_slope(std::span<const double> xs, std::span<const double> ys);

}  // namespace mhdbl
