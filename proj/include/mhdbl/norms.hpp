#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mhdbl/exec.hpp"
#include "mhdbl/field.hpp"
#include "mhdbl/operators.hpp"

namespace mhdbl {

struct TransformedState;

/// M_m = sqrt(m + 1) / m!. The norm engine only uses log_mm_coeff, which
/// switches to lgamma for m > 20.
double mm_coeff(int m);
double log_mm_coeff(int m);

/// Per-mode weighted energies of f: for rfft bin k,
///   wx[k] = int |theta c_k|^2,  wd[k] = int |theta d_y c_k|^2,  wz[k] = int |theta z c_k|^2
/// scaled so that sum_k kappa_k^{2m} wx[k] = || theta d_x^m f ||^2 (Nyquist
/// bin kept only for m = 0).
struct ModeEnergies {
    std::vector<double> kappa;
    std::vector<double> wx, wd, wz;
    double nyquist_x = 0.0, nyquist_d = 0.0, nyquist_z = 0.0;

    /// log || theta d_x^m f ||, log || theta d_y d_x^m f ||, log || theta z d_x^m f ||.
    /// -inf for a vanishing norm.
    double log_x(int m) const;
    double log_d(int m) const;
    double log_z(int m) const;
};

ModeEnergies mode_energies(const Field& f, const GaussianWeight& w, Exec exec = Exec::Parallel);

/// Semi-norm sequences of one field for m = 0..m_max.
struct NormBundle {
    int m_max = 0;
    double tau = 0.0;
    double alpha = 0.0;
    double t = 0.0;
    std::vector<double> x, d, z, y;  ///< X_m, D_m, Z_m, Y_m
    double total_x = 0.0;
    double total_d = 0.0;
    double total_z = 0.0;
    double total_y = 0.0;  ///< from m = 1
    bool truncation_warning = false;  ///< X_{m_max} > 1e-10 of the X total
};

/// Spectral evaluation in log space. Throws OverflowAtM.
NormBundle seminorms(const Field& f, double tau, double alpha, double t, int m_max, Exec exec = Exec::Parallel);

/// Reference path: repeated spectral d_x followed by weighted quadrature.
NormBundle seminorms_direct(const Field& f, double tau, double alpha, double t, int m_max);

/// || theta d_y d_x^m f ||^2 / ((alpha / <t>) || theta d_x^m f ||^2); +inf when the
/// denominator vanishes.
double poincare_check(const Field& f, double alpha, double t, int m);

struct DissipationBound {
    double lhs;
    double rhs;
    double rhs_d;  ///< the D-norm part of rhs
    double rhs_x;  ///< the X-norm part of rhs
};

/// lhs = sum_m tau^m M_m ||theta d_y d_x^m f||^2 / ||theta d_x^m f||,
/// rhs = (sqrt(alpha) beta / (2 sqrt<t>)) ||f||_D + (alpha (1 - beta) / <t>) ||f||_X.
/// Terms with a denominator below 1e-300 are dropped.
DissipationBound dissipation_check(const Field& f, double tau, double alpha, double t, double beta, int m_max = 16);

/// sum_m tau^m M_m ||theta d_y d_x^m f||^2 / ||theta d_x^m f||.
double dissipation_sum(const ModeEnergies& e, double tau, int m_max);

struct MonitorSample {
    double t = 0.0;
    double tau = 0.0;
    double tau_dot = 0.0;
    double xu = 0.0, xb = 0.0, du = 0.0, db = 0.0, yu = 0.0, yb = 0.0;
    double dxu_dt = 0.0, dxb_dt = 0.0;
    double su = 0.0, sb = 0.0;  ///< dissipation sums
    double linear_u = 0.0;      ///< alpha/(2<t>) Xu + (C/<t>) Xb
    double linear_b = 0.0;      ///< alpha/(2<t>) Xb
    double nonlinear = 0.0;     ///< tau^{-1/2} (<t>^{-1/4}(Xu+Xb) + <t>^{1/4}(Du+Db)) (Yu+Yb)
    double c0_u = 0.0;          ///< smallest C0 closing the u inequality here
    double c0_b = 0.0;
    double dissipation_u = 0.0;  ///< dissipation lower bound for su
    double dissipation_b = 0.0;
};

struct MonitorReport {
    std::vector<MonitorSample> samples;
    double c0_hat = 0.0;  ///< max over samples of c0_u, c0_b (0 if never needed)
};

/// Norm data of one trajectory sample; cheap to keep for long runs.
struct MonitorPoint {
    double t = 0.0;
    double tau = 0.0;
    NormBundle u, b;  ///< of u~ and b~
    double su = 0.0, sb = 0.0;
};

MonitorPoint monitor_point(const TransformedState& ts, double tau, double alpha, int m_max = 16,
                           Exec exec = Exec::Parallel);

MonitorReport apriori_monitor(std::span<const MonitorPoint> points, double c_shear, double beta = 0.25);

/// Evaluates the a-priori inequalities along a stored trajectory.
/// `taus` pairs with `traj`; derivatives by centered differences (one-sided
/// at the ends). Throws UnstableSample.
MonitorReport apriori_monitor(std::span<const TransformedState> traj, std::span<const double> taus, double alpha,
                              double c_shear, int m_max = 16, double beta = 0.25);

/// Columns: t, tau, alpha, m, X_m, D_m, Z_m, Y_m, then a totals row with m = -1.
void write_norms_csv(const std::filesystem::path& path, const NormBundle& nb);
void write_monitor_csv(const std::filesystem::path& path, const MonitorReport& r);

}  // namespace mhdbl
