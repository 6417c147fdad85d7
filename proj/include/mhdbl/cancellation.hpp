#pragma once

#include "mhdbl/state.hpp"

namespace mhdbl {

/// (u~, b~, psi) with u~ = u - d_y u_s psi, b~ = b, psi = int_0^y b.
struct TransformedState {
    double t = 0.0;
    Field u_tilde;
    Field b_tilde;
    Field psi;
    ShearProfile shear;
    double b_bar = 1.0;
};

Field compute_psi(const Field& b, Exec exec = Exec::Parallel);

TransformedState to_tilde(const PerturbationState& s, Exec exec = Exec::Parallel);
/// psi is recomputed from b~, never taken from the input.
PerturbationState from_tilde(const TransformedState& ts, Exec exec = Exec::Parallel);

/// Both sides of ||u||_X <= ||u~||_X + C ||b~||_X.
struct NormComparison {
    double lhs;
    double norm_u_tilde;
    double norm_b_tilde;
    double c;
    double rhs;
    bool holds;
};

/// Norms are the analytic X norms with radius tau, weight alpha, modes 0..m_max.
NormComparison compare_norms(const PerturbationState& s, double c, double tau, double alpha, int m_max);

/// Centered-in-time residual of
///   d_t psi + v (b_bar + b) - (u_s + u) g - d_y^2 psi = forcing
/// between two snapshots; spatial terms are averaged over both. Boundary
/// rows are zeroed.
Field psi_residual(const PerturbationState& before, const PerturbationState& after, double dt,
                   const Field* forcing = nullptr, Exec exec = Exec::Parallel);

/// Sup of |residual| over rows 1..ny-2.
double interior_sup(const Field& f);

}  // namespace mhdbl
