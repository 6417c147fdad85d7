#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "mhdbl/cancellation.hpp"
#include "mhdbl/kernels.hpp"
#include "mhdbl/state.hpp"

namespace mhdbl {

enum class Scheme { ImexCN, Explicit };

struct SolverConfig {
    double dt = 5e-3;
    double t_max = 1.0;
    Scheme scheme = Scheme::ImexCN;
    double blowup_threshold = 1e6;  ///< cap on max |u|, |b|
    double kappa = 1.0;             ///< resistivity; only 1 is supported
    Exec exec = Exec::Parallel;

    void validate() const;
};

struct Tendency {
    Field du;
    Field db;
};

/// Transport, stretching and coupling terms (everything except d_y^2).
/// Throws NonFiniteTendency.
Tendency explicit_terms(const PerturbationState& s, Exec exec = Exec::Parallel);

/// Full right-hand side of the perturbation system, diffusion included.
Tendency rhs_primitive(const PerturbationState& s, Exec exec = Exec::Parallel);

/// Right-hand side of the transformed system for general b_bar. Used for
/// cross-checks only. Throws NonFiniteTendency.
Tendency rhs_transformed(const TransformedState& ts, Exec exec = Exec::Parallel);

/// The primitive right-hand side pushed through the transform by the chain
/// rule: d_t u~ = d_t u - d_y^3 u_s psi - d_y u_s int_0^y d_t b.
Tendency chain_rule_transform(const PerturbationState& s, const Tendency& primitive, Exec exec = Exec::Parallel);

/// Adams-Bashforth history carried between steps.
struct StepHistory {
    bool valid = false;
    Field nu_prev;
    Field nb_prev;
    std::uint64_t steps = 0;
    std::uint64_t cfl_warnings = 0;
};

/// IMEX stepper: Crank-Nicolson for d_y^2 (u Dirichlet at both ends; b with
/// d_y b = 0 at the wall and b = 0 at y_max), AB2 for the rest with a
/// forward-Euler first step. Owns the banded factorizations and the history.
class Stepper {
public:
    Stepper(GridPtr grid, SolverConfig cfg);

    /// Throws BlowupDetected on non-finite data or when the cap is exceeded.
    PerturbationState step(const PerturbationState& s);

    const SolverConfig& config() const { return cfg_; }
    const StepHistory& history() const { return hist_; }
    void restore(StepHistory h) { hist_ = std::move(h); }
    /// Explicit stability number of the last step; > 1/2 counts as a warning.
    double last_cfl() const { return last_cfl_; }

private:
    ShearProfile advance_shear(const ShearProfile& p);
    double cfl_number(const PerturbationState& s) const;

    GridPtr grid_;
    SolverConfig cfg_;
    kernels::BandedLU lhs_u_;
    kernels::BandedLU lhs_b_;
    std::optional<HeatStepper> heat_;
    StepHistory hist_;
    double last_cfl_ = 0.0;
};

/// Re-impose u = 0 at both ends, b = 0 at y_max and the one-sided d_y b = 0
/// at the wall, then regenerate v and g.
void impose_boundary(PerturbationState& s, Exec exec = Exec::Parallel);

struct Checkpoint {
    PerturbationState state;
    StepHistory history;
    SolverConfig config;
    nlohmann::json meta;  ///< caller data (seed, run parameters)
};

/// Writes `<stem>.snap` (fields) and `<stem>.json` (scalars).
void write_checkpoint(const std::filesystem::path& stem, const PerturbationState& s, const Stepper& stepper,
                      const nlohmann::json& meta = nlohmann::json::object());
Checkpoint read_checkpoint(const std::filesystem::path& stem);

}  // namespace mhdbl
