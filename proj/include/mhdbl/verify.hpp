#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "mhdbl/field.hpp"

namespace mhdbl {

/// Outcome of one randomized property suite.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::size_t samples = 0;
    double worst = 0.0;      ///< worst observed value of the suite's statistic
    double threshold = 0.0;  ///< pass bound on that statistic
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    /// Scales every first-derivative stencil; 1 is the intact operator.
    double derivative_fault = 1.0;
};

/// Random field sum_k c_k cos(k x + p_k) P_k(y) exp(-s_k y^2) with s_k drawn
/// from [a, 4a], a = alpha / (2 <t>), so theta_alpha f stays square integrable
/// and the lowest decay is the extremal one of the Poincare bound.
Field admissible_field(const GridPtr& grid, double alpha, double t, std::mt19937_64& rng);

/// Poincare ratio >= 1 - 1e-8 for m = 0..3, alpha in {1/4, 1/2}, t in {0, 1, 10}.
SuiteResult poincare_suite(const VerifyOptions& opt);
/// lhs >= rhs - 1e-8 lhs for beta in {0.1, 0.25, 0.4} on the same sampling.
SuiteResult dissipation_suite(const VerifyOptions& opt);
/// Round trip <= 1e-12 relative, b~ bitwise b, identity without shear gradient.
SuiteResult transform_suite(const VerifyOptions& opt);
/// psi residual along an eps = 0.05 run drops by 4 +- 25% when dt halves.
SuiteResult psi_residual_suite(const VerifyOptions& opt);

std::vector<SuiteResult> run_all_suites(const VerifyOptions& opt);

nlohmann::json suites_json(const std::vector<SuiteResult>& suites);

}  // namespace mhdbl
