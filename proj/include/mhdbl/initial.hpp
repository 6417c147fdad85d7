#pragma once

#include <cstdint>

#include "mhdbl/field.hpp"

namespace mhdbl {

/// Seeded initial perturbation shapes:
///   u0 = sum_k a_k cos(k x + p_k) y exp(-y^2/2)
///   b0 = sum_k c_k cos(k x + q_k) (1 + b_quad y^2) exp(-y^2/2)
/// with k = 1..modes (in units of 2 pi / L_x) and amplitudes ~ N(0,1) 2^{-k}.
/// u0 vanishes at the wall and d_y b0 does too.
struct ShapeSpec {
    int modes = 3;
    double b_quad = 0.5;
    std::uint64_t seed = 1;
};

struct Shapes {
    Field u;
    Field b;
};

Shapes random_shapes(const GridPtr& grid, const ShapeSpec& spec);

}  // namespace mhdbl
