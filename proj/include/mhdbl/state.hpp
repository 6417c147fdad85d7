#pragma once

#include "mhdbl/exec.hpp"
#include "mhdbl/field.hpp"
#include "mhdbl/shear.hpp"

namespace mhdbl {

/// Perturbation (u, v, b, g) of the shear state (u_s, 0, b_bar, 0) at time t.
/// v and g are derived from u and b through the divergence constraints.
struct PerturbationState {
    double t = 0.0;
    Field u, b;
    Field v, g;
    ShearProfile shear;
    double b_bar = 1.0;
};

/// -int_0^y d_x f: the normal component paired with f.
Field recover_normal(const Field& f, Exec exec = Exec::Parallel);

/// Assemble a state from (u, b), filling v and g. t is taken from the shear.
PerturbationState make_state(Field u, Field b, ShearProfile shear, double b_bar, Exec exec = Exec::Parallel);

}  // namespace mhdbl
