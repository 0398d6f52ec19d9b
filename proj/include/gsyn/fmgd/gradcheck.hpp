#pragma once

#include "gsyn/fmgd/diff_program.hpp"

namespace gsyn::fmgd {

struct GradientCheck {
    double max_relative_error = 0.0;
    int worst_coordinate = -1;
    double analytic = 0.0;
    double numeric = 0.0;
};

// Compares backward() with central finite differences of the loss.
// Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheck check_gradient(const DiffProgram& dp, const Logits& theta, double lambda, double h = 1e-4,
                             double floor = 1e-3);

}  // namespace gsyn::fmgd
