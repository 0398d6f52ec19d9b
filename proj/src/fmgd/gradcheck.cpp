#include "gsyn/fmgd/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace gsyn::fmgd {

GradientCheck check_gradient(const DiffProgram& dp, const Logits& theta, double lambda, double h, double floor) {
    GradientCheck out;
    const auto grad = dp.evaluate(theta, lambda, true).gradient;
    Logits probe = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        probe[i] = theta[i] + h;
        const double up = dp.evaluate(probe, lambda, false).loss;
        probe[i] = theta[i] - h;
        const double down = dp.evaluate(probe, lambda, false).loss;
        probe[i] = theta[i];
        const double numeric = (up - down) / (2 * h);
        const double err = std::abs(grad[i] - numeric) / std::max({std::abs(grad[i]), std::abs(numeric), floor});
        if (err > out.max_relative_error || out.worst_coordinate < 0) {
            out.max_relative_error = err;
            out.worst_coordinate = static_cast<int>(i);
            out.analytic = grad[i];
            out.numeric = numeric;
        }
    }
    return out;
}

}  // namespace gsyn::fmgd
