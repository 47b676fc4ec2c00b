#pragma once

#include <cstdint>
#include <string>

#include "phconn/geometry.hpp"

namespace phconn {

struct GradCheckReport {
    int trials_requested = 0;
    int trials_accepted = 0;
    int trials_skipped = 0;   // configurations too close to a kink
    double max_rel_error = 0.0;
};

/// Checks the analytic point gradient of the connectivity loss against central
/// finite differences (step 1e-6) on random Gaussian clouds. Trials where any
/// merge distance lies within kink_margin of eta, of a neighboring distance
/// value, or (L1) of a zero coordinate difference are skipped and resampled
/// into the skip count. Relative error is the max-norm error scaled by the
/// max-norm of the finite-difference gradient.
GradCheckReport point_gradient_check(int batch_size, int dim, Norm norm, double eta,
                                     int trials, uint64_t seed,
                                     double kink_margin = 1e-4);

/// Same finite-difference check for all parameters of a small branched
/// autoencoder under the combined objective (mean L1 reconstruction plus
/// weighted per-branch connectivity loss). Norms alternate between trials.
GradCheckReport parameter_gradient_check(int trials, uint64_t seed,
                                         double kink_margin = 1e-4);

std::string grad_check_text(const GradCheckReport& report);

}  // namespace phconn
