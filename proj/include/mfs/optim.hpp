#pragma once

#include "mfs/types.hpp"

#include <functional>

namespace mfs {

// Derivative-free local minimization (Nelder-Mead simplex). Used for the
// GP hyperparameter searches; objectives are cheap-to-moderate and low
// dimensional, so a bounded evaluation budget with a relative f-tolerance
// stop is plenty.
struct NelderMeadOptions {
    double initial_step = 0.3;
    double ftol_rel = 1e-7;
    double ftol_abs = 1e-11;
    int max_evals = 0;  // 0: 80 * dim
};

struct NelderMeadResult {
    Vector x;
    double value = 0.0;
    int evaluations = 0;
};

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& opt = {});

}  // namespace mfs
