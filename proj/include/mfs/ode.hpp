#pragma once

#include "mfs/types.hpp"

#include <algorithm>
#include <cmath>

namespace mfs {

// Adaptive Dormand-Prince 5(4) integrator. Steps are clipped to land exactly
// on every output grid node, so node values carry full integration accuracy
// (no dense-output interpolant). Suited to smooth ODEs with fast initial
// transients, which is all this library integrates.
struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 1e-4;
    std::size_t max_steps = 2'000'000;
};

namespace detail {

inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                                    -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double dp_b4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace detail

// Integrates dy/dt = f(t, y) over a strictly increasing grid and returns the
// state at every grid node (one row per node).
template <typename Rhs>
Matrix integrate_ode(Rhs&& f, const Vector& y0, const Vector& grid, const OdeOptions& opt = {}) {
    using namespace detail;
    const Index dim = y0.size();
    const Index m = grid.size();
    if (m < 2) throw Error("integrate_ode: grid must have at least 2 nodes");

    Matrix out(m, dim);
    out.row(0) = y0.transpose();

    Vector y = y0;
    double t = grid[0];
    Vector k[7];
    for (auto& v : k) v.resize(dim);
    k[0] = f(t, y);

    double h = std::min(opt.initial_step, grid[1] - grid[0]);
    std::size_t steps = 0;
    Vector ytmp(dim), y5(dim), y4(dim);

    for (Index next = 1; next < m; ++next) {
        const double t_end = grid[next];
        while (t < t_end) {
            if (++steps > opt.max_steps)
                throw Error("integrate_ode: step limit exceeded (tolerance too tight or RHS stiff)");
            bool clipped = false;
            double hs = h;
            if (t + hs >= t_end) {
                hs = t_end - t;
                clipped = true;
            }

            for (int s = 1; s < 7; ++s) {
                ytmp = y;
                for (int j = 0; j < s; ++j) ytmp += (hs * dp_a[s][j]) * k[j];
                k[s] = f(t + dp_c[s] * hs, ytmp);
            }
            y5 = y;
            y4 = y;
            for (int s = 0; s < 7; ++s) {
                y5 += (hs * dp_b5[s]) * k[s];
                y4 += (hs * dp_b4[s]) * k[s];
            }

            double err = 0.0;
            for (Index i = 0; i < dim; ++i) {
                const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
                err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
            }

            const double fac = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
            if (err <= 1.0) {
                y = y5;
                t = t + hs;
                k[0] = k[6];  // FSAL
                if (!clipped) h = hs * std::clamp(fac, 0.2, 5.0);
                else h = std::max(h, hs * std::clamp(fac, 0.2, 5.0));
            } else {
                // rejected: k[0] = f(t, y) is still valid at the unchanged state
                h = hs * std::clamp(fac, 0.2, 1.0);
                if (!(h > 0.0) || t + h == t)
                    throw Error("integrate_ode: step size underflow");
            }
        }
        out.row(next) = y.transpose();
    }
    return out;
}

}  // namespace mfs
