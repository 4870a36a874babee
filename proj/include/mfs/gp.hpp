#pragma once

#include "mfs/kernel.hpp"
#include "mfs/types.hpp"

#include <Eigen/Cholesky>

#include <optional>

namespace mfs {

struct GpFitOptions {
    int restarts = 20;
    double nugget = 1e-8;  // relative: added to the unit-diagonal correlation matrix
    std::uint64_t seed = 0;
    std::optional<Vector> fixed_lengthscales;  // skip the hyperparameter search
    int max_evals_per_restart = 0;  // 0: optimizer default
};

struct GpDiagnostics {
    double log_likelihood = 0.0;    // concentrated, at the returned hyperparameters
    double jitter = 0.0;            // extra diagonal needed beyond the nugget
    int duplicates_collapsed = 0;
    Vector restart_values;          // objective at each restart's start point
};

// Ordinary Kriging with a polynomial-free trend basis (a column of ones by
// default; AR1 passes [1, lf_mean]). Trend coefficients and the process
// variance are profiled out of the likelihood; lengthscales are optimized by
// multistart Nelder-Mead over log10(lengthscale / data width), drawn
// uniformly in [-2, 2].
class GpModel {
public:
    GpModel() = default;

    // trend: n x p basis values at the training points (p >= 1)
    static GpModel fit(const Matrix& x, const Vector& y, const GpFitOptions& opt = {},
                       const Matrix* trend = nullptr);

    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    // Constant-trend prediction (p must be 1).
    Prediction predict(const Vector& q) const;
    // General-trend prediction; h holds the basis values at the query point.
    Prediction predict_with_basis(const Vector& q, const Vector& h) const;

    // Mean-only fast paths (skip the O(n^2) variance solve).
    double predict_mean(const Vector& q) const;
    double predict_mean_with_basis(const Vector& q, const Vector& h) const;

    const Matern52Kernel& kernel() const { return kernel_; }
    const Vector& trend_coefficients() const { return trend_coef_; }
    double nugget() const { return nugget_; }
    const GpDiagnostics& diagnostics() const { return diag_; }
    Index sample_count() const { return x_.rows(); }
    const Matrix& inputs() const { return x_; }

private:
    Matrix x_;
    Vector y_;
    Matern52Kernel kernel_;
    double nugget_ = 1e-8;
    Matrix trend_;       // n x p
    Vector trend_coef_;  // p
    Vector alpha_;       // R^{-1} (y - H b)
    Eigen::LLT<Matrix> llt_;
    Matrix trend_gram_inv_;  // (H^T R^{-1} H)^{-1}
    GpDiagnostics diag_;
};

GpModel fit_gp(const Matrix& x, const Vector& y, const GpFitOptions& opt = {});

// Two-fidelity recursive co-Kriging: a Kriging model of the LF data plus a
// discrepancy Kriging of the HF data with trend [1, lf_mean(x)], whose second
// coefficient is the autoregressive scaling rho. HF inputs must be a subset
// of the LF inputs.
class Ar1Model {
public:
    static Ar1Model fit(const Matrix& x2, const Vector& y2, const Matrix& x1, const Vector& y1,
                        const GpFitOptions& opt = {});

    GpModel::Prediction predict(const Vector& q) const;
    double predict_mean(const Vector& q) const;

    double rho() const { return delta_.trend_coefficients()[1]; }
    const GpModel& lf() const { return lf_; }
    const GpModel& discrepancy() const { return delta_; }

private:
    GpModel lf_;
    GpModel delta_;
};

Ar1Model fit_ar1(const Matrix& x2, const Vector& y2, const Matrix& x1, const Vector& y1,
                 const GpFitOptions& opt = {});

}  // namespace mfs
