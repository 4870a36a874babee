#pragma once

#include "mfs/gp.hpp"

#include <vector>

namespace mfs {

// Kriging over inputs augmented with a fidelity flag: product kernel
// k_u(u, u') * k_f(l, l') with k_f = 1 when the flags match and theta_f
// otherwise, theta_f in (0, 1]. Predictions are queried at the HF flag.
class CategGpModel {
public:
    static CategGpModel fit(const Matrix& x, const std::vector<int>& flags, const Vector& y,
                            const GpFitOptions& opt = {});

    GpModel::Prediction predict(const Vector& q, int flag = 1) const;
    double predict_mean(const Vector& q, int flag = 1) const;

    double theta_f() const { return theta_f_; }
    const Matern52Kernel& kernel() const { return kernel_; }
    const GpDiagnostics& diagnostics() const { return diag_; }

private:
    Matrix x_;
    std::vector<int> flags_;
    Vector y_;
    Matern52Kernel kernel_;
    double theta_f_ = 1.0;
    double nugget_ = 1e-8;
    double trend_ = 0.0;
    Vector alpha_;
    Eigen::LLT<Matrix> llt_;
    double trend_gram_inv_ = 0.0;
    GpDiagnostics diag_;
};

CategGpModel fit_categ_gp(const Matrix& x, const std::vector<int>& flags, const Vector& y,
                          const GpFitOptions& opt = {});

}  // namespace mfs
