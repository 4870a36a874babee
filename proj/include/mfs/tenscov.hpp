#pragma once

#include "mfs/dataset.hpp"
#include "mfs/gp.hpp"

namespace mfs {

struct TensCovFitOptions {
    int cv_folds = 0;  // 0: min(10, n)
    int restarts = 20;
    std::uint64_t seed = 0;
    std::optional<Vector> fixed_input_lengthscales;
    std::optional<Vector> fixed_mesh_lengthscales;
};

// Single-fidelity GP over whole fields with separable covariance
// Phi_u (x) Phi_x (Kronecker product, never materialized). Input-kernel
// lengthscales are chosen by k-fold cross-validated prediction error; fields
// are centered by their mean so the constant trend is the empirical mean
// field. No nugget (jitter ladder on factorization failure only).
class TensCovGpModel {
public:
    static TensCovGpModel fit(const Matrix& inputs, const Mesh& mesh, const Matrix& fields,
                              const TensCovFitOptions& opt = {});

    // Posterior mean field at a new input.
    Vector predict(const Vector& u) const;
    // Per-node posterior variance at a new input.
    Vector predict_variance(const Vector& u) const;

    const Matern52Kernel& input_kernel() const { return input_kernel_; }
    const Vector& mesh_lengthscales() const { return mesh_lengthscales_; }
    double amplitude() const { return sigma2_; }
    double jitter() const { return jitter_; }
    Index sample_count() const { return inputs_.rows(); }

private:
    Matrix inputs_;       // n x d_u
    Matrix mesh_;         // d_y x d_x
    Vector mean_field_;   // d_y
    Matrix alpha_;        // Phi_u^{-1} * centered fields  (n x d_y)
    Matern52Kernel input_kernel_;
    Vector mesh_lengthscales_;
    double sigma2_ = 1.0;
    double jitter_ = 0.0;
    Eigen::LLT<Matrix> llt_u_;
};

TensCovGpModel fit_tenscov(const Matrix& inputs, const Mesh& mesh, const Matrix& fields,
                           const TensCovFitOptions& opt = {});

}  // namespace mfs
