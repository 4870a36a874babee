#pragma once

#include "mfs/types.hpp"

namespace mfs {

// Similarity transform from an orthogonal Procrustes alignment of paired
// latent point sets: rows map as z' = scale * z * rotation + translation^T.
struct MaTransform {
    Matrix rotation;     // d_z x d_z, orthogonal
    double scale = 1.0;  // > 0
    Vector translation;  // d_z
    bool underdetermined = false;  // fewer paired points than latent dimensions

    Vector apply(const Vector& z) const;
    Matrix apply_rows(const Matrix& latents) const;
};

// Minimizes || tgt - s * src * R - 1 t^T ||_F over orthogonal R, scale s and
// translation t, via the SVD of the centered cross-covariance. Both matrices
// are n x d_z with matched rows.
MaTransform fit_procrustes(const Matrix& src, const Matrix& tgt);

// Frobenius objective at a given transform; used by the property tests.
double procrustes_objective(const MaTransform& t, const Matrix& src, const Matrix& tgt);

}  // namespace mfs
