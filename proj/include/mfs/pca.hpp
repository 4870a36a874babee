#pragma once

#include "mfs/types.hpp"

namespace mfs {

// Linear dimensionality reduction: y -> z = Psi*(y - mean), back via
// y = Psi^T*z + mean. Fitted from the thin SVD of the centered snapshots;
// eigenvalues are sigma_i^2 / n.
class PcaModel {
public:
    PcaModel() = default;
    PcaModel(Vector mean, Matrix modes, Vector eigenvalues, double ric);

    Index latent_dim() const { return modes_.rows(); }
    Index field_dim() const { return mean_.size(); }
    bool degenerate() const { return latent_dim() == 0; }
    double ric() const { return ric_; }

    const Vector& mean() const { return mean_; }
    const Matrix& modes() const { return modes_; }           // d_z x d_y, orthonormal rows
    const Vector& eigenvalues() const { return eigenvalues_; }  // full spectrum, descending

    Vector transform(const Vector& y) const;
    Matrix transform_rows(const Matrix& snapshots) const;
    Vector inverse(const Vector& z) const;
    Matrix inverse_rows(const Matrix& latents) const;

    // Linear part only (no mean shift); maps latent differences back to field
    // differences, which is what the error decomposition needs.
    Vector inverse_linear(const Vector& dz) const;
    Matrix inverse_linear_rows(const Matrix& dz_rows) const;

    // Rows orthogonal to every retained mode: Y - inverse(transform(Y)).
    Matrix residual_rows(const Matrix& snapshots) const;

private:
    Vector mean_;
    Matrix modes_;
    Vector eigenvalues_;
    double ric_ = 1.0;
};

// Centered-SVD PCA with RIC truncation: d_z is the smallest k whose leading
// eigenvalue mass reaches ric. Identical snapshots give a degenerate d_z = 0
// model. Requires n >= 2.
PcaModel fit_pca(const Matrix& snapshots, double ric);

// Constrained PCA: every numerically nonzero mode of the HF snapshots plus
// the modes of the LF snapshots' component orthogonal to that basis (LF rows
// centered with the HF mean). The combined basis is re-orthonormalized.
// sv_cutoff is relative to the largest HF singular value.
PcaModel fit_cpca(const Matrix& y1, const Matrix& y2, double sv_cutoff = 1e-7);

// PCA of the horizontally stacked snapshot pairs [Y1, Y2]; also a mapping
// from the LF block to the HF block (Everson-Sirovich reconstruction).
struct GpcaModel {
    PcaModel pca;     // over stacked rows of length d_y1 + d_y2
    Index split = 0;  // d_y1: column where the LF block starts
};

GpcaModel fit_gpca(const Matrix& y1, const Matrix& y2, double ric);

// Reconstructs the HF block from an LF field: least squares of the LF block
// of the modes against (y2 - LF mean block), ridge-regularized when the Gram
// matrix condition exceeds 1e12 (used_ridge reports that, when non-null).
Vector gappy_predict(const GpcaModel& g, const Vector& y2_star, bool* used_ridge = nullptr);

}  // namespace mfs
