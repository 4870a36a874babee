#include "mfs/procrustes.hpp"

#include <Eigen/SVD>

namespace mfs {

Vector MaTransform::apply(const Vector& z) const {
    if (z.size() != rotation.rows()) throw Error("MaTransform::apply: length mismatch");
    return scale * rotation.transpose() * z + translation;
}

Matrix MaTransform::apply_rows(const Matrix& latents) const {
    if (latents.cols() != rotation.rows()) throw Error("MaTransform::apply_rows: width mismatch");
    return (scale * latents * rotation).rowwise() + translation.transpose();
}

MaTransform fit_procrustes(const Matrix& src, const Matrix& tgt) {
    if (src.rows() != tgt.rows() || src.cols() != tgt.cols())
        throw Error("fit_procrustes: shape mismatch");
    if (src.rows() < 1) throw Error("fit_procrustes: empty point sets");

    const Vector src_mean = src.colwise().mean();
    const Vector tgt_mean = tgt.colwise().mean();
    const Matrix s = src.rowwise() - src_mean.transpose();
    const Matrix t = tgt.rowwise() - tgt_mean.transpose();

    const double src_energy = s.squaredNorm();
    if (src_energy <= 0.0) throw Error("fit_procrustes: degenerate (zero-variance) source");

    // rows transform as z' = s * z * R, so R maximizes trace(R^T S^T T)
    const Matrix m = s.transpose() * t;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MaTransform out;
    out.underdetermined = src.rows() < src.cols();
    out.rotation = svd.matrixU() * svd.matrixV().transpose();
    out.scale = svd.singularValues().sum() / src_energy;
    if (out.scale <= 0.0) out.scale = 1.0;  // orthogonal tgt cloud; keep a valid transform
    out.translation = tgt_mean - out.scale * out.rotation.transpose() * src_mean;
    return out;
}

double procrustes_objective(const MaTransform& t, const Matrix& src, const Matrix& tgt) {
    return (tgt - t.apply_rows(src)).squaredNorm();
}

}  // namespace mfs
