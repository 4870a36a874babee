#include "mfs/pca.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace mfs {

PcaModel::PcaModel(Vector mean, Matrix modes, Vector eigenvalues, double ric)
    : mean_(std::move(mean)), modes_(std::move(modes)),
      eigenvalues_(std::move(eigenvalues)), ric_(ric) {
    if (modes_.rows() > 0 && modes_.cols() != mean_.size())
        throw Error("PcaModel: mode/mean length mismatch");
}

Vector PcaModel::transform(const Vector& y) const {
    if (y.size() != field_dim()) throw Error("PcaModel::transform: length mismatch");
    return modes_ * (y - mean_);
}

Matrix PcaModel::transform_rows(const Matrix& snapshots) const {
    if (snapshots.cols() != field_dim()) throw Error("PcaModel::transform_rows: width mismatch");
    return (snapshots.rowwise() - mean_.transpose()) * modes_.transpose();
}

Vector PcaModel::inverse(const Vector& z) const {
    if (z.size() != latent_dim()) throw Error("PcaModel::inverse: length mismatch");
    return modes_.transpose() * z + mean_;
}

Matrix PcaModel::inverse_rows(const Matrix& latents) const {
    if (latents.cols() != latent_dim()) throw Error("PcaModel::inverse_rows: width mismatch");
    return (latents * modes_).rowwise() + mean_.transpose();
}

Vector PcaModel::inverse_linear(const Vector& dz) const {
    if (dz.size() != latent_dim()) throw Error("PcaModel::inverse_linear: length mismatch");
    return modes_.transpose() * dz;
}

Matrix PcaModel::inverse_linear_rows(const Matrix& dz_rows) const {
    if (dz_rows.cols() != latent_dim()) throw Error("PcaModel::inverse_linear_rows: width mismatch");
    return dz_rows * modes_;
}

Matrix PcaModel::residual_rows(const Matrix& snapshots) const {
    if (snapshots.cols() != field_dim()) throw Error("PcaModel::residual_rows: width mismatch");
    const Matrix centered = snapshots.rowwise() - mean_.transpose();
    if (degenerate()) return centered;
    return centered - (centered * modes_.transpose()) * modes_;
}

namespace {

struct ThinSvd {
    Vector mean;
    Vector sigma;  // descending
    Matrix vt;     // right singular vectors as rows
};

ThinSvd centered_svd(const Matrix& snapshots) {
    ThinSvd r;
    r.mean = snapshots.colwise().mean();
    const Matrix centered = snapshots.rowwise() - r.mean.transpose();
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    r.sigma = svd.singularValues();
    r.vt = svd.matrixV().transpose();
    return r;
}

}  // namespace

PcaModel fit_pca(const Matrix& snapshots, double ric) {
    if (snapshots.rows() < 2) throw Error("fit_pca: need at least 2 snapshots");
    if (!(ric > 0.0) || ric > 1.0) throw Error("fit_pca: ric must be in (0, 1]");

    const Index n = snapshots.rows();
    ThinSvd svd = centered_svd(snapshots);
    Vector lambda = svd.sigma.array().square() / static_cast<double>(n);

    const double total = lambda.sum();
    Index dz = 0;
    if (total > 0.0) {
        // smallest k with cumulative eigenvalue mass >= ric; the tiny slack
        // absorbs roundoff when ric == 1
        double cum = 0.0;
        for (Index k = 0; k < lambda.size(); ++k) {
            cum += lambda[k];
            if (cum / total >= ric - 1e-12) {
                dz = k + 1;
                break;
            }
        }
        if (dz == 0) dz = lambda.size();
    }
    return PcaModel(svd.mean, svd.vt.topRows(dz), std::move(lambda), ric);
}

PcaModel fit_cpca(const Matrix& y1, const Matrix& y2, double sv_cutoff) {
    if (y1.cols() != y2.cols()) throw Error("fit_cpca: field dimension mismatch");
    if (y1.rows() < 2) throw Error("fit_cpca: need at least 2 HF snapshots");

    ThinSvd hf = centered_svd(y1);
    const double scale = hf.sigma.size() > 0 ? hf.sigma[0] : 0.0;
    Index r1 = 0;
    while (r1 < hf.sigma.size() && hf.sigma[r1] > sv_cutoff * scale) ++r1;
    const Matrix hf_modes = hf.vt.topRows(r1);

    // LF component orthogonal to the HF basis, in the HF-mean frame
    Matrix b2 = y2.rowwise() - hf.mean.transpose();
    if (r1 > 0) b2 -= (b2 * hf_modes.transpose()) * hf_modes;
    Eigen::BDCSVD<Matrix> svd2(b2, Eigen::ComputeThinV);
    const Vector s2 = svd2.singularValues();
    const double ref = scale > 0.0 ? scale : (s2.size() > 0 ? s2[0] : 1.0);
    Index r2 = 0;
    while (r2 < s2.size() && s2[r2] > sv_cutoff * ref) ++r2;

    Matrix basis(r1 + r2, y1.cols());
    basis.topRows(r1) = hf_modes;
    basis.bottomRows(r2) = svd2.matrixV().transpose().topRows(r2);

    // re-orthonormalize against numerical drift (thin QR of basis^T)
    if (basis.rows() > 0) {
        Eigen::HouseholderQR<Matrix> qr(basis.transpose());
        Matrix q = qr.householderQ() * Matrix::Identity(y1.cols(), basis.rows());
        // keep mode orientation stable: flip columns whose projection on the
        // original mode is negative
        for (Index k = 0; k < basis.rows(); ++k)
            if (q.col(k).dot(basis.row(k).transpose()) < 0.0) q.col(k) = -q.col(k);
        basis = q.transpose();
    }

    Vector lambda(r1 + r2);
    const double n1 = static_cast<double>(y1.rows());
    const double n2 = static_cast<double>(y2.rows());
    for (Index k = 0; k < r1; ++k) lambda[k] = hf.sigma[k] * hf.sigma[k] / n1;
    for (Index k = 0; k < r2; ++k) lambda[r1 + k] = s2[k] * s2[k] / n2;

    return PcaModel(hf.mean, std::move(basis), std::move(lambda), 1.0);
}

GpcaModel fit_gpca(const Matrix& y1, const Matrix& y2, double ric) {
    if (y1.rows() != y2.rows())
        throw Error("fit_gpca: snapshot sets must be paired (same row count)");
    Matrix stacked(y1.rows(), y1.cols() + y2.cols());
    stacked << y1, y2;
    GpcaModel g;
    g.pca = fit_pca(stacked, ric);
    g.split = y1.cols();
    return g;
}

Vector gappy_predict(const GpcaModel& g, const Vector& y2_star, bool* used_ridge) {
    const Index d1 = g.split;
    const Index d2 = g.pca.field_dim() - d1;
    if (y2_star.size() != d2) throw Error("gappy_predict: LF field length mismatch");
    if (used_ridge) *used_ridge = false;
    if (g.pca.degenerate()) return g.pca.mean().head(d1);

    const Matrix lf_modes = g.pca.modes().rightCols(d2);  // d_z x d_y2
    const Vector rhs = lf_modes * (y2_star - g.pca.mean().tail(d2));
    Matrix gram = lf_modes * lf_modes.transpose();

    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector& ev = es.eigenvalues();
    const double emax = ev[ev.size() - 1];
    const double emin = ev[0];
    Vector coeffs;
    if (emin <= 0.0 || emax / emin > 1e12) {
        if (used_ridge) *used_ridge = true;
        const double ridge = 1e-10 * gram.trace() / static_cast<double>(gram.rows());
        gram.diagonal().array() += ridge;
        coeffs = gram.ldlt().solve(rhs);
    } else {
        coeffs = es.eigenvectors() * (es.eigenvectors().transpose() * rhs).cwiseQuotient(ev);
    }

    return g.pca.modes().leftCols(d1).transpose() * coeffs + g.pca.mean().head(d1);
}

}  // namespace mfs
