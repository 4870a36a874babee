#include "mfs/pca.hpp"

#include "mfs/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace mfs;

namespace {

Matrix random_matrix(Index n, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

double max_orthonormality_defect(const Matrix& modes) {
    const Matrix gram = modes * modes.transpose();
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("fit_pca: two distinct snapshots give one mode at full variance") {
    Matrix y(2, 5);
    y << 1, 2, 3, 4, 5, 2, 3, 4, 5, 6;
    const PcaModel m = fit_pca(y, 0.999);
    CHECK(m.latent_dim() == 1);
    CHECK(m.eigenvalues()[0] / m.eigenvalues().sum() == doctest::Approx(1.0));
}

TEST_CASE("fit_pca: RIC cumulative-sum arithmetic") {
    // eigenvalues proportional to (9, 0.9, 0.09, 0.01): ric 0.999 needs 3
    // cumulative: 0.9000.., 0.9900.., 0.9990.., 1.0
    Matrix basis = Matrix::Identity(4, 6);
    Matrix y(8, 6);
    const double a = std::sqrt(9.0), b = std::sqrt(0.9), c = std::sqrt(0.09), d = std::sqrt(0.01);
    y.setZero();
    for (int s = 0; s < 4; ++s) {
        const double sign = s < 2 ? 1.0 : -1.0;
        y.row(2 * s) += sign * a * basis.row(0);
        y.row(2 * s + 1) -= sign * a * basis.row(0);
    }
    // craft snapshots whose centered covariance has the desired spectrum:
    // columns scaled orthogonal +-1 patterns
    Matrix p(8, 4);
    p << 1, 1, 1, 1, -1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, 1, -1, -1, 1, -1,
        -1, 1, -1, -1, -1, -1;
    // orthogonalize sign patterns: use +-1 columns that are exactly orthogonal
    Matrix q(8, 4);
    q.col(0) << 1, -1, 1, -1, 1, -1, 1, -1;
    q.col(1) << 1, 1, -1, -1, 1, 1, -1, -1;
    q.col(2) << 1, 1, 1, 1, -1, -1, -1, -1;
    q.col(3) << 1, -1, -1, 1, 1, -1, -1, 1;
    y = q.col(0) * a * basis.row(0) + q.col(1) * b * basis.row(1) + q.col(2) * c * basis.row(2) +
        q.col(3) * d * basis.row(3);

    const PcaModel m = fit_pca(y, 0.999);
    CHECK(m.latent_dim() == 3);
    const PcaModel m2 = fit_pca(y, 0.9999);
    CHECK(m2.latent_dim() == 4);
    const PcaModel m0 = fit_pca(y, 0.5);
    CHECK(m0.latent_dim() == 1);
}

TEST_CASE("fit_pca: full-rank reconstruction oracle on a random 20x101 matrix") {
    const Matrix y = random_matrix(20, 101, 99);
    const PcaModel m = fit_pca(y, 1.0);
    const Matrix rec = m.inverse_rows(m.transform_rows(y));
    CHECK((rec - y).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(max_orthonormality_defect(m.modes()) < 1e-10);
}

TEST_CASE("fit_pca: identical snapshots give a degenerate model") {
    Matrix y(3, 4);
    y << 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4;
    const PcaModel m = fit_pca(y, 0.999);
    CHECK(m.degenerate());
    CHECK(m.latent_dim() == 0);
    // degenerate round trip returns the mean
    CHECK((m.inverse(m.transform(y.row(0))) - y.row(0).transpose()).norm() < 1e-12);
}

TEST_CASE("fit_pca: RIC monotonicity property") {
    const Matrix y = random_matrix(12, 30, 5);
    Index prev = 0;
    for (double ric : {0.5, 0.9, 0.99, 0.999, 0.9999, 1.0}) {
        const Index dz = fit_pca(y, ric).latent_dim();
        CHECK(dz >= prev);
        prev = dz;
    }
}

TEST_CASE("transform/inverse: mean maps to zero and back") {
    const Matrix y = random_matrix(9, 17, 2);
    const PcaModel m = fit_pca(y, 0.99);
    CHECK(m.transform(m.mean()).norm() < 1e-10);
    CHECK((m.inverse(Vector::Zero(m.latent_dim())) - m.mean()).norm() < 1e-12);
    // unit latent vector maps to mean + mode
    Vector e1 = Vector::Zero(m.latent_dim());
    e1[0] = 1.0;
    const Vector y1 = m.inverse(e1);
    CHECK((m.transform(y1) - e1).norm() < 1e-10);
}

TEST_CASE("transform reproduces the fitted latent matrix") {
    const Matrix y = random_matrix(10, 25, 8);
    const PcaModel m = fit_pca(y, 1.0);
    const Matrix z = m.transform_rows(y);
    for (Index i = 0; i < y.rows(); ++i)
        CHECK((m.transform(y.row(i)) - z.row(i).transpose()).norm() < 1e-12);
}

TEST_CASE("round-trip loss equals the truncated eigenvalue tail") {
    const Matrix y = random_matrix(15, 40, 12);
    const PcaModel m = fit_pca(y, 0.9);
    const Matrix resid = m.residual_rows(y);
    const double lost = resid.squaredNorm() / static_cast<double>(y.rows());
    double tail = 0.0;
    for (Index k = m.latent_dim(); k < m.eigenvalues().size(); ++k) tail += m.eigenvalues()[k];
    CHECK(lost == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("dr residuals: orthogonal to retained modes; zero at ric=1") {
    const Matrix y = random_matrix(13, 29, 4);
    const PcaModel m = fit_pca(y, 0.9);
    const Matrix resid = m.residual_rows(y);
    for (Index i = 0; i < resid.rows(); ++i)
        for (Index k = 0; k < m.latent_dim(); ++k)
            CHECK(std::abs(resid.row(i).dot(m.modes().row(k))) < 1e-9);

    const PcaModel full = fit_pca(y, 1.0);
    CHECK(full.residual_rows(y).lpNorm<Eigen::Infinity>() < 1e-10);

    // residual of the mean itself is zero
    Matrix mean_row = full.mean().transpose();
    CHECK(full.residual_rows(mean_row).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("fit_cpca: LF inside the HF span appends nothing") {
    const Matrix y1 = random_matrix(6, 20, 7);
    // LF rows are combinations of HF rows (same affine span)
    Matrix y2(4, 20);
    y2.row(0) = 0.5 * y1.row(0) + 0.5 * y1.row(1);
    y2.row(1) = 0.25 * y1.row(2) + 0.75 * y1.row(3);
    y2.row(2) = y1.row(4);
    y2.row(3) = 0.1 * y1.row(0) + 0.9 * y1.row(5);
    const PcaModel hf_only = fit_pca(y1, 1.0);
    const PcaModel cpca = fit_cpca(y1, y2);
    CHECK(cpca.latent_dim() == hf_only.latent_dim());
}

TEST_CASE("fit_cpca: identical sets equal the untruncated HF PCA") {
    const Matrix y = random_matrix(7, 15, 13);
    const PcaModel cpca = fit_cpca(y, y);
    const PcaModel hf = fit_pca(y, 1.0);
    CHECK(cpca.latent_dim() == hf.latent_dim());
    CHECK((cpca.mean() - hf.mean()).norm() < 1e-12);
}

TEST_CASE("fit_cpca: concatenated basis is orthonormal") {
    const Matrix y1 = random_matrix(6, 30, 21);
    const Matrix y2 = random_matrix(9, 30, 22);
    const PcaModel cpca = fit_cpca(y1, y2);
    CHECK(cpca.latent_dim() > fit_pca(y1, 1.0).latent_dim());
    CHECK(max_orthonormality_defect(cpca.modes()) < 1e-10);
}

TEST_CASE("gappy: training LF snapshot returns the paired HF snapshot at ric=1") {
    const Matrix y1 = random_matrix(8, 12, 31);
    const Matrix y2 = random_matrix(8, 15, 32);
    const GpcaModel g = fit_gpca(y1, y2, 1.0);
    for (Index i = 0; i < y1.rows(); ++i) {
        const Vector rec = gappy_predict(g, y2.row(i));
        CHECK((rec - y1.row(i).transpose()).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("gappy: rank-1 scaling relation") {
    // one mode; LF block is a scaled copy of the HF block
    Matrix y1(4, 3), y2(4, 3);
    Rng rng(77);
    for (Index i = 0; i < 4; ++i) {
        const double a = rng.uniform(-2.0, 2.0);
        for (Index j = 0; j < 3; ++j) {
            y1(i, j) = a * (1.0 + j);
            y2(i, j) = 2.0 * a * (1.0 + j);
        }
    }
    const GpcaModel g = fit_gpca(y1, y2, 1.0);
    REQUIRE(g.pca.latent_dim() == 1);
    // a fresh LF field: prediction must be half of it
    Vector fresh(3);
    fresh << 2.0, 4.0, 6.0;
    const Vector rec = gappy_predict(g, fresh);
    CHECK((rec - 0.5 * fresh).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("gappy: the mean LF block maps to the mean HF block") {
    const Matrix y1 = random_matrix(6, 9, 41);
    const Matrix y2 = random_matrix(6, 11, 42);
    const GpcaModel g = fit_gpca(y1, y2, 1.0);
    const Vector rec = gappy_predict(g, g.pca.mean().tail(11));
    CHECK((rec - g.pca.mean().head(9)).lpNorm<Eigen::Infinity>() < 1e-9);
}
