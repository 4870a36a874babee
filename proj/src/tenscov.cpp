#include "mfs/tenscov.hpp"

#include "mfs/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace mfs {

namespace {

Vector widths_of(const Matrix& x) {
    Vector w(x.cols());
    for (Index k = 0; k < x.cols(); ++k) {
        const double width = x.col(k).maxCoeff() - x.col(k).minCoeff();
        w[k] = width > 0.0 ? width : 1.0;
    }
    return w;
}

bool factor_with_jitter(Matrix& r, Eigen::LLT<Matrix>& llt, double& jitter_used) {
    llt.compute(r);
    jitter_used = 0.0;
    double jitter = 1e-12;
    while (llt.info() != Eigen::Success && jitter <= 1e-6) {
        r.diagonal().array() += jitter - jitter_used;
        jitter_used = jitter;
        llt.compute(r);
        jitter *= 10.0;
    }
    return llt.info() == Eigen::Success;
}

}  // namespace

TensCovGpModel TensCovGpModel::fit(const Matrix& inputs, const Mesh& mesh, const Matrix& fields,
                                   const TensCovFitOptions& opt) {
    if (inputs.rows() != fields.rows()) throw Error("fit_tenscov: inputs/fields row mismatch");
    if (inputs.rows() < 1) throw Error("fit_tenscov: empty training set");
    if (mesh.node_count() != fields.cols())
        throw Error("fit_tenscov: mesh node count does not match field dimension");

    TensCovGpModel m;
    m.inputs_ = inputs;
    m.mesh_ = mesh.coords;
    m.mean_field_ = fields.colwise().mean();
    const Matrix centered = fields.rowwise() - m.mean_field_.transpose();

    const Index n = inputs.rows();
    const Index dim = inputs.cols();
    const Vector widths = widths_of(inputs);

    // mesh kernel: identifiable only through the predictive covariance, not
    // the CV mean error; defaults to the mesh extent unless pinned
    if (opt.fixed_mesh_lengthscales) {
        if (opt.fixed_mesh_lengthscales->size() != m.mesh_.cols())
            throw Error("fit_tenscov: mesh lengthscale size mismatch");
        m.mesh_lengthscales_ = *opt.fixed_mesh_lengthscales;
    } else {
        m.mesh_lengthscales_ = widths_of(m.mesh_);
    }

    DistanceMatrices dm(inputs);
    Matrix r(n, n);

    auto lengthscales_of = [&](const Vector& u) {
        Vector ls(dim);
        for (Index k = 0; k < dim; ++k)
            ls[k] = widths[k] * std::pow(10.0, std::clamp(u[k], -3.0, 3.0));
        return ls;
    };

    Vector best_u = Vector::Zero(dim);
    const int folds = opt.cv_folds > 0 ? std::min<Index>(opt.cv_folds, n)
                                       : std::min<Index>(10, n);
    if (opt.fixed_input_lengthscales) {
        if (opt.fixed_input_lengthscales->size() != dim)
            throw Error("fit_tenscov: input lengthscale size mismatch");
        for (Index k = 0; k < dim; ++k)
            best_u[k] = std::log10((*opt.fixed_input_lengthscales)[k] / widths[k]);
    } else if (n >= 3 && folds >= 2) {
        // deterministic fold assignment: shuffled indices, round-robin
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index{0});
        Rng shuffle_rng(derive_seed(opt.seed, 0xCF));
        for (Index i = n - 1; i > 0; --i) {
            const Index j = static_cast<Index>(shuffle_rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }

        auto cv_error = [&](const Vector& u) {
            const Vector ls = lengthscales_of(u);
            dm.correlation_matrix(ls, r);
            double sse = 0.0;
            for (int f = 0; f < folds; ++f) {
                std::vector<Index> test, train;
                for (Index i = 0; i < n; ++i)
                    (static_cast<int>(i) % folds == f ? test : train)
                        .push_back(perm[static_cast<std::size_t>(i)]);
                if (test.empty() || train.empty()) continue;
                const Index nt = static_cast<Index>(train.size());
                Matrix rt(nt, nt);
                for (Index a = 0; a < nt; ++a)
                    for (Index b = 0; b < nt; ++b) rt(a, b) = r(train[a], train[b]);
                Eigen::LLT<Matrix> llt;
                double jit;
                if (!factor_with_jitter(rt, llt, jit)) return 1e300;
                Matrix yt(nt, centered.cols());
                for (Index a = 0; a < nt; ++a) yt.row(a) = centered.row(train[a]);
                const Matrix alpha = llt.solve(yt);
                for (Index q : test) {
                    Vector k(nt);
                    for (Index a = 0; a < nt; ++a) k[a] = r(q, train[a]);
                    sse += (centered.row(q) - k.transpose() * alpha).squaredNorm();
                }
            }
            return sse;
        };

        Rng rng(opt.seed);
        NelderMeadOptions nm;
        nm.max_evals = 12 * static_cast<int>(dim) + 20;
        nm.ftol_rel = 1e-5;
        double best_f = std::numeric_limits<double>::infinity();
        for (int k = 0; k < opt.restarts; ++k) {
            Vector u0(dim);
            for (Index j = 0; j < dim; ++j) u0[j] = rng.uniform(-2.0, 2.0);
            const NelderMeadResult res = nelder_mead(cv_error, u0, nm);
            if (res.value < best_f) {
                best_f = res.value;
                best_u = res.x;
            }
        }
        NelderMeadOptions polish;
        polish.initial_step = 0.05;
        polish.ftol_rel = 1e-9;
        polish.max_evals = 40 * static_cast<int>(dim) + 40;
        const NelderMeadResult res = nelder_mead(cv_error, best_u, polish);
        if (res.value < best_f) best_u = res.x;
    }

    m.input_kernel_.lengthscales = lengthscales_of(best_u);
    dm.correlation_matrix(m.input_kernel_.lengthscales, r);
    if (!factor_with_jitter(r, m.llt_u_, m.jitter_))
        throw Error("fit_tenscov: input covariance not positive definite after max jitter");
    m.alpha_ = m.llt_u_.solve(centered);

    // amplitude from the Kronecker quadratic form:
    // vec(Yc)^T (Ru (x) Rx)^{-1} vec(Yc) / (n d_y) = tr(Ru^{-1} Yc Rx^{-1} Yc^T) / (n d_y)
    {
        const Index dy = m.mesh_.rows();
        DistanceMatrices dmx(m.mesh_);
        Matrix rx(dy, dy);
        dmx.correlation_matrix(m.mesh_lengthscales_, rx);
        Eigen::LLT<Matrix> llt_x;
        double jx;
        if (!factor_with_jitter(rx, llt_x, jx))
            throw Error("fit_tenscov: mesh covariance not positive definite after max jitter");
        const Matrix rxinv_yt = llt_x.solve(centered.transpose());  // d_y x n
        m.sigma2_ = (m.alpha_.array() * rxinv_yt.transpose().array()).sum() /
                    static_cast<double>(n * dy);
        m.sigma2_ = std::max(m.sigma2_, 0.0);
    }
    m.input_kernel_.variance = m.sigma2_;
    return m;
}

Vector TensCovGpModel::predict(const Vector& u) const {
    if (u.size() != inputs_.cols()) throw Error("TensCovGpModel::predict: query length mismatch");
    Vector k;
    correlation_vector(inputs_, input_kernel_.lengthscales, u, k);
    return mean_field_ + alpha_.transpose() * k;
}

Vector TensCovGpModel::predict_variance(const Vector& u) const {
    if (u.size() != inputs_.cols()) throw Error("TensCovGpModel::predict_variance: length mismatch");
    Vector k;
    correlation_vector(inputs_, input_kernel_.lengthscales, u, k);
    const double q = 1.0 - k.dot(llt_u_.solve(k));
    // Matern correlation has unit diagonal, so every node shares the scalar
    return Vector::Constant(mesh_.rows(), sigma2_ * std::max(q, 0.0));
}

TensCovGpModel fit_tenscov(const Matrix& inputs, const Mesh& mesh, const Matrix& fields,
                           const TensCovFitOptions& opt) {
    return TensCovGpModel::fit(inputs, mesh, fields, opt);
}

}  // namespace mfs
