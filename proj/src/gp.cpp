#include "mfs/gp.hpp"

#include "mfs/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mfs {

namespace {

struct Deduped {
    Matrix x;
    Vector y;
    Matrix trend;
    int collapsed = 0;
};

Deduped collapse_duplicates(const Matrix& x, const Vector& y, const Matrix& trend) {
    std::vector<Index> keep;
    std::vector<std::vector<Index>> groups;
    for (Index i = 0; i < x.rows(); ++i) {
        bool found = false;
        for (std::size_t g = 0; g < keep.size(); ++g) {
            if (x.row(i) == x.row(keep[g])) {
                groups[g].push_back(i);
                found = true;
                break;
            }
        }
        if (!found) {
            keep.push_back(i);
            groups.push_back({i});
        }
    }
    Deduped out;
    out.collapsed = static_cast<int>(x.rows() - static_cast<Index>(keep.size()));
    out.x.resize(static_cast<Index>(keep.size()), x.cols());
    out.y.resize(static_cast<Index>(keep.size()));
    out.trend.resize(static_cast<Index>(keep.size()), trend.cols());
    for (std::size_t g = 0; g < keep.size(); ++g) {
        out.x.row(static_cast<Index>(g)) = x.row(keep[g]);
        double ysum = 0.0;
        Vector tsum = Vector::Zero(trend.cols());
        for (Index i : groups[g]) {
            ysum += y[i];
            tsum += trend.row(i).transpose();
        }
        out.y[static_cast<Index>(g)] = ysum / static_cast<double>(groups[g].size());
        out.trend.row(static_cast<Index>(g)) = tsum.transpose() / static_cast<double>(groups[g].size());
    }
    return out;
}

Vector data_widths(const Matrix& x) {
    Vector w(x.cols());
    for (Index k = 0; k < x.cols(); ++k) {
        const double width = x.col(k).maxCoeff() - x.col(k).minCoeff();
        w[k] = width > 0.0 ? width : 1.0;
    }
    return w;
}

// Cholesky with jitter escalation from 1e-12 to 1e-6 on top of the nugget.
bool factor_with_jitter(Matrix& r, double nugget, Eigen::LLT<Matrix>& llt, double& jitter_used) {
    r.diagonal().array() += nugget;
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

struct LikelihoodParts {
    double log_likelihood = -std::numeric_limits<double>::infinity();
    Vector beta;
    double sigma2 = 0.0;
    bool ok = false;
    double jitter = 0.0;
};

// Concentrated log marginal likelihood: trend coefficients by generalized
// least squares, process variance profiled, constants dropped.
LikelihoodParts concentrated_likelihood(const Matrix& r_in, double nugget, const Vector& y,
                                        const Matrix& trend, Eigen::LLT<Matrix>* llt_out = nullptr) {
    LikelihoodParts parts;
    Matrix r = r_in;
    Eigen::LLT<Matrix> llt;
    if (!factor_with_jitter(r, nugget, llt, parts.jitter)) return parts;

    const Index n = y.size();
    const Matrix hw = llt.matrixL().solve(trend);
    const Vector yw = llt.matrixL().solve(y);
    Matrix gram = hw.transpose() * hw;
    parts.beta = gram.ldlt().solve(hw.transpose() * yw);
    const Vector resid = yw - hw * parts.beta;
    const double yscale = y.squaredNorm() / static_cast<double>(n);
    parts.sigma2 = std::max(resid.squaredNorm() / static_cast<double>(n),
                            1e-24 * yscale + 1e-300);

    double logdet = 0.0;
    const Matrix& packed = llt.matrixLLT();
    for (Index i = 0; i < n; ++i) logdet += std::log(packed(i, i));
    parts.log_likelihood = -0.5 * static_cast<double>(n) * std::log(parts.sigma2) - logdet;
    parts.ok = true;
    if (llt_out) *llt_out = std::move(llt);
    return parts;
}

}  // namespace

GpModel GpModel::fit(const Matrix& x, const Vector& y, const GpFitOptions& opt,
                     const Matrix* trend_in) {
    if (x.rows() != y.size()) throw Error("GpModel::fit: x/y row mismatch");
    if (x.rows() < 1) throw Error("GpModel::fit: empty training set");

    Matrix trend = trend_in ? *trend_in : Matrix::Ones(x.rows(), 1);
    if (trend.rows() != x.rows()) throw Error("GpModel::fit: trend row mismatch");

    Deduped d = collapse_duplicates(x, y, trend);

    GpModel m;
    m.x_ = std::move(d.x);
    m.y_ = std::move(d.y);
    m.trend_ = std::move(d.trend);
    m.nugget_ = opt.nugget;
    m.diag_.duplicates_collapsed = d.collapsed;

    const Index n = m.x_.rows();
    const Index dim = m.x_.cols();
    const Vector widths = data_widths(m.x_);
    DistanceMatrices dm(m.x_);
    Matrix r(n, n);

    auto lengthscales_of = [&](const Vector& u) {
        Vector ls(dim);
        for (Index k = 0; k < dim; ++k)
            ls[k] = widths[k] * std::pow(10.0, std::clamp(u[k], -3.0, 3.0));
        return ls;
    };
    auto objective = [&](const Vector& u) {
        dm.correlation_matrix(lengthscales_of(u), r);
        const LikelihoodParts parts = concentrated_likelihood(r, m.nugget_, m.y_, m.trend_);
        return parts.ok ? -parts.log_likelihood : 1e300;
    };

    Vector best_u = Vector::Zero(dim);
    if (opt.fixed_lengthscales) {
        if (opt.fixed_lengthscales->size() != dim)
            throw Error("GpModel::fit: fixed lengthscale size mismatch");
        for (Index k = 0; k < dim; ++k)
            best_u[k] = std::log10((*opt.fixed_lengthscales)[k] / widths[k]);
    } else if (n >= 2) {
        Rng rng(opt.seed);
        NelderMeadOptions nm;
        nm.max_evals = opt.max_evals_per_restart > 0 ? opt.max_evals_per_restart
                                                     : 12 * static_cast<int>(dim) + 20;
        nm.ftol_rel = 1e-5;
        double best_f = std::numeric_limits<double>::infinity();
        m.diag_.restart_values.resize(opt.restarts);
        for (int k = 0; k < opt.restarts; ++k) {
            Vector u0(dim);
            for (Index j = 0; j < dim; ++j) u0[j] = rng.uniform(-2.0, 2.0);
            m.diag_.restart_values[k] = objective(u0);
            const NelderMeadResult res = nelder_mead(objective, u0, nm);
            if (res.value < best_f) {
                best_f = res.value;
                best_u = res.x;
            }
        }
        NelderMeadOptions polish;
        polish.initial_step = 0.05;
        polish.ftol_rel = 1e-9;
        polish.max_evals = 40 * static_cast<int>(dim) + 40;
        const NelderMeadResult res = nelder_mead(objective, best_u, polish);
        if (res.value < best_f) best_u = res.x;
    }

    m.kernel_.lengthscales = lengthscales_of(best_u);
    dm.correlation_matrix(m.kernel_.lengthscales, r);
    LikelihoodParts parts = concentrated_likelihood(r, m.nugget_, m.y_, m.trend_, &m.llt_);
    if (!parts.ok) throw Error("GpModel::fit: covariance not positive definite after max jitter");

    m.kernel_.variance = parts.sigma2;
    m.trend_coef_ = parts.beta;
    m.alpha_ = m.llt_.solve(m.y_ - m.trend_ * m.trend_coef_);
    const Matrix rinv_h = m.llt_.solve(m.trend_);
    m.trend_gram_inv_ = (m.trend_.transpose() * rinv_h).ldlt().solve(
        Matrix::Identity(m.trend_.cols(), m.trend_.cols()));
    m.diag_.log_likelihood = parts.log_likelihood;
    m.diag_.jitter = parts.jitter;
    return m;
}

GpModel::Prediction GpModel::predict(const Vector& q) const {
    if (trend_.cols() != 1) throw Error("GpModel::predict: model has a non-constant trend");
    Vector h(1);
    h << 1.0;
    return predict_with_basis(q, h);
}

GpModel::Prediction GpModel::predict_with_basis(const Vector& q, const Vector& h) const {
    if (q.size() != x_.cols()) throw Error("GpModel::predict: query length mismatch");
    if (h.size() != trend_.cols()) throw Error("GpModel::predict: basis length mismatch");

    Vector rvec;
    correlation_vector(x_, kernel_.lengthscales, q, rvec);

    Prediction p;
    p.mean = h.dot(trend_coef_) + rvec.dot(alpha_);

    const Vector rinv_r = llt_.solve(rvec);
    const Vector u = h - trend_.transpose() * rinv_r;
    double var = kernel_.variance *
                 (1.0 + nugget_ - rvec.dot(rinv_r) + u.dot(trend_gram_inv_ * u));
    p.variance = std::max(var, 0.0);
    return p;
}

double GpModel::predict_mean(const Vector& q) const {
    if (trend_.cols() != 1) throw Error("GpModel::predict_mean: model has a non-constant trend");
    Vector h(1);
    h << 1.0;
    return predict_mean_with_basis(q, h);
}

double GpModel::predict_mean_with_basis(const Vector& q, const Vector& h) const {
    if (q.size() != x_.cols()) throw Error("GpModel::predict_mean: query length mismatch");
    if (h.size() != trend_.cols()) throw Error("GpModel::predict_mean: basis length mismatch");
    Vector rvec;
    correlation_vector(x_, kernel_.lengthscales, q, rvec);
    return h.dot(trend_coef_) + rvec.dot(alpha_);
}

GpModel fit_gp(const Matrix& x, const Vector& y, const GpFitOptions& opt) {
    return GpModel::fit(x, y, opt);
}

Ar1Model Ar1Model::fit(const Matrix& x2, const Vector& y2, const Matrix& x1, const Vector& y1,
                       const GpFitOptions& opt) {
    if (x1.rows() != y1.size() || x2.rows() != y2.size()) throw Error("fit_ar1: x/y row mismatch");

    // nested designs: every HF input must appear among the LF inputs
    for (Index i = 0; i < x1.rows(); ++i) {
        bool found = false;
        for (Index j = 0; j < x2.rows() && !found; ++j) found = x1.row(i) == x2.row(j);
        if (!found)
            throw Error("fit_ar1: HF input row " + std::to_string(i) + " not present in LF design");
    }

    Ar1Model m;
    GpFitOptions lf_opt = opt;
    lf_opt.seed = derive_seed(opt.seed, 0x1f);
    m.lf_ = GpModel::fit(x2, y2, lf_opt);

    Matrix trend(x1.rows(), 2);
    for (Index i = 0; i < x1.rows(); ++i) {
        trend(i, 0) = 1.0;
        trend(i, 1) = m.lf_.predict(x1.row(i)).mean;
    }
    GpFitOptions hf_opt = opt;
    hf_opt.seed = derive_seed(opt.seed, 0x2f);
    m.delta_ = GpModel::fit(x1, y1, hf_opt, &trend);
    return m;
}

GpModel::Prediction Ar1Model::predict(const Vector& q) const {
    const GpModel::Prediction lf = lf_.predict(q);
    Vector h(2);
    h << 1.0, lf.mean;
    GpModel::Prediction p = delta_.predict_with_basis(q, h);
    const double rho = delta_.trend_coefficients()[1];
    p.variance += rho * rho * lf.variance;
    return p;
}

double Ar1Model::predict_mean(const Vector& q) const {
    Vector h(2);
    h << 1.0, lf_.predict_mean(q);
    return delta_.predict_mean_with_basis(q, h);
}

Ar1Model fit_ar1(const Matrix& x2, const Vector& y2, const Matrix& x1, const Vector& y1,
                 const GpFitOptions& opt) {
    return Ar1Model::fit(x2, y2, x1, y1, opt);
}

}  // namespace mfs
