#include "mfs/categorical_gp.hpp"

#include "mfs/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mfs {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

Vector widths_of(const Matrix& x) {
    Vector w(x.cols());
    for (Index k = 0; k < x.cols(); ++k) {
        const double width = x.col(k).maxCoeff() - x.col(k).minCoeff();
        w[k] = width > 0.0 ? width : 1.0;
    }
    return w;
}

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

struct Concentrated {
    double log_likelihood = -std::numeric_limits<double>::infinity();
    double beta = 0.0;
    double sigma2 = 0.0;
    bool ok = false;
    double jitter = 0.0;
};

Concentrated likelihood(const Matrix& r_in, double nugget, const Vector& y,
                        Eigen::LLT<Matrix>* llt_out = nullptr) {
    Concentrated c;
    Matrix r = r_in;
    Eigen::LLT<Matrix> llt;
    if (!factor_with_jitter(r, nugget, llt, c.jitter)) return c;

    const Index n = y.size();
    const Vector yw = llt.matrixL().solve(y);
    const Vector ow = llt.matrixL().solve(Vector::Ones(n));
    c.beta = ow.dot(yw) / ow.squaredNorm();
    const double rss = (yw - c.beta * ow).squaredNorm();
    c.sigma2 = std::max(rss / static_cast<double>(n),
                        1e-24 * y.squaredNorm() / static_cast<double>(n) + 1e-300);
    double logdet = 0.0;
    const Matrix& packed = llt.matrixLLT();
    for (Index i = 0; i < n; ++i) logdet += std::log(packed(i, i));
    c.log_likelihood = -0.5 * static_cast<double>(n) * std::log(c.sigma2) - logdet;
    c.ok = true;
    if (llt_out) *llt_out = std::move(llt);
    return c;
}

}  // namespace

CategGpModel CategGpModel::fit(const Matrix& x, const std::vector<int>& flags, const Vector& y,
                               const GpFitOptions& opt) {
    if (x.rows() != y.size() || static_cast<Index>(flags.size()) != x.rows())
        throw Error("fit_categ_gp: row count mismatch");
    for (int f : flags)
        if (f != 1 && f != 2) throw Error("fit_categ_gp: fidelity flags must be 1 or 2");

    CategGpModel m;
    m.x_ = x;
    m.flags_ = flags;
    m.y_ = y;
    m.nugget_ = opt.nugget;

    const bool single_fidelity =
        std::set<int>(flags.begin(), flags.end()).size() < 2;

    const Index n = x.rows();
    const Index dim = x.cols();
    const Vector widths = widths_of(x);
    DistanceMatrices dm(x);
    std::vector<bool> mask(static_cast<std::size_t>(n * (n - 1) / 2));
    {
        std::size_t p = 0;
        for (Index i = 1; i < n; ++i)
            for (Index j = 0; j < i; ++j, ++p)
                mask[p] = flags[static_cast<std::size_t>(i)] != flags[static_cast<std::size_t>(j)];
    }

    Matrix r(n, n);
    auto params_of = [&](const Vector& u) {
        Vector ls(dim);
        for (Index k = 0; k < dim; ++k)
            ls[k] = widths[k] * std::pow(10.0, std::clamp(u[k], -3.0, 3.0));
        const double tf = single_fidelity ? 1.0 : sigmoid(std::clamp(u[dim], -16.0, 16.0));
        return std::make_pair(ls, tf);
    };
    auto objective = [&](const Vector& u) {
        const auto [ls, tf] = params_of(u);
        dm.correlation_matrix_masked(ls, mask, tf, r);
        const Concentrated c = likelihood(r, m.nugget_, y);
        return c.ok ? -c.log_likelihood : 1e300;
    };

    const Index nparam = dim + 1;
    Vector best_u = Vector::Zero(nparam);
    best_u[dim] = logit(0.5);
    if (opt.fixed_lengthscales) {
        // fixed vector layout: lengthscales followed by theta_f
        if (opt.fixed_lengthscales->size() != nparam)
            throw Error("fit_categ_gp: fixed hyperparameter size mismatch (lengthscales + theta_f)");
        for (Index k = 0; k < dim; ++k)
            best_u[k] = std::log10((*opt.fixed_lengthscales)[k] / widths[k]);
        const double tf = (*opt.fixed_lengthscales)[dim];
        if (!(tf > 0.0) || tf > 1.0) throw Error("fit_categ_gp: theta_f must be in (0, 1]");
        best_u[dim] = tf >= 1.0 ? 16.0 : logit(tf);
    } else if (n >= 2) {
        Rng rng(opt.seed);
        NelderMeadOptions nm;
        nm.max_evals = opt.max_evals_per_restart > 0 ? opt.max_evals_per_restart
                                                     : 12 * static_cast<int>(nparam) + 20;
        nm.ftol_rel = 1e-5;
        double best_f = std::numeric_limits<double>::infinity();
        m.diag_.restart_values.resize(opt.restarts);
        for (int k = 0; k < opt.restarts; ++k) {
            Vector u0(nparam);
            for (Index j = 0; j < dim; ++j) u0[j] = rng.uniform(-2.0, 2.0);
            u0[dim] = logit(rng.uniform(0.05, 0.95));
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
        polish.max_evals = 40 * static_cast<int>(nparam) + 40;
        const NelderMeadResult res = nelder_mead(objective, best_u, polish);
        if (res.value < best_f) best_u = res.x;
    }

    const auto [ls, tf] = params_of(best_u);
    m.kernel_.lengthscales = ls;
    m.theta_f_ = opt.fixed_lengthscales ? (*opt.fixed_lengthscales)[dim] : tf;
    dm.correlation_matrix_masked(m.kernel_.lengthscales, mask, m.theta_f_, r);
    Concentrated c = likelihood(r, m.nugget_, y, &m.llt_);
    if (!c.ok) throw Error("fit_categ_gp: covariance not positive definite after max jitter");

    m.kernel_.variance = c.sigma2;
    m.trend_ = c.beta;
    m.alpha_ = m.llt_.solve(y - Vector::Constant(n, c.beta));
    const Vector rinv_ones = m.llt_.solve(Vector::Ones(n));
    m.trend_gram_inv_ = 1.0 / Vector::Ones(n).dot(rinv_ones);
    m.diag_.log_likelihood = c.log_likelihood;
    m.diag_.jitter = c.jitter;
    return m;
}

GpModel::Prediction CategGpModel::predict(const Vector& q, int flag) const {
    if (q.size() != x_.cols()) throw Error("CategGpModel::predict: query length mismatch");
    Vector rvec;
    correlation_vector(x_, kernel_.lengthscales, q, rvec);
    for (Index i = 0; i < rvec.size(); ++i)
        if (flags_[static_cast<std::size_t>(i)] != flag) rvec[i] *= theta_f_;

    GpModel::Prediction p;
    p.mean = trend_ + rvec.dot(alpha_);
    const Vector rinv_r = llt_.solve(rvec);
    const double u = 1.0 - Vector::Ones(rvec.size()).dot(rinv_r);
    double var = kernel_.variance * (1.0 + nugget_ - rvec.dot(rinv_r) + u * u * trend_gram_inv_);
    p.variance = std::max(var, 0.0);
    return p;
}

double CategGpModel::predict_mean(const Vector& q, int flag) const {
    if (q.size() != x_.cols()) throw Error("CategGpModel::predict_mean: query length mismatch");
    Vector rvec;
    correlation_vector(x_, kernel_.lengthscales, q, rvec);
    for (Index i = 0; i < rvec.size(); ++i)
        if (flags_[static_cast<std::size_t>(i)] != flag) rvec[i] *= theta_f_;
    return trend_ + rvec.dot(alpha_);
}

CategGpModel fit_categ_gp(const Matrix& x, const std::vector<int>& flags, const Vector& y,
                          const GpFitOptions& opt) {
    return CategGpModel::fit(x, flags, y, opt);
}

}  // namespace mfs
