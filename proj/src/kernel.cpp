#include "mfs/kernel.hpp"

#include <cmath>

namespace mfs {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964091736687747;
}

double matern52_of_r(double r) {
    const double t = kSqrt5 * r;
    if (t >= 709.0) return 0.0;  // exp underflow region; avoids inf * 0 at r = inf
    return (1.0 + t + t * t / 3.0) * std::exp(-t);
}

double Matern52Kernel::correlation(const Vector& a, const Vector& b) const {
    if (a.size() != b.size() || a.size() != lengthscales.size())
        throw Error("Matern52Kernel: length mismatch");
    double s = 0.0;
    for (Index k = 0; k < a.size(); ++k) {
        const double d = (a[k] - b[k]) / lengthscales[k];
        s += d * d;
    }
    return matern52_of_r(std::sqrt(s));
}

DistanceMatrices::DistanceMatrices(const Matrix& x) : n_(x.rows()) {
    const Index m = n_ * (n_ - 1) / 2;
    d2_.resize(m, x.cols());
    Index p = 0;
    for (Index i = 1; i < n_; ++i)
        for (Index j = 0; j < i; ++j, ++p)
            d2_.row(p) = (x.row(i) - x.row(j)).array().square();
}

void DistanceMatrices::correlation_matrix(const Vector& lengthscales, Matrix& r) const {
    const Vector w = lengthscales.array().square().inverse();
    const Vector s = d2_ * w;
    r.resize(n_, n_);
    r.diagonal().setOnes();
    Index p = 0;
    for (Index i = 1; i < n_; ++i)
        for (Index j = 0; j < i; ++j, ++p) {
            const double v = matern52_of_r(std::sqrt(s[p]));
            r(i, j) = v;
            r(j, i) = v;
        }
}

void DistanceMatrices::correlation_matrix_masked(const Vector& lengthscales,
                                                 const std::vector<bool>& packed_mask,
                                                 double cross_factor, Matrix& r) const {
    const Vector w = lengthscales.array().square().inverse();
    const Vector s = d2_ * w;
    r.resize(n_, n_);
    r.diagonal().setOnes();
    Index p = 0;
    for (Index i = 1; i < n_; ++i)
        for (Index j = 0; j < i; ++j, ++p) {
            double v = matern52_of_r(std::sqrt(s[p]));
            if (packed_mask[static_cast<std::size_t>(p)]) v *= cross_factor;
            r(i, j) = v;
            r(j, i) = v;
        }
}

void correlation_vector(const Matrix& x, const Vector& lengthscales, const Vector& q, Vector& out) {
    if (q.size() != x.cols()) throw Error("correlation_vector: query length mismatch");
    const Vector w = lengthscales.array().square().inverse();
    out.resize(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (Index k = 0; k < x.cols(); ++k) {
            const double d = x(i, k) - q[k];
            s += d * d * w[k];
        }
        out[i] = matern52_of_r(std::sqrt(s));
    }
}

}  // namespace mfs
