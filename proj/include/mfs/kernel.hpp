#pragma once

#include "mfs/types.hpp"

#include <vector>

namespace mfs {

// Anisotropic Matern-5/2: variance * (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r)
// with r the lengthscale-scaled Euclidean distance.
struct Matern52Kernel {
    Vector lengthscales;
    double variance = 1.0;

    double correlation(const Vector& a, const Vector& b) const;
    double operator()(const Vector& a, const Vector& b) const {
        return variance * correlation(a, b);
    }
};

double matern52_of_r(double r);

// Packed per-dimension squared differences of a fixed sample matrix; shared
// by every likelihood evaluation (and every latent-variable model) on the
// same inputs. Entry p enumerates the lower triangle (i > j) row-major.
class DistanceMatrices {
public:
    explicit DistanceMatrices(const Matrix& x);

    Index n() const { return n_; }
    Index dim() const { return d2_.cols(); }

    // Symmetric correlation matrix with unit diagonal.
    void correlation_matrix(const Vector& lengthscales, Matrix& r) const;

    // As above, with entries multiplied by cross_factor where mask differs
    // (used by the categorical-fidelity kernel).
    void correlation_matrix_masked(const Vector& lengthscales,
                                   const std::vector<bool>& packed_mask,
                                   double cross_factor, Matrix& r) const;

    const Matrix& packed() const { return d2_; }

private:
    Index n_ = 0;
    Matrix d2_;  // n(n-1)/2 x d
};

// Correlation vector between a query point and sample rows.
void correlation_vector(const Matrix& x, const Vector& lengthscales, const Vector& q, Vector& out);

}  // namespace mfs
