#include "mfs/metrics.hpp"

#include <cmath>

namespace mfs {

double rmse(const Matrix& predictions, const Matrix& truths) {
    if (predictions.rows() != truths.rows() || predictions.cols() != truths.cols())
        throw Error("rmse: shape mismatch");
    if (truths.rows() == 0) throw Error("rmse: empty validation set");
    return std::sqrt((predictions - truths).squaredNorm() / static_cast<double>(truths.rows()));
}

double normed_rmse(double e, const Matrix& truths) {
    const Vector mean = truths.colwise().mean();
    const double denom2 =
        (truths.rowwise() - mean.transpose()).squaredNorm() / static_cast<double>(truths.rows());
    if (!(denom2 > 0.0)) throw Error("normed_rmse: zero-variance validation set");
    return e / std::sqrt(denom2);
}

double dr_error(const PcaModel& model, const Matrix& truths) {
    return std::sqrt(model.residual_rows(truths).squaredNorm() / static_cast<double>(truths.rows()));
}

double ism_error(const PcaModel& model, const Matrix& latent_predictions, const Matrix& truths) {
    const Matrix dz = model.transform_rows(truths) - latent_predictions;
    return std::sqrt(model.inverse_linear_rows(dz).squaredNorm() /
                     static_cast<double>(truths.rows()));
}

}  // namespace mfs
