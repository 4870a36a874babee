#pragma once

#include "mfs/pca.hpp"
#include "mfs/types.hpp"

namespace mfs {

// Root-mean-square over samples of the field-vector error norms:
// sqrt( mean_i ||y_i - yhat_i||^2 ). Rows are samples.
double rmse(const Matrix& predictions, const Matrix& truths);

// e divided by the rms distance of the truths to their mean field; equals 1
// for the predictor that always returns the validation mean.
double normed_rmse(double e, const Matrix& truths);

// rms of the DR round-trip residuals of the truths.
double dr_error(const PcaModel& model, const Matrix& truths);

// rms of the back-mapped latent prediction errors; the difference is mapped
// through the linear part of DR^{-1} (the affine offset cancels in a
// difference), which is what makes e^2 = e_dr^2 + e_ism^2 exact for PCA.
double ism_error(const PcaModel& model, const Matrix& latent_predictions, const Matrix& truths);

}  // namespace mfs
