#pragma once

#include <Eigen/Dense>

namespace sdr {

/// Affine least-squares predictor y ≈ Z·coefficients + intercept.
struct RegressionModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& Z) const;
};

/// Minimum-norm least squares with an intercept. Z and y are centered
/// internally, so rank-deficient designs (duplicated or collinear columns,
/// more columns than rows) get the pseudo-inverse solution.
RegressionModel ols_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y);

/// Mean squared error with 1/N normalization.
double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth);

}  // namespace sdr
