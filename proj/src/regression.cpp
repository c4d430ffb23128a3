#include "sdr/regression.hpp"

#include "sdr/errors.hpp"

namespace sdr {

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != coefficients.size()) {
    throw DimensionMismatch("RegressionModel::predict: feature count mismatch");
  }
  return (Z * coefficients).array() + intercept;
}

RegressionModel ols_fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
  if (Z.rows() < 1) throw ContractViolation("ols_fit: need at least one sample");
  if (Z.rows() != y.size()) throw DimensionMismatch("ols_fit: rows(Z) != size(y)");
  if (!Z.allFinite() || !y.allFinite()) throw ContractViolation("ols_fit: non-finite input");

  const Eigen::RowVectorXd z_mean = Z.colwise().mean();
  const double y_mean = y.mean();
  RegressionModel model;
  if (Z.cols() == 0) {
    model.intercept = y_mean;
    return model;
  }
  const Eigen::MatrixXd Zc = Z.rowwise() - z_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Zc);
  model.coefficients = cod.solve(yc);
  model.intercept = y_mean - z_mean.dot(model.coefficients);
  return model;
}

double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& truth) {
  if (predictions.size() != truth.size()) throw DimensionMismatch("mse: length mismatch");
  if (predictions.size() == 0) throw ContractViolation("mse: empty input");
  return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

}  // namespace sdr
