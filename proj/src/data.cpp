#include "sdr/data.hpp"

#include <string>

#include "sdr/errors.hpp"

namespace sdr {

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() < 2) throw ContractViolation("Dataset: need at least 2 samples");
  if (X_.cols() < 1) throw ContractViolation("Dataset: need at least 1 variable");
  if (X_.rows() != y_.size()) {
    throw DimensionMismatch("Dataset: X has " + std::to_string(X_.rows()) +
                            " rows but y has " + std::to_string(y_.size()) + " entries");
  }
  if (!X_.allFinite() || !y_.allFinite()) {
    throw ContractViolation("Dataset: non-finite entries");
  }
}

Dataset Dataset::rows(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 0 || first + count > samples()) {
    throw ContractViolation("Dataset::rows: range out of bounds");
  }
  return Dataset(X_.middleRows(first, count), y_.segment(first, count));
}

Dataset Dataset::select_rows(const std::vector<Eigen::Index>& order) const {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(order.size()), variables());
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    if (src < 0 || src >= samples()) throw ContractViolation("Dataset::select_rows: bad index");
    X.row(i) = X_.row(src);
    y(i) = y_(src);
  }
  return Dataset(std::move(X), std::move(y));
}

CenteringTransform fit_centering(const Dataset& d, bool unit_scale) {
  CenteringTransform t;
  Eigen::MatrixXd X = d.X();
  if (unit_scale) {
    UnitScaling s;
    s.min = X.colwise().minCoeff().transpose();
    s.max = X.colwise().maxCoeff().transpose();
    s.constant.assign(static_cast<std::size_t>(X.cols()), false);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (s.max(j) > s.min(j)) {
        X.col(j) = (X.col(j).array() - s.min(j)) / (s.max(j) - s.min(j));
      } else {
        s.constant[static_cast<std::size_t>(j)] = true;
      }
    }
    t.scaling = std::move(s);
  }
  t.column_means = X.colwise().mean().transpose();
  t.y_mean = d.y().mean();
  return t;
}

Eigen::MatrixXd CenteringTransform::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != column_means.size()) {
    throw DimensionMismatch("CenteringTransform: expected " +
                            std::to_string(column_means.size()) + " columns, got " +
                            std::to_string(X.cols()));
  }
  Eigen::MatrixXd out = X;
  if (scaling) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (scaling->constant[static_cast<std::size_t>(j)]) continue;
      out.col(j) = (out.col(j).array() - scaling->min(j)) / (scaling->max(j) - scaling->min(j));
    }
  }
  out.rowwise() -= column_means.transpose();
  return out;
}

Eigen::VectorXd CenteringTransform::apply_response(const Eigen::VectorXd& y) const {
  return y.array() - y_mean;
}

Dataset CenteringTransform::apply(const Dataset& d) const {
  return Dataset(apply(d.X()), apply_response(d.y()));
}

Eigen::MatrixXd CenteringTransform::invert(const Eigen::MatrixXd& Z) const {
  if (Z.cols() != column_means.size()) {
    throw DimensionMismatch("CenteringTransform::invert: column count mismatch");
  }
  Eigen::MatrixXd out = Z;
  out.rowwise() += column_means.transpose();
  if (scaling) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (scaling->constant[static_cast<std::size_t>(j)]) continue;
      out.col(j) = out.col(j).array() * (scaling->max(j) - scaling->min(j)) + scaling->min(j);
    }
  }
  return out;
}

Eigen::VectorXd CenteringTransform::invert_response(const Eigen::VectorXd& yc) const {
  return yc.array() + y_mean;
}

}  // namespace sdr
