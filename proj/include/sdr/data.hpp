#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace sdr {

/// An N x P variable matrix with its N-vector response.
///
/// Invariants (checked on construction): N >= 2, P >= 1, rows(X) == size(y),
/// every entry finite.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y);

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  Eigen::Index samples() const noexcept { return X_.rows(); }
  Eigen::Index variables() const noexcept { return X_.cols(); }

  /// Contiguous block of rows [first, first + count).
  Dataset rows(Eigen::Index first, Eigen::Index count) const;
  /// Rows in the given order.
  Dataset select_rows(const std::vector<Eigen::Index>& order) const;

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
};

/// Per-column min/max captured before centering when unit scaling is on.
struct UnitScaling {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
  std::vector<bool> constant;  // true where max == min; scaling skipped there
};

/// Scale-then-center preprocessing fitted on one dataset and replayed on
/// others. Responses are centered with y_mean and otherwise left in their
/// original units.
struct CenteringTransform {
  Eigen::VectorXd column_means;  // means of the (scaled) fitting columns
  double y_mean = 0.0;
  std::optional<UnitScaling> scaling;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd apply_response(const Eigen::VectorXd& y) const;
  Dataset apply(const Dataset& d) const;

  Eigen::MatrixXd invert(const Eigen::MatrixXd& Z) const;
  Eigen::VectorXd invert_response(const Eigen::VectorXd& yc) const;
};

CenteringTransform fit_centering(const Dataset& d, bool unit_scale);

}  // namespace sdr
