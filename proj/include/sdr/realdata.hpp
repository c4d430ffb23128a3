#pragma once

// Real-data protocol: unit-scale and center on a seeded training split, then
// evaluate every method across a range of subspace dimensions.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/pipeline.hpp"

namespace sdr {

/// Seeded shuffle, then the first `train_size` rows train and the rest test.
/// The last round(0.2 · train_size) training rows form the validation split.
Split shuffle_split(const Dataset& d, Eigen::Index train_size, std::uint64_t seed);

/// ceil(0.8 N): 3919 of 4898 and 4700 of 5875.
Eigen::Index default_train_size(Eigen::Index samples);

struct RealDataConfig {
  std::vector<MethodSpec> methods = default_methods();
  std::vector<Eigen::Index> dimensions;  // K values; empty means 1..P
  std::optional<Eigen::Index> train_size;
  std::uint64_t seed = 0;
  MethodConfig method_config = [] {
    MethodConfig c;
    c.unit_scale = true;
    return c;
  }();
  int threads = 1;
};

struct CurvePoint {
  std::string method;
  Eigen::Index K = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  std::optional<Gamma> gamma;
  std::optional<Eigen::Index> M;
  std::vector<std::string> flags;
  std::optional<std::string> error;
};

struct RealDataReport {
  Eigen::Index n_train = 0;
  Eigen::Index n_test = 0;
  Eigen::Index variables = 0;
  std::uint64_t seed = 0;
  std::vector<CurvePoint> curve;  // method-major, ascending K
  Eigen::VectorXd spectrum;       // eigenvalues of the training covariance, descending

  const CurvePoint& point(std::string_view method, Eigen::Index K) const;
};

RealDataReport run_real_data(const Dataset& d, const RealDataConfig& config);

}  // namespace sdr
