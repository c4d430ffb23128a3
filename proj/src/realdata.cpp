#include "sdr/realdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "parallel.hpp"
#include "sdr/errors.hpp"

namespace sdr {

Eigen::Index default_train_size(Eigen::Index samples) {
  return static_cast<Eigen::Index>(std::ceil(0.8 * static_cast<double>(samples)));
}

Split shuffle_split(const Dataset& d, Eigen::Index train_size, std::uint64_t seed) {
  const Eigen::Index n = d.samples();
  const auto n_val = static_cast<Eigen::Index>(std::llround(0.2 * static_cast<double>(train_size)));
  if (train_size < 2 || n - train_size < 2 || n_val < 2 || train_size - n_val < 2) {
    throw ConfigError("train size " + std::to_string(train_size) + " leaves too few rows of " +
                      std::to_string(n));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  const std::vector<Eigen::Index> train_rows(order.begin(), order.begin() + train_size);
  const std::vector<Eigen::Index> test_rows(order.begin() + train_size, order.end());
  Dataset train = d.select_rows(train_rows);
  Dataset tune = train.rows(0, train_size - n_val);
  Dataset val = train.rows(train_size - n_val, n_val);
  return Split{std::move(train), std::move(tune), std::move(val), d.select_rows(test_rows)};
}

const CurvePoint& RealDataReport::point(std::string_view method, Eigen::Index K) const {
  for (const auto& p : curve) {
    if (p.method == method && p.K == K) return p;
  }
  throw ContractViolation("RealDataReport: no point for " + std::string(method) + " at K=" +
                          std::to_string(K));
}

RealDataReport run_real_data(const Dataset& d, const RealDataConfig& config) {
  if (config.methods.empty()) throw ConfigError("method list is empty");
  const Eigen::Index P = d.variables();
  std::vector<Eigen::Index> ks = config.dimensions;
  if (ks.empty()) {
    for (Eigen::Index k = 1; k <= P; ++k) ks.push_back(k);
  }
  for (Eigen::Index k : ks) {
    if (k < 1 || k > P) {
      throw ConfigError("K=" + std::to_string(k) + " outside [1, " + std::to_string(P) + "]");
    }
  }
  const Eigen::Index train_size = config.train_size.value_or(default_train_size(d.samples()));
  const Split split = shuffle_split(d, train_size, config.seed);

  RealDataReport report;
  report.n_train = split.train.samples();
  report.n_test = split.test.samples();
  report.variables = P;
  report.seed = config.seed;
  {
    const CenteringTransform t = fit_centering(split.train, config.method_config.unit_scale);
    const Eigen::MatrixXd Xc = t.apply(split.train.X());
    const Eigen::MatrixXd C = (Xc.transpose() * Xc) / static_cast<double>(Xc.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
    report.spectrum = es.eigenvalues().reverse();
  }

  const std::size_t M = config.methods.size();
  std::vector<CurvePoint> points(M * ks.size());
  detail::parallel_for(points.size(), config.threads, [&](std::size_t idx) {
    const MethodSpec& method = config.methods[idx / ks.size()];
    const Eigen::Index K = ks[idx % ks.size()];
    CurvePoint& p = points[idx];
    p.method = method.name();
    p.K = K;
    try {
      const Evaluation ev = evaluate(method, split, K, config.method_config);
      p.train_mse = ev.train_mse;
      p.test_mse = ev.test_mse;
      p.gamma = ev.gamma;
      p.M = ev.M;
      p.flags = ev.flags;
    } catch (const std::exception& e) {
      p.train_mse = std::nan("");
      p.test_mse = std::nan("");
      p.error = e.what();
    }
  });
  report.curve = std::move(points);
  return report;
}

}  // namespace sdr
