#include "sdr/oracles.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "sdr/intrinsic.hpp"
#include "sdr/linalg.hpp"
#include "sdr/regression.hpp"
#include "sdr/synthetic.hpp"
#include "sdr/wrapper.hpp"

namespace sdr {

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) G(i, j) = normal(rng);
  }
  return G;
}

Eigen::MatrixXd center_columns(Eigen::MatrixXd X) {
  X.rowwise() -= X.colwise().mean();
  return X;
}

Eigen::VectorXd center(Eigen::VectorXd y) {
  y.array() -= y.mean();
  return y;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

OracleResult check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

OracleResult eig_reconstruction(std::mt19937_64& rng, bool perturb) {
  const Eigen::MatrixXd A = gaussian(5, 5, rng);
  const Eigen::MatrixXd S = A + A.transpose();
  linalg::EigenPairs e = linalg::sym_eig_topk(S, 5);
  if (perturb) e.values(0) += 1e-3;
  const double err =
      (e.vectors * e.values.asDiagonal() * e.vectors.transpose() - S).norm() / S.norm();
  bool sorted = true;
  for (Eigen::Index i = 1; i < 5; ++i) sorted = sorted && e.values(i - 1) >= e.values(i);
  return check("eig_reconstruction", err <= 1e-12 && sorted, "relative error " + fmt(err));
}

OracleResult qr_projector(std::mt19937_64& rng) {
  const Eigen::MatrixXd M = gaussian(5, 3, rng);
  const Eigen::MatrixXd Q = linalg::orthonormalize(M);
  const Eigen::MatrixXd direct = M * (M.transpose() * M).inverse() * M.transpose();
  const double err = (Q * Q.transpose() - direct).norm();
  const double orth = linalg::orthonormality_error(Q);
  return check("qr_projector", err <= 1e-10 && orth <= 1e-12,
               "projector error " + fmt(err) + ", orthonormality " + fmt(orth));
}

OracleResult stiefel_derivative(std::mt19937_64& rng) {
  const Eigen::MatrixXd B = gaussian(5, 5, rng);
  const Eigen::MatrixXd A = B * B.transpose();
  const Eigen::MatrixXd U = linalg::orthonormalize(gaussian(5, 2, rng));
  const auto f = [&](const Eigen::MatrixXd& V) { return (V.transpose() * A * V).trace(); };
  const Eigen::MatrixXd G = 2.0 * A * U;
  const double expected = -linalg::tangent_project(U, G).squaredNorm();
  const double h = 1e-7;
  const Eigen::MatrixXd V = linalg::stiefel_step(U, G, h);
  const double fd = (f(V) - f(U)) / h;
  const double rel = std::abs(fd - expected) / std::abs(expected);
  const double orth = linalg::orthonormality_error(V);
  return check("stiefel_step_derivative", rel <= 1e-4 && orth <= 1e-12,
               "relative derivative error " + fmt(rel) + ", orthonormality " + fmt(orth));
}

OracleResult sphere_grid(std::uint64_t seed) {
  double worst = 1.0;
  for (int rep = 0; rep < 3; ++rep) {
    const Dataset d = random_centered_dataset(40, 3, 0.5, seed + 100 + static_cast<std::uint64_t>(rep));
    const Eigen::Vector3d w = d.X().transpose() * d.y();
    const Eigen::Matrix3d C = d.X().transpose() * d.X();
    const double g = 0.3 * d.y().squaredNorm();
    const Eigen::Matrix3d pls_obj = w * w.transpose();
    const Eigen::Matrix3d ext_obj = pls_obj + g * C;
    const auto ratio = [](const Eigen::Matrix3d& A, const Eigen::MatrixXd& U) {
      const Eigen::Vector3d u = U.col(0);
      return u.dot(A * u) / sphere_grid_max(A);
    };
    worst = std::min(worst, ratio(pls_obj, std::get<BasisState>(fit_pls(d, 1).state).U));
    worst = std::min(worst, ratio(pls_obj, std::get<BasisState>(fit_barshan(d, 1).state).U));
    worst = std::min(worst, ratio(ext_obj, std::get<BasisState>(
                                               fit_barshan_extended(d, 1, Gamma::finite(g)).state).U));
  }
  return check("sphere_grid_1deg", worst >= 1.0 - 1e-3, "worst fitted/grid ratio " + fmt(worst));
}

OracleResult pcps_exhaustive(std::uint64_t seed) {
  const Dataset d = random_centered_dataset(30, 5, 0.5, seed + 200);
  const Eigen::Index K = 2;
  const Eigen::MatrixXd V = pca_basis(d.X(), 5);
  const Eigen::MatrixXd Z = d.X() * V;
  const VariableScores s = score_variables(Z, d.y(), ScoreKind::PEARSON);
  double best = -1.0;
  Eigen::MatrixXd best_basis;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = i + 1; j < 5; ++j) {
      const double total = s.scores(i) + s.scores(j);
      if (total > best) {
        best = total;
        best_basis.resize(5, 2);
        best_basis << V.col(i), V.col(j);
      }
    }
  }
  const FittedReducer r = fit_pcps(d, K, ScoreKind::PEARSON);
  const Eigen::MatrixXd& U = std::get<BasisState>(r.state).U;
  const double dist = linalg::projector_distance(U, best_basis);
  return check("pcps_exhaustive", dist <= 1e-10, "projector distance " + fmt(dist));
}

OracleResult pv_orthogonality(std::uint64_t seed) {
  const Dataset d = random_centered_dataset(40, 5, 0.5, seed + 300);
  const Eigen::MatrixXd Z = reduce(fit_pv(d, 3, ScoreKind::PEARSON), d.X());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < Z.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < Z.cols(); ++j) {
      const Eigen::VectorXd a = center(Z.col(i));
      const Eigen::VectorXd b = center(Z.col(j));
      worst = std::max(worst, std::abs(a.dot(b)) / (a.norm() * b.norm()));
    }
  }
  return check("pv_feature_correlation", worst <= 1e-8, "max |correlation| " + fmt(worst));
}

OracleResult ols_normal_equations(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 400);
  const Eigen::MatrixXd Z = gaussian(20, 4, rng);
  const Eigen::VectorXd y = gaussian(20, 1, rng).col(0);
  const RegressionModel m = ols_fit(Z, y);
  const Eigen::VectorXd r = y - m.predict(Z);
  const double err = std::max((Z.transpose() * r).norm(), std::abs(r.sum())) / (Z.norm() * y.norm());
  return check("ols_normal_equations", err <= 1e-12, "relative residual correlation " + fmt(err));
}

OracleResult orthogonal_collision(std::uint64_t seed) {
  const double diff = (random_orthogonal(5, seed) - random_orthogonal(5, seed + 1)).norm();
  const double same = (random_orthogonal(5, seed) - random_orthogonal(5, seed)).norm();
  const double orth = linalg::orthonormality_error(random_orthogonal(5, seed));
  return check("random_orthogonal_seeds", diff > 0.1 && same == 0.0 && orth <= 1e-10,
               "distinct-seed distance " + fmt(diff) + ", orthonormality " + fmt(orth));
}

OracleResult centering_inverse(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 500);
  const Eigen::MatrixXd X = 3.0 * gaussian(10, 4, rng).array() + 2.0;
  const Dataset d(X, gaussian(10, 1, rng).col(0));
  double worst = 0.0;
  for (bool unit : {false, true}) {
    const CenteringTransform t = fit_centering(d, unit);
    worst = std::max(worst, (t.invert(t.apply(X)) - X).norm() / X.norm());
    worst = std::max(worst, (t.invert_response(t.apply_response(d.y())) - d.y()).norm() / d.y().norm());
  }
  return check("centering_round_trip", worst <= 1e-12, "relative error " + fmt(worst));
}

OracleResult bair_enumeration(std::uint64_t seed) {
  const Dataset d = random_centered_dataset(30, 5, 1.0, seed + 600);
  const Eigen::Index K = 2;
  const VariableScores s = score_variables(d.X(), d.y(), ScoreKind::PEARSON);
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index best_m = 0;
  Eigen::MatrixXd best_basis;
  for (Eigen::Index M = K; M <= 5; ++M) {
    Eigen::MatrixXd sub(d.samples(), M);
    for (Eigen::Index j = 0; j < M; ++j) sub.col(j) = d.X().col(s.ranking[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd V = pca_basis(sub, K);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(5, K);
    for (Eigen::Index j = 0; j < M; ++j) U.row(s.ranking[static_cast<std::size_t>(j)]) = V.row(j);
    const Eigen::MatrixXd Z = d.X() * U;
    const double e = mse(ols_fit(Z, d.y()).predict(Z), d.y());
    if (e < best) {
      best = e;
      best_m = M;
      best_basis = U;
    }
  }
  const FittedReducer r = fit_bair(d, K, ScoreKind::PEARSON, training_mse_evaluator(d));
  const double dist = linalg::projector_distance(std::get<BasisState>(r.state).U, best_basis);
  const bool ok = r.hyper.M && *r.hyper.M == best_m && dist <= 1e-10;
  return check("bair_enumeration", ok,
               "M " + std::to_string(r.hyper.M.value_or(-1)) + " vs brute " + std::to_string(best_m) +
                   ", projector distance " + fmt(dist));
}

OracleResult sppca_recovery(std::uint64_t seed) {
  const double sigma = 1e-3;
  const Dataset train = sppca_model_dataset(2000, 5, 2, sigma, seed + 700, 0);
  const Dataset test = sppca_model_dataset(2000, 5, 2, sigma, seed + 700, 1);
  const SppcaFit fit = fit_sppca(train, 2);
  const double e = mse(predict_sppca(fit.reducer, test.X(), 0.0), test.y());
  bool monotone = true;
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    const double a = fit.log_likelihood[i - 1];
    monotone = monotone && fit.log_likelihood[i] >= a - 1e-8 * std::max(1.0, std::abs(a));
  }
  return check("sppca_recovery", e <= 10.0 * sigma * sigma && monotone,
               "test MSE / noise variance " + fmt(e / (sigma * sigma)));
}

OracleResult lspca_noiseless(std::uint64_t seed) {
  std::mt19937_64 rng(seed + 800);
  const Eigen::MatrixXd X = center_columns(gaussian(40, 5, rng));
  const Eigen::VectorXd y = X * gaussian(5, 1, rng).col(0);
  const Dataset d(X, y);
  const LspcaFit fit = fit_lspca(d, 2, Gamma::finite(0.0), {.max_iters = 5000, .tol = 1e-14});
  const Eigen::MatrixXd Z = X * fit.solution.U;
  const double rel = mse(ols_fit(Z, y).predict(Z), y) / mse(Eigen::VectorXd::Zero(40), y);
  return check("lspca_noiseless", rel <= 1e-8, "relative training MSE " + fmt(rel));
}

}  // namespace

Dataset random_centered_dataset(Eigen::Index N, Eigen::Index P, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd X = center_columns(gaussian(N, P, rng));
  const Eigen::VectorXd beta = gaussian(P, 1, rng).col(0);
  const Eigen::VectorXd eps = gaussian(N, 1, rng).col(0);
  return Dataset(X, center(X * beta + noise * eps));
}

Dataset whitened_dataset(Eigen::Index N, Eigen::Index P, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd Q = linalg::orthonormalize(center_columns(gaussian(N, P, rng)));
  const Eigen::VectorXd beta = gaussian(P, 1, rng).col(0);
  const Eigen::VectorXd eps = gaussian(N, 1, rng).col(0);
  return Dataset(Q, center(Q * beta + 0.1 * eps));
}

Dataset sppca_model_dataset(Eigen::Index N, Eigen::Index P, Eigen::Index K, double sigma,
                            std::uint64_t seed, std::uint64_t draw) {
  std::mt19937_64 params(seed);
  const Eigen::MatrixXd U = gaussian(P, K, params);
  const Eigen::VectorXd v = gaussian(K, 1, params).col(0);
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (draw + 1)));
  const Eigen::MatrixXd Z = gaussian(N, K, rng);
  const Eigen::MatrixXd X = Z * U.transpose() + sigma * gaussian(N, P, rng);
  const Eigen::VectorXd y = Z * v + sigma * gaussian(N, 1, rng).col(0);
  return Dataset(X, y);
}

double sphere_grid_max(const Eigen::Matrix3d& A) {
  constexpr double deg = std::numbers::pi / 180.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int t = 0; t <= 180; ++t) {
    for (int p = 0; p < 360; ++p) {
      const double theta = t * deg;
      const double phi = p * deg;
      const Eigen::Vector3d u(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                              std::cos(theta));
      best = std::max(best, u.dot(A * u));
    }
  }
  return best;
}

std::vector<OracleResult> run_oracles(std::uint64_t seed, bool inject_failure) {
  std::mt19937_64 rng(seed);
  const std::vector<std::pair<std::string, std::function<OracleResult()>>> oracles = {
      {"eig_reconstruction", [&] { return eig_reconstruction(rng, inject_failure); }},
      {"qr_projector", [&] { return qr_projector(rng); }},
      {"stiefel_step_derivative", [&] { return stiefel_derivative(rng); }},
      {"sphere_grid_1deg", [&] { return sphere_grid(seed); }},
      {"pcps_exhaustive", [&] { return pcps_exhaustive(seed); }},
      {"pv_feature_correlation", [&] { return pv_orthogonality(seed); }},
      {"ols_normal_equations", [&] { return ols_normal_equations(seed); }},
      {"random_orthogonal_seeds", [&] { return orthogonal_collision(seed); }},
      {"centering_round_trip", [&] { return centering_inverse(seed); }},
      {"bair_enumeration", [&] { return bair_enumeration(seed); }},
      {"sppca_recovery", [&] { return sppca_recovery(seed); }},
      {"lspca_noiseless", [&] { return lspca_noiseless(seed); }},
  };
  std::vector<OracleResult> results;
  for (const auto& [name, run] : oracles) {
    try {
      results.push_back(run());
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("raised: ") + e.what()});
    }
  }
  return results;
}

}  // namespace sdr
