#include "sdr/wrapper.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"
#include "sdr/regression.hpp"

namespace sdr {

namespace {

void check_k(Eigen::Index K, Eigen::Index P, const char* who) {
  if (K < 1 || K > P) {
    throw ContractViolation(std::string(who) + ": K=" + std::to_string(K) + " outside [1, " +
                            std::to_string(P) + "]");
  }
}

// Columns of X in the given order, first m of them.
Eigen::MatrixXd leading_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& order,
                                Eigen::Index m) {
  Eigen::MatrixXd out(X.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) out.col(j) = X.col(order[static_cast<std::size_t>(j)]);
  return out;
}

Eigen::MatrixXd permuted_gram(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& order) {
  const Eigen::MatrixXd C = linalg::gram(X);
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = C(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace

double score(const Eigen::VectorXd& x, const Eigen::VectorXd& y, ScoreKind kind) {
  const double inner = std::abs(x.dot(y));
  if (kind == ScoreKind::COVARIANCE) return inner;
  const double denom = x.norm() * y.norm();
  if (denom == 0.0) return 0.0;
  return std::min(1.0, inner / denom);
}

VariableScores score_variables(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               ScoreKind kind) {
  if (X.rows() != y.size()) throw DimensionMismatch("score_variables: rows(X) != size(y)");
  VariableScores out;
  out.scores.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) out.scores(j) = score(X.col(j), y, kind);
  out.ranking.resize(static_cast<std::size_t>(X.cols()));
  std::iota(out.ranking.begin(), out.ranking.end(), Eigen::Index{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return out.scores(a) > out.scores(b); });
  return out;
}

Eigen::MatrixXd pca_basis(const Eigen::MatrixXd& X, Eigen::Index K) {
  check_k(K, X.cols(), "pca_basis");
  return linalg::sym_eig_topk(linalg::gram(X), K).vectors;
}

FittedReducer fit_pca(const Dataset& centered, Eigen::Index K) {
  return make_basis_reducer(MethodTag::PCA, pca_basis(centered.X(), K));
}

BasisEvaluator training_mse_evaluator(const Dataset& centered) {
  return [&centered](const Eigen::MatrixXd& U) {
    const Eigen::MatrixXd Z = centered.X() * U;
    const RegressionModel model = ols_fit(Z, centered.y());
    return mse(model.predict(Z), centered.y());
  };
}

BairScan fit_bair_scan(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                       const BasisEvaluator& evaluator) {
  const Eigen::MatrixXd& X = centered.X();
  const Eigen::Index P = X.cols();
  check_k(K, P, "fit_bair");
  const VariableScores ranked = score_variables(X, centered.y(), kind);
  const Eigen::MatrixXd C = permuted_gram(X, ranked.ranking);

  BairScan scan;
  Eigen::MatrixXd best_basis;
  Eigen::Index best_m = 0;
  double best_mse = 0.0;
  for (Eigen::Index m = K; m <= P; ++m) {
    const Eigen::MatrixXd local = linalg::sym_eig_topk(C.topLeftCorner(m, m), K).vectors;
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(P, K);
    for (Eigen::Index i = 0; i < m; ++i) U.row(ranked.ranking[static_cast<std::size_t>(i)]) = local.row(i);
    const double value = evaluator(U);
    scan.mse_by_m.push_back(value);
    if (best_m == 0 || value < best_mse) {
      best_m = m;
      best_mse = value;
      best_basis = std::move(U);
    }
  }
  scan.reducer = make_basis_reducer(MethodTag::BAIR, std::move(best_basis));
  scan.reducer.hyper.M = best_m;
  scan.reducer.hyper.score = kind;
  return scan;
}

FittedReducer fit_bair(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                       const BasisEvaluator& evaluator) {
  return fit_bair_scan(centered, K, kind, evaluator).reducer;
}

FittedReducer fit_pv(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                     const PvOptions& opts) {
  const Eigen::Index P = centered.variables();
  check_k(K, P, "fit_pv");
  const Eigen::Index max_m = opts.max_m > 0 ? std::min(opts.max_m, P) : P;
  const Eigen::VectorXd& y = centered.y();
  Eigen::MatrixXd Xk = centered.X();
  // Columns deflated to round-off level are zeroed so they score 0 instead of
  // correlating by noise.
  const Eigen::VectorXd floor = 1e-9 * Xk.colwise().norm().transpose();

  PvState state;
  for (Eigen::Index k = 0; k < K; ++k) {
    const VariableScores ranked = score_variables(Xk, y, kind);
    const Eigen::MatrixXd C = permuted_gram(Xk, ranked.ranking);
    const Eigen::MatrixXd selected_all = leading_columns(Xk, ranked.ranking, max_m);

    Eigen::Index best_m = 0;
    double best_score = -1.0;
    Eigen::VectorXd best_u;
    Eigen::VectorXd best_z;
    for (Eigen::Index m = 1; m <= max_m; ++m) {
      Eigen::VectorXd u = linalg::sym_eig_topk(C.topLeftCorner(m, m), 1).vectors.col(0);
      Eigen::VectorXd z = selected_all.leftCols(m) * u;
      const double s = score(z, y, ScoreKind::PEARSON);
      if (s > best_score) {
        best_score = s;
        best_m = m;
        best_u = std::move(u);
        best_z = std::move(z);
      }
    }
    const double zz = best_z.squaredNorm();
    if (!(zz > 0.0)) {
      throw DegenerateDirectionError(static_cast<std::size_t>(k + 1),
                                     "fit_pv: selected variables are all zero at iteration " +
                                         std::to_string(k + 1));
    }
    PvStep step;
    step.variables.assign(ranked.ranking.begin(), ranked.ranking.begin() + best_m);
    step.direction = std::move(best_u);
    step.deflation = Xk.transpose() * best_z / zz;
    Xk.noalias() -= best_z * step.deflation.transpose();
    for (Eigen::Index j = 0; j < P; ++j) {
      if (Xk.col(j).norm() <= floor(j)) Xk.col(j).setZero();
    }
    state.steps.push_back(std::move(step));
  }

  FittedReducer r;
  r.method = MethodTag::PV;
  r.K = K;
  r.state = std::move(state);
  r.hyper.score = kind;
  return r;
}

FittedReducer fit_pcps(const Dataset& centered, Eigen::Index K, ScoreKind kind) {
  const Eigen::MatrixXd& X = centered.X();
  const Eigen::Index P = X.cols();
  check_k(K, P, "fit_pcps");
  // Only the first min(N-1, P) components can carry variance.
  const Eigen::Index usable = std::max(K, std::min(centered.samples() - 1, P));
  const linalg::EigenPairs pcs = linalg::sym_eig_topk(linalg::gram(X), usable);

  std::vector<double> s(static_cast<std::size_t>(usable));
  for (Eigen::Index k = 0; k < usable; ++k) {
    s[static_cast<std::size_t>(k)] = score(X * pcs.vectors.col(k), centered.y(), kind);
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(usable));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return s[static_cast<std::size_t>(a)] > s[static_cast<std::size_t>(b)];
  });

  Eigen::MatrixXd U(P, K);
  for (Eigen::Index j = 0; j < K; ++j) U.col(j) = pcs.vectors.col(order[static_cast<std::size_t>(j)]);
  FittedReducer r = make_basis_reducer(MethodTag::PCPS, std::move(U));
  r.hyper.score = kind;
  return r;
}

}  // namespace sdr
