#include <gtest/gtest.h>

#include <random>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"
#include "sdr/oracles.hpp"
#include "sdr/regression.hpp"
#include "sdr/wrapper.hpp"

using namespace sdr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd centered_gaussian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd v(n);
  for (auto& x : v) x = g(rng);
  v.array() -= v.mean();
  return v;
}

VectorXd orthogonal_to(const VectorXd& v, VectorXd u) {
  u -= (u.dot(v) / v.squaredNorm()) * v;
  return u;
}

const MatrixXd& basis(const FittedReducer& r) { return std::get<BasisState>(r.state).U; }

}  // namespace

TEST(Score, Definitions) {
  const VectorXd a = Eigen::Vector3d(-1, 0, 1);
  EXPECT_DOUBLE_EQ(score(a, a, ScoreKind::COVARIANCE), 2.0);
  EXPECT_DOUBLE_EQ(score(a, a, ScoreKind::PEARSON), 1.0);
  const VectorXd b = Eigen::Vector3d(1, -2, 1);
  EXPECT_DOUBLE_EQ(score(a, b, ScoreKind::COVARIANCE), 0.0);
  EXPECT_DOUBLE_EQ(score(a, b, ScoreKind::PEARSON), 0.0);
  const VectorXd c = Eigen::Vector3d(-2, 0, 2);
  EXPECT_DOUBLE_EQ(score(c, a, ScoreKind::COVARIANCE), 4.0);
  EXPECT_DOUBLE_EQ(score(c, a, ScoreKind::PEARSON), 1.0);
}

TEST(Score, ZeroColumnPearsonIsZero) {
  EXPECT_EQ(score(VectorXd::Zero(3), Eigen::Vector3d(-1, 0, 1), ScoreKind::PEARSON), 0.0);
}

TEST(Score, RescalingProperty) {
  const Dataset d = random_centered_dataset(40, 5, 0.5, 2);
  const VariableScores p = score_variables(d.X(), d.y(), ScoreKind::PEARSON);
  const VariableScores c = score_variables(d.X(), d.y(), ScoreKind::COVARIANCE);
  MatrixXd scaled = d.X();
  scaled.col(1) *= 3.5;
  const VariableScores p2 = score_variables(scaled, d.y(), ScoreKind::PEARSON);
  const VariableScores c2 = score_variables(scaled, d.y(), ScoreKind::COVARIANCE);
  EXPECT_NEAR(p2.scores(1), p.scores(1), 1e-14);
  EXPECT_NEAR(c2.scores(1), 3.5 * c.scores(1), 1e-12 * c2.scores(1));
  for (Eigen::Index j = 0; j < 5; ++j) EXPECT_LE(p.scores(j), 1.0);
}

TEST(Score, RankingTiesByLowerIndex) {
  const VectorXd y = Eigen::Vector3d(-1, 0, 1);
  MatrixXd X(3, 3);
  X << y, 2.0 * y, y;
  const VariableScores s = score_variables(X, y, ScoreKind::PEARSON);
  EXPECT_EQ(s.ranking, (std::vector<Eigen::Index>{0, 1, 2}));
  const VariableScores c = score_variables(X, y, ScoreKind::COVARIANCE);
  EXPECT_EQ(c.ranking, (std::vector<Eigen::Index>{1, 0, 2}));
}

TEST(Pca, BasisMatchesEigenvectors) {
  const Dataset d = random_centered_dataset(50, 6, 0.5, 4);
  const MatrixXd U = basis(fit_pca(d, 3));
  const auto e = linalg::sym_eig_topk(d.X().transpose() * d.X(), 3);
  EXPECT_LE(linalg::projector_distance(U, e.vectors), 1e-10);
  EXPECT_THROW(fit_pca(d, 7), ContractViolation);
}

TEST(Bair, FullSizeEqualsPca) {
  const Dataset d = random_centered_dataset(30, 4, 0.5, 5);
  const FittedReducer r = fit_bair(d, 4, ScoreKind::PEARSON, training_mse_evaluator(d));
  EXPECT_EQ(r.hyper.M, 4);
  EXPECT_LE(linalg::projector_distance(basis(r), basis(fit_pca(d, 4))), 1e-8);
}

TEST(Bair, SelectsTheOnlyRelevantColumn) {
  std::mt19937_64 rng(6);
  const VectorXd y = centered_gaussian(30, rng);
  MatrixXd X(30, 3);
  X.col(0) = y;
  X.col(1) = 0.01 * orthogonal_to(y, centered_gaussian(30, rng));
  X.col(2) = 0.01 * orthogonal_to(y, centered_gaussian(30, rng));
  const Dataset d(X, y);
  const BairScan scan = fit_bair_scan(d, 1, ScoreKind::PEARSON, training_mse_evaluator(d));
  const FittedReducer& r = scan.reducer;
  EXPECT_GE(std::abs(basis(r)(0, 0)), 0.99);
  // Brute-force enumeration agrees on the argmin.
  const auto best = std::min_element(scan.mse_by_m.begin(), scan.mse_by_m.end());
  EXPECT_EQ(*r.hyper.M, 1 + (best - scan.mse_by_m.begin()));
}

TEST(Bair, PerfectPredictorChoosesOne) {
  std::mt19937_64 rng(7);
  MatrixXd X(25, 4);
  for (Eigen::Index j = 0; j < 4; ++j) X.col(j) = centered_gaussian(25, rng);
  const Dataset d(X, X.col(0));
  const BairScan scan = fit_bair_scan(d, 1, ScoreKind::PEARSON, training_mse_evaluator(d));
  EXPECT_EQ(scan.reducer.hyper.M, 1);
  EXPECT_LE(scan.mse_by_m.front(), 1e-20);
}

TEST(Bair, BestNoWorseThanFullSet) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = random_centered_dataset(40, 8, 1.0, 100 + seed);
    const BairScan scan = fit_bair_scan(d, 3, ScoreKind::PEARSON, training_mse_evaluator(d));
    const Eigen::MatrixXd Z = reduce(scan.reducer, d.X());
    const double best = mse(ols_fit(Z, d.y()).predict(Z), d.y());
    EXPECT_LE(best, scan.mse_by_m.back() + 1e-12);
    EXPECT_LE(linalg::orthonormality_error(basis(scan.reducer)), 1e-8);
    // Zero outside the selected variables.
    EXPECT_EQ((basis(scan.reducer).rowwise().norm().array() > 0).count(), *scan.reducer.hyper.M);
  }
}

TEST(Bair, EvaluatorFailurePropagates) {
  const Dataset d = random_centered_dataset(20, 3, 0.5, 8);
  const BasisEvaluator bad = [](const MatrixXd&) -> double { throw Error("evaluator failed"); };
  EXPECT_THROW(fit_bair(d, 1, ScoreKind::PEARSON, bad), Error);
  EXPECT_THROW(fit_bair(d, 4, ScoreKind::PEARSON, training_mse_evaluator(d)), ContractViolation);
}

TEST(Pv, OneVariableEqualsResponse) {
  std::mt19937_64 rng(9);
  MatrixXd X(30, 4);
  for (Eigen::Index j = 0; j < 4; ++j) X.col(j) = centered_gaussian(30, rng);
  const Dataset d(X, X.col(2));
  const FittedReducer r = fit_pv(d, 1, ScoreKind::PEARSON);
  const auto& step = std::get<PvState>(r.state).steps.at(0);
  EXPECT_EQ(step.variables, (std::vector<Eigen::Index>{2}));
  EXPECT_NEAR(step.direction(0), 1.0, 1e-14);
  EXPECT_LE((reduce(r, X).col(0) - X.col(2)).norm(), 1e-12);
}

TEST(Pv, FeaturesUncorrelatedProperty) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Dataset d = random_centered_dataset(60, 10, 0.5, 500 + seed);
    const MatrixXd Z = reduce(fit_pv(d, 5, ScoreKind::PEARSON), d.X());
    for (Eigen::Index i = 0; i < 5; ++i) {
      for (Eigen::Index j = i + 1; j < 5; ++j) {
        EXPECT_LE(std::abs(Z.col(i).dot(Z.col(j))), 1e-8 * Z.col(i).norm() * Z.col(j).norm())
            << "seed " << seed << " pair " << i << "," << j;
      }
    }
  }
}

TEST(Pv, DeflatedColumnsOrthogonalToScore) {
  const Dataset d = random_centered_dataset(50, 7, 0.5, 10);
  const FittedReducer r = fit_pv(d, 4, ScoreKind::PEARSON);
  MatrixXd work = d.X();
  for (const auto& step : std::get<PvState>(r.state).steps) {
    VectorXd z = VectorXd::Zero(work.rows());
    for (std::size_t i = 0; i < step.variables.size(); ++i) {
      z += step.direction(static_cast<Eigen::Index>(i)) * work.col(step.variables[i]);
    }
    work -= z * step.deflation.transpose();
    EXPECT_LE((work.transpose() * z).cwiseAbs().maxCoeff(), 1e-8 * z.norm() * d.X().norm());
  }
}

TEST(Pv, MaxMCapRespected) {
  const Dataset d = random_centered_dataset(50, 8, 0.5, 11);
  const FittedReducer r = fit_pv(d, 3, ScoreKind::PEARSON, {.max_m = 2});
  for (const auto& step : std::get<PvState>(r.state).steps) EXPECT_LE(step.variables.size(), 2u);
}

TEST(Pv, DegenerateWhenEverythingDeflated) {
  std::mt19937_64 rng(12);
  MatrixXd X(20, 2);
  X.col(0) = centered_gaussian(20, rng);
  X.col(1) = 2.0 * X.col(0);
  const Dataset d(X, X.col(0));
  EXPECT_THROW(fit_pv(d, 2, ScoreKind::PEARSON), DegenerateDirectionError);
}

TEST(Pcps, PicksCorrelatedSecondComponent) {
  std::mt19937_64 rng(13);
  MatrixXd X(40, 2);
  X.col(0) = 3.0 * centered_gaussian(40, rng);
  X.col(1) = orthogonal_to(X.col(0), centered_gaussian(40, rng));
  // Columns are orthogonal with distinct norms, so the PCs are e1 and e2.
  const Dataset d(X, X.col(1));
  const MatrixXd U = basis(fit_pcps(d, 1, ScoreKind::PEARSON));
  EXPECT_NEAR(std::abs(U(1, 0)), 1.0, 1e-10);
}

TEST(Pcps, FullDimensionEqualsPca) {
  const Dataset d = random_centered_dataset(30, 5, 0.5, 14);
  EXPECT_LE(linalg::projector_distance(basis(fit_pcps(d, 5, ScoreKind::PEARSON)),
                                       basis(fit_pca(d, 5))),
            1e-8);
}

TEST(Pcps, ExhaustiveScanIsotropic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = whitened_dataset(40, 5, 600 + seed);
    const MatrixXd V = pca_basis(d.X(), 5);
    double best = -1.0;
    Eigen::Index arg = 0;
    for (Eigen::Index k = 0; k < 5; ++k) {
      const double s = score(d.X() * V.col(k), d.y(), ScoreKind::PEARSON);
      if (s > best) {
        best = s;
        arg = k;
      }
    }
    const MatrixXd U = basis(fit_pcps(d, 1, ScoreKind::PEARSON));
    EXPECT_NEAR(score(d.X() * U.col(0), d.y(), ScoreKind::PEARSON), best, 1e-12);
    EXPECT_LE(linalg::projector_distance(U, V.col(arg)), 1e-8);
  }
}

TEST(Pcps, RankDeficientUsesNonzeroComponents) {
  const Dataset d = random_centered_dataset(6, 10, 0.5, 15);
  const MatrixXd U = basis(fit_pcps(d, 3, ScoreKind::PEARSON));
  EXPECT_LE(linalg::orthonormality_error(U), 1e-8);
  EXPECT_GT((d.X() * U).colwise().norm().minCoeff(), 1e-8);
}
