#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"

using namespace sdr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = n(rng);
  return M;
}

MatrixXd random_symmetric(Eigen::Index p, std::uint64_t seed) {
  const MatrixXd A = random_matrix(p, p, seed);
  return A + A.transpose();
}

}  // namespace

TEST(SymEig, DiagonalMatrix) {
  MatrixXd S = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const auto e = linalg::sym_eig_topk(S, 1);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.vectors(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(e.vectors(1, 0), 0.0, 1e-14);
}

TEST(SymEig, TwoByTwoClosedForm) {
  MatrixXd S(2, 2);
  S << 2, 1, 1, 2;
  const auto e = linalg::sym_eig_topk(S, 2);
  EXPECT_NEAR(e.values(0), 3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.vectors(0, 0), r, 1e-14);
  EXPECT_NEAR(e.vectors(1, 0), r, 1e-14);
  // Equal magnitudes: lowest index carries the positive sign.
  EXPECT_NEAR(e.vectors(0, 1), r, 1e-14);
  EXPECT_NEAR(e.vectors(1, 1), -r, 1e-14);
}

TEST(SymEig, ReconstructionOfFullDecomposition) {
  const MatrixXd S = random_symmetric(5, 11);
  const auto e = linalg::sym_eig_topk(S, 5);
  const MatrixXd R = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((R - S).norm(), 1e-8);
}

TEST(SymEig, ResidualOrderAndOrthonormalityProperty) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 20);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(p));
    const MatrixXd S = random_symmetric(p, 1000 + rep);
    const auto e = linalg::sym_eig_topk(S, k);
    ASSERT_EQ(e.values.size(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double lam = e.values(i);
      EXPECT_LE((S * e.vectors.col(i) - lam * e.vectors.col(i)).norm(),
                1e-7 * std::max(1.0, std::abs(lam)));
      if (i > 0) EXPECT_GE(e.values(i - 1), e.values(i));
    }
    EXPECT_LE(linalg::orthonormality_error(e.vectors), 1e-8);
  }
}

TEST(SymEig, RejectsNonSymmetric) {
  MatrixXd S(2, 2);
  S << 1, 2, 0, 1;
  EXPECT_THROW(linalg::sym_eig_topk(S, 1), ContractViolation);
}

TEST(SymEig, RejectsBadK) {
  const MatrixXd S = MatrixXd::Identity(3, 3);
  EXPECT_THROW(linalg::sym_eig_topk(S, 0), ContractViolation);
  EXPECT_THROW(linalg::sym_eig_topk(S, 4), ContractViolation);
}

TEST(SymEig, RejectsNonFinite) {
  MatrixXd S = MatrixXd::Identity(2, 2);
  S(0, 0) = std::nan("");
  EXPECT_THROW(linalg::sym_eig_topk(S, 1), ContractViolation);
}

TEST(SignConvention, LargestMagnitudePositiveAndIdempotent) {
  MatrixXd V = random_matrix(6, 4, 3);
  linalg::fix_signs(V);
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index idx = 0;
    V.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(V(idx, j), 0.0);
  }
  MatrixXd W = V;
  linalg::fix_signs(W);
  EXPECT_EQ(W, V);
}

TEST(SignConvention, TieGoesToLowestIndex) {
  VectorXd v(3);
  v << 0.5, -0.5, 0.1;
  linalg::fix_sign(v);
  EXPECT_GT(v(0), 0.0);
  v << -0.5, 0.5, 0.1;
  linalg::fix_sign(v);
  EXPECT_GT(v(0), 0.0);
}

TEST(Orthonormalize, IdentityColumnsUnchanged) {
  const MatrixXd I = MatrixXd::Identity(4, 2);
  EXPECT_LE((linalg::orthonormalize(I) - I).norm(), 1e-15);
}

TEST(Orthonormalize, RemovesScaling) {
  MatrixXd M(3, 2);
  M << 2, 0, 0, 3, 0, 0;
  MatrixXd expected(3, 2);
  expected << 1, 0, 0, 1, 0, 0;
  EXPECT_LE((linalg::orthonormalize(M) - expected).norm(), 1e-15);
}

TEST(Orthonormalize, ProjectorIdentity) {
  const MatrixXd M = random_matrix(6, 3, 17);
  const MatrixXd Q = linalg::orthonormalize(M);
  EXPECT_LE(linalg::orthonormality_error(Q), 1e-10);
  EXPECT_LE((Q * Q.transpose() * M - M).norm(), 1e-8);
}

TEST(Orthonormalize, PositiveRDiagonal) {
  const MatrixXd M = random_matrix(5, 3, 19);
  const MatrixXd Q = linalg::orthonormalize(M);
  const MatrixXd R = Q.transpose() * M;
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_GT(R(j, j), 0.0);
}

TEST(Orthonormalize, RankErrorNamesColumn) {
  MatrixXd M(3, 3);
  M << 1, 2, 0, 0, 0, 1, 0, 0, 0;
  try {
    linalg::orthonormalize(M);
    FAIL() << "expected RankError";
  } catch (const RankError& e) {
    EXPECT_EQ(e.column(), 1u);
  }
}

TEST(StiefelStep, ZeroGradientIsFixedPoint) {
  const MatrixXd U = linalg::orthonormalize(random_matrix(5, 2, 23));
  EXPECT_LE((linalg::stiefel_step(U, MatrixXd::Zero(5, 2), 0.7) - U).norm(), 1e-14);
}

TEST(StiefelStep, NormalGradientIsFixedPoint) {
  const MatrixXd U = linalg::orthonormalize(random_matrix(5, 2, 29));
  for (double step : {1e-3, 1.0, 50.0}) {
    EXPECT_LE((linalg::stiefel_step(U, U, step) - U).norm(), 1e-12);
  }
}

TEST(StiefelStep, AscentOfTraceAlongNegativeGradient) {
  const MatrixXd B = random_matrix(6, 6, 31);
  const MatrixXd A = B * B.transpose();
  const MatrixXd U = linalg::orthonormalize(random_matrix(6, 2, 37));
  const auto f = [&](const MatrixXd& V) { return (V.transpose() * A * V).trace(); };
  // −G = ∂/∂U trace(UᵀAU) = 2AU, so stepping along −G increases the trace.
  const MatrixXd G = -2.0 * A * U;
  const double h = 1e-6;
  const MatrixXd V = linalg::stiefel_step(U, G, h);
  EXPECT_GT(f(V), f(U));
  const double predicted = linalg::tangent_project(U, G).squaredNorm();
  EXPECT_NEAR((f(V) - f(U)) / h, predicted, 1e-4 * predicted);
}

TEST(StiefelStep, FeasibleForAnyGradientMagnitude) {
  const MatrixXd U = linalg::orthonormalize(random_matrix(8, 3, 41));
  for (double scale : {1e-8, 1.0, 1e4}) {
    const MatrixXd G = scale * random_matrix(8, 3, 43);
    EXPECT_LE(linalg::orthonormality_error(linalg::stiefel_step(U, G, 0.5)), 1e-8);
  }
}

TEST(StiefelStep, RejectsNonpositiveStep) {
  const MatrixXd U = MatrixXd::Identity(3, 1);
  EXPECT_THROW(linalg::stiefel_step(U, U, 0.0), ContractViolation);
  EXPECT_THROW(linalg::stiefel_step(U, U, -1.0), ContractViolation);
}

TEST(StiefelStep, RejectsShapeMismatch) {
  const MatrixXd U = MatrixXd::Identity(3, 1);
  EXPECT_THROW(linalg::stiefel_step(U, MatrixXd::Zero(3, 2), 1.0), DimensionMismatch);
}

TEST(Gram, ExactlySymmetric) {
  const MatrixXd X = random_matrix(30, 7, 47);
  const MatrixXd C = linalg::gram(X);
  EXPECT_EQ(C, C.transpose());
  EXPECT_LE((C - X.transpose() * X).norm(), 1e-10 * C.norm());
}

TEST(Projector, DistanceIsRotationInvariant) {
  const MatrixXd U = linalg::orthonormalize(random_matrix(5, 2, 53));
  Eigen::Matrix2d R;
  R << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  EXPECT_LE(linalg::projector_distance(U, U * R), 1e-14);
  EXPECT_LE(linalg::projector_distance(U, -U), 1e-14);
}
