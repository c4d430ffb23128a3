#include "sdr/linalg.hpp"

#include <cmath>
#include <string>

#include "sdr/errors.hpp"

namespace sdr::linalg {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSignTieTol = 1e-12;
constexpr double kRankTol = 1e-12;

}  // namespace

Eigen::MatrixXd gram(const Eigen::MatrixXd& X) {
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
  C.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
  C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
  return C;
}

bool is_symmetric(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) return false;
  if (!S.allFinite()) return false;
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return (S - S.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * scale;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= top * (1.0 - kSignTieTol)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

void fix_signs(Eigen::MatrixXd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) fix_sign(V.col(j));
}

EigenPairs sym_eig_topk(const Eigen::MatrixXd& S, Eigen::Index k) {
  if (S.rows() == 0 || !is_symmetric(S)) {
    throw ContractViolation("sym_eig_topk: input must be a finite symmetric matrix");
  }
  const Eigen::Index p = S.rows();
  if (k < 1 || k > p) {
    throw ContractViolation("sym_eig_topk: k=" + std::to_string(k) +
                            " outside [1, " + std::to_string(p) + "]");
  }
  // Symmetrize exactly so the solver sees a self-adjoint matrix.
  const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    // Eigen caps the implicit QR sweep at 30 iterations per dimension.
    const auto iters = static_cast<std::size_t>(30 * p);
    throw IterationLimitError(iters, "sym_eig_topk: no convergence after " +
                                         std::to_string(iters) + " iterations");
  }
  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(p, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    out.values(j) = solver.eigenvalues()(p - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(p - 1 - j);
  }
  fix_signs(out.vectors);
  return out;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M) {
  const Eigen::Index p = M.rows();
  const Eigen::Index k = M.cols();
  if (!M.allFinite()) throw ContractViolation("orthonormalize: non-finite input");
  if (k > p) {
    throw RankError(static_cast<std::size_t>(p),
                    "orthonormalize: more columns than rows; column " +
                        std::to_string(p) + " is dependent");
  }
  const double scale = k > 0 ? M.colwise().norm().maxCoeff() : 0.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(std::abs(packed(j, j)) > kRankTol * scale)) {
      throw RankError(static_cast<std::size_t>(j),
                      "orthonormalize: column " + std::to_string(j) +
                          " is linearly dependent on the preceding columns");
    }
  }
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(p, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (packed(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& U, const Eigen::MatrixXd& G) {
  const Eigen::MatrixXd A = U.transpose() * G;
  return G - U * (0.5 * (A + A.transpose()));
}

Eigen::MatrixXd stiefel_step(const Eigen::MatrixXd& U, const Eigen::MatrixXd& G,
                             double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ContractViolation("stiefel_step: step must be positive and finite");
  }
  if (U.rows() != G.rows() || U.cols() != G.cols()) {
    throw DimensionMismatch("stiefel_step: gradient shape differs from point shape");
  }
  return orthonormalize(U - step * tangent_project(U, G));
}

double orthonormality_error(const Eigen::MatrixXd& U) {
  return (U.transpose() * U - Eigen::MatrixXd::Identity(U.cols(), U.cols())).norm();
}

Eigen::MatrixXd projector(const Eigen::MatrixXd& U) {
  if (U.cols() == 0) return Eigen::MatrixXd::Zero(U.rows(), U.rows());
  const Eigen::MatrixXd Q = orthonormalize(U);
  return Q * Q.transpose();
}

double projector_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows()) {
    throw DimensionMismatch("projector_distance: ambient dimensions differ");
  }
  return (projector(A) - projector(B)).norm();
}

}  // namespace sdr::linalg
