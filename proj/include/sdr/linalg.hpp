#pragma once

#include <Eigen/Dense>

namespace sdr::linalg {

/// Leading eigenpairs of a symmetric matrix, largest eigenvalue first.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // P x k, orthonormal columns
};

/// Exactly symmetric XᵀX. Only the lower triangle is accumulated, then mirrored.
Eigen::MatrixXd gram(const Eigen::MatrixXd& X);

bool is_symmetric(const Eigen::MatrixXd& S);

/// Top-k eigenpairs of a symmetric matrix.
///
/// Eigenvalues come back in descending order. Each eigenvector is flipped so
/// that its entry of largest magnitude is positive (lowest index wins among
/// magnitudes that agree to 1e-12 relative). Under exactly repeated
/// eigenvalues the individual vectors are solver-order dependent; only the
/// spanned subspace is meaningful.
///
/// Throws ContractViolation for non-symmetric or non-finite input or k out of
/// range, IterationLimitError if the QR iteration does not converge.
EigenPairs sym_eig_topk(const Eigen::MatrixXd& S, Eigen::Index k);

/// Sign convention used by every basis in the library. Idempotent.
void fix_signs(Eigen::MatrixXd& V);
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

/// Thin-QR Q factor with nonnegative diag(R). Throws RankError naming the
/// first (0-based) column that is linearly dependent on its predecessors.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& M);

/// One projected-gradient step on the Stiefel manifold followed by a QR
/// retraction: orthonormalize(U - step * (G - U sym(UᵀG))).
Eigen::MatrixXd stiefel_step(const Eigen::MatrixXd& U, const Eigen::MatrixXd& G,
                             double step);

/// Riemannian (tangent-space) projection of an ambient gradient at U.
Eigen::MatrixXd tangent_project(const Eigen::MatrixXd& U, const Eigen::MatrixXd& G);

/// ‖UᵀU − I‖_F
double orthonormality_error(const Eigen::MatrixXd& U);

/// Orthogonal projector onto span(U); U need not be orthonormal but must
/// have full column rank.
Eigen::MatrixXd projector(const Eigen::MatrixXd& U);

/// ‖P_A − P_B‖_F, the rotation- and sign-invariant subspace distance.
double projector_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace sdr::linalg
