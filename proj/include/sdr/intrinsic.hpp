#pragma once

// Methods whose subspace objective embeds the response: PLS and its
// reconstruction-balanced extension, the linear-kernel Barshan method and its
// extension, least-squares PCA and supervised probabilistic PCA.

#include <Eigen/Dense>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/reducer.hpp"

namespace sdr {

/// Directions and deflated scores of the (extended) PLS iteration.
struct PlsPath {
  Eigen::MatrixXd U;       // P x K, unit-norm directions
  Eigen::MatrixXd scores;  // N x K, z^k = X^k u^k before each deflation
};

/// Runs K deflation steps. Gamma 0 is plain PLS (u = Xᵀy/‖Xᵀy‖); a finite
/// gamma takes the top eigenvector of Xᵀ(yyᵀ + γI)X; infinity uses XᵀX.
/// Throws DegenerateDirectionError when the direction vanishes.
PlsPath pls_path(const Dataset& centered, Eigen::Index K, const Gamma& gamma);

FittedReducer fit_pls(const Dataset& centered, Eigen::Index K);
FittedReducer fit_pls_extended(const Dataset& centered, Eigen::Index K, const Gamma& gamma);

/// Top-K eigenvectors of XᵀyyᵀX. The matrix has rank one, so for K > 1 the
/// trailing directions are completed deterministically (see
/// fit_barshan_extended) and the reducer is flagged "basis_completed".
FittedReducer fit_barshan(const Dataset& centered, Eigen::Index K);

/// Top-K eigenvectors of Xᵀ(yyᵀ + γI)X; infinity returns the PCA basis.
///
/// When the K-th and (K+1)-th eigenvalues tie, the leading directions above
/// the tied cluster are kept and the rest are drawn from the cluster's
/// eigenspace: first by the variance of X inside that eigenspace (the γ→0⁺
/// limit for γ = 0) and, if that ties too, by the PCA basis projected into it.
FittedReducer fit_barshan_extended(const Dataset& centered, Eigen::Index K, const Gamma& gamma);

struct LspcaOptions {
  int max_iters = 500;
  double tol = 1e-9;  // relative objective decrease that counts as converged
};

struct LspcaSolution {
  Eigen::MatrixXd U;               // on the Stiefel manifold
  Eigen::VectorXd beta;            // least-squares coefficients of y on XU
  std::vector<double> objective;   // one entry per accepted iterate
  bool converged = false;
  int iterations = 0;
};

struct LspcaFit {
  FittedReducer reducer;
  LspcaSolution solution;
};

/// ‖y − XUβ‖² + γ‖X − XUUᵀ‖²_F for orthonormal U.
double lspca_objective(const Dataset& centered, const Eigen::MatrixXd& U,
                       const Eigen::VectorXd& beta, double gamma);

/// Alternating minimization: closed-form β for the current U, then one
/// projected-gradient step on the Stiefel manifold with QR retraction and
/// step halving until the objective decreases. Starts at the PCA basis.
/// Infinity short-circuits to PCA. A run that hits max_iters keeps its last
/// iterate and is flagged "not_converged".
LspcaFit fit_lspca(const Dataset& centered, Eigen::Index K, const Gamma& gamma,
                   const LspcaOptions& opts = {});

struct SppcaOptions {
  int max_iters = 1000;
  double tol = 1e-8;  // relative log-likelihood change that stops EM
};

struct SppcaFit {
  FittedReducer reducer;
  std::vector<double> log_likelihood;  // initial value, then one per EM step
  bool converged = false;
  bool variance_floored = false;
};

/// Log-likelihood of centered (X, y) under x = Uz + εx, y = vᵀz + εy.
double sppca_log_likelihood(const Dataset& centered, const SppcaParams& params);

/// Maximum-likelihood SPPCA by EM. Throws Error if the log-likelihood drops
/// by more than 1e-8 (relative) between steps.
SppcaFit fit_sppca(const Dataset& centered, Eigen::Index K, const SppcaOptions& opts = {});

/// y* = vᵀ(UᵀU + σx²I)⁻¹Uᵀx* + y_mean for each centered row x*.
Eigen::VectorXd predict_sppca(const FittedReducer& r, const Eigen::MatrixXd& X_centered,
                              double y_mean);

}  // namespace sdr
