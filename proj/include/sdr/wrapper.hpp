#pragma once

// Classic PCA and the supervised methods that wrap it: variable
// pre-selection (Bair), iterative selection with deflation (PV) and
// principal-component post-selection (PCPS).

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/reducer.hpp"

namespace sdr {

/// Score of one centered variable against the centered response.
/// COVARIANCE: |<x, y>|.  PEARSON: |<x, y>| / (‖x‖ ‖y‖), 0 when either norm is 0.
double score(const Eigen::VectorXd& x, const Eigen::VectorXd& y, ScoreKind kind);

struct VariableScores {
  Eigen::VectorXd scores;
  std::vector<Eigen::Index> ranking;  // descending score, ties by lower index
};

VariableScores score_variables(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               ScoreKind kind);

/// Top-K principal directions of centered X (eigenvectors of XᵀX).
Eigen::MatrixXd pca_basis(const Eigen::MatrixXd& X, Eigen::Index K);

FittedReducer fit_pca(const Dataset& centered, Eigen::Index K);

/// Quality of a candidate P x K basis; smaller is better. Used by Bair to pick M.
using BasisEvaluator = std::function<double(const Eigen::MatrixXd& basis)>;

/// Training MSE of OLS on the features X·U.
BasisEvaluator training_mse_evaluator(const Dataset& centered);

struct BairScan {
  FittedReducer reducer;
  std::vector<double> mse_by_m;  // entry i is the evaluator result for M = K + i
};

BairScan fit_bair_scan(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                       const BasisEvaluator& evaluator);
FittedReducer fit_bair(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                       const BasisEvaluator& evaluator);

struct PvOptions {
  Eigen::Index max_m = 0;  // cap on the per-iteration subset scan; 0 means P
};

FittedReducer fit_pv(const Dataset& centered, Eigen::Index K, ScoreKind kind,
                     const PvOptions& opts = {});

FittedReducer fit_pcps(const Dataset& centered, Eigen::Index K, ScoreKind kind);

}  // namespace sdr
