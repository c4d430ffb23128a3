#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sdr {

enum class MethodTag {
  PCA,
  BAIR,
  PV,
  PCPS,
  PLS,
  PLS_EXT,
  BARSHAN,
  BARSHAN_EXT,
  LSPCA,
  SPPCA,
};

std::string_view to_string(MethodTag m);
/// Case-insensitive; throws ConfigError for unknown names.
MethodTag parse_method(std::string_view name);

enum class ScoreKind { COVARIANCE, PEARSON };

std::string_view to_string(ScoreKind s);
ScoreKind parse_score(std::string_view name);

/// Balance weight between the supervised and reconstruction objectives.
/// Either a finite nonnegative value or +infinity ("behave as PCA").
class Gamma {
 public:
  static Gamma finite(double value);
  static Gamma infinity() { return Gamma(true, 0.0); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; throws ContractViolation when infinite.
  double value() const;

  friend bool operator==(const Gamma&, const Gamma&) = default;

 private:
  Gamma(bool infinite, double value) : infinite_(infinite), value_(value) {}
  bool infinite_;
  double value_;
};

std::string to_string(const Gamma& g);

struct BasisState {
  Eigen::MatrixXd U;  // P x K
};

/// One select-project-deflate iteration of the PV method.
struct PvStep {
  std::vector<Eigen::Index> variables;  // selected columns, in rank order
  Eigen::VectorXd direction;            // first PC of the selected submatrix
  Eigen::VectorXd deflation;            // P-vector b
};

struct PvState {
  std::vector<PvStep> steps;
};

struct SppcaParams {
  Eigen::MatrixXd U;  // P x K loadings, not orthogonal in general
  Eigen::VectorXd v;  // K response loadings
  double sigma_x = 1.0;
  double sigma_y = 1.0;
};

struct Hyperparameters {
  std::optional<Eigen::Index> M;
  std::optional<Gamma> gamma;
  std::optional<ScoreKind> score;
};

/// Fitted state of any reducer. Exactly one state alternative is populated:
/// PvState for PV, SppcaParams for SPPCA and BasisState for everything else.
struct FittedReducer {
  MethodTag method = MethodTag::PCA;
  Eigen::Index K = 0;
  std::variant<BasisState, PvState, SppcaParams> state;
  Hyperparameters hyper;
  std::vector<std::string> flags;  // e.g. "basis_completed", "not_converged"

  /// Throws ContractViolation when the invariants do not hold.
  void validate(Eigen::Index P) const;
  /// Number of input variables the reducer expects.
  Eigen::Index variables() const;
  bool has_flag(std::string_view f) const;
};

FittedReducer make_basis_reducer(MethodTag method, Eigen::MatrixXd U);

/// Transform centered rows into the K-dimensional feature space.
Eigen::MatrixXd reduce(const FittedReducer& r, const Eigen::MatrixXd& X);

nlohmann::json to_json(const FittedReducer& r);
FittedReducer reducer_from_json(const nlohmann::json& j);

}  // namespace sdr
