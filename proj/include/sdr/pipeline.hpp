#pragma once

// Fit-reduce-regress evaluation shared by the simulation and real-data
// protocols, including validation-set tuning of the balance weight γ.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/intrinsic.hpp"
#include "sdr/reducer.hpp"
#include "sdr/wrapper.hpp"

namespace sdr {

/// A row of the comparison: one reducer followed by OLS, or OLS on the raw
/// variables (no tag).
class MethodSpec {
 public:
  static MethodSpec ols() { return MethodSpec(std::nullopt); }
  static MethodSpec reducer(MethodTag tag) { return MethodSpec(tag); }
  /// "ols" or any reducer name, case-insensitive.
  static MethodSpec parse(std::string_view name);

  bool is_ols() const noexcept { return !tag_.has_value(); }
  MethodTag tag() const;
  std::string name() const;
  bool tunes_gamma() const noexcept;

  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;

 private:
  explicit MethodSpec(std::optional<MethodTag> tag) : tag_(tag) {}
  std::optional<MethodTag> tag_;
};

/// OLS, PCA, Bair, PV, PCPS, extended Barshan, extended PLS, LSPCA, SPPCA.
std::vector<MethodSpec> default_methods();

/// 15 log-spaced values in [1e-4, 1e4].
std::vector<Gamma> log_gamma_grid();
/// log_gamma_grid() plus 0 and infinity, in ascending order.
std::vector<Gamma> default_tuning_grid();

/// γ values in the harness are dimensionless; this maps one to the raw weight
/// of the method's objective on the given centered data. Extended PLS and
/// Barshan scale by ‖y‖², LSPCA by ‖y‖²/‖X‖²_F, so that g = 1 weighs the
/// supervised and reconstruction terms comparably for any data scaling.
Gamma raw_gamma(MethodTag method, const Gamma& dimensionless, const Dataset& centered);

struct MethodConfig {
  ScoreKind score = ScoreKind::PEARSON;
  std::vector<Gamma> gamma_grid = default_tuning_grid();
  bool unit_scale = false;
  LspcaOptions lspca{.max_iters = 2000, .tol = 1e-9};
  SppcaOptions sppca{};
  PvOptions pv{};
};

/// Data for one evaluation. `tune_train`/`validation` partition `train` and
/// are only used to pick γ.
struct Split {
  Dataset train;
  Dataset tune_train;
  Dataset validation;
  Dataset test;
};

struct Evaluation {
  double train_mse = 0.0;
  double test_mse = 0.0;
  std::optional<Gamma> gamma;  // dimensionless value that was used
  std::optional<Eigen::Index> M;
  std::vector<std::string> flags;
};

/// Fits `method` at dimension K on centered `train` (a reducer with fixed γ
/// when `gamma` is given), then OLS on the reduced features. Returns the
/// fitted reducer for callers that want to inspect it.
FittedReducer fit_reducer(MethodTag method, const Dataset& centered, Eigen::Index K,
                          const std::optional<Gamma>& dimensionless_gamma,
                          const MethodConfig& cfg);

/// Train/test MSE in original response units. γ-bearing methods pick γ by
/// validation MSE over cfg.gamma_grid unless `fixed_gamma` is supplied.
Evaluation evaluate(const MethodSpec& method, const Split& split, Eigen::Index K,
                    const MethodConfig& cfg,
                    const std::optional<Gamma>& fixed_gamma = std::nullopt);

}  // namespace sdr
