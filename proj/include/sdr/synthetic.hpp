#pragma once

// Simulation protocol: Gaussian designs with a prescribed covariance
// spectrum, a response confined to a 10-dimensional coefficient subspace
// whose alignment with the top principal directions is controlled, repeated
// trials and paired γ sweeps.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdr/data.hpp"
#include "sdr/pipeline.hpp"

namespace sdr {

enum class SpectrumKind { FAST_DECAY, SLOW_DECAY };
enum class AlignmentKind { WELL_ALIGNED, MISALIGNED, PARTIAL };

std::string_view to_string(SpectrumKind s);
std::string_view to_string(AlignmentKind a);
/// Accepts "fast"/"slow" and "well"/"mis"/"partial" as well as the enum names.
SpectrumKind parse_spectrum(std::string_view s);
AlignmentKind parse_alignment(std::string_view s);

/// FAST_DECAY: λ_i = a ρ^i.  SLOW_DECAY: λ_i = c (P − i + 1) / P.  i = 1..P.
struct SpectrumSpec {
  SpectrumKind kind = SpectrumKind::FAST_DECAY;
  Eigen::Index P = 100;
  double a = 25.0;
  double rho = 0.85;
  double c = 25.0;

  Eigen::VectorXd eigenvalues() const;
};

struct TrialSpec {
  SpectrumSpec spectrum;
  AlignmentKind alignment = AlignmentKind::WELL_ALIGNED;
  Eigen::Index n_train = 150;
  Eigen::Index n_test = 10000;
  Eigen::Index latent = 10;
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(10);
  double noise_sigma = 0.5;
  Eigen::Index k_learn = 15;
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;

  /// Protocol defaults: P = 100, noise 0.5 (fast) or 2.5 (slow).
  static TrialSpec protocol(SpectrumKind s, AlignmentKind a, Eigen::Index n_train,
                            std::uint64_t seed);
  void validate() const;
};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// signs of diag(R) absorbed). Same seed, same matrix.
Eigen::MatrixXd random_orthogonal(Eigen::Index P, std::uint64_t seed);

/// Coefficient subspace for an alignment case, from eigenvectors sorted by
/// descending eigenvalue. PARTIAL draws its 5 free directions from `seed`.
Eigen::MatrixXd alignment_basis(AlignmentKind a, const Eigen::MatrixXd& eigenvectors,
                                Eigen::Index latent, std::uint64_t seed);

struct Trial {
  Split split;
  Eigen::MatrixXd eigenvectors;  // V, columns by descending eigenvalue
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd phi;           // P x latent
  Eigen::VectorXd beta;          // phi * alpha
};

/// Draws X ~ N(0, V diag(λ) Vᵀ), y = Xβ + ε. The last
/// round(validation_fraction · n_train) training rows form the validation
/// split; the rest form tune_train.
Trial generate_trial(const TrialSpec& spec);

struct BenchSetting {
  SpectrumKind spectrum = SpectrumKind::FAST_DECAY;
  AlignmentKind alignment = AlignmentKind::WELL_ALIGNED;
  Eigen::Index n_train = 150;

  std::string label() const;
};

/// All 12 combinations of the protocol, in table order.
std::vector<BenchSetting> protocol_settings();

struct BenchConfig {
  std::vector<BenchSetting> settings;
  std::vector<MethodSpec> methods = default_methods();
  int trials = 100;
  std::uint64_t seed = 0;
  MethodConfig method_config;
  Eigen::Index k_learn = 15;
  Eigen::Index n_test = 10000;
  int threads = 1;
  std::optional<SpectrumSpec> spectrum_override;  // decay parameters; kind comes from setting
  std::optional<double> noise_override;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  std::optional<Gamma> gamma;
  std::optional<Eigen::Index> M;
  std::vector<std::string> flags;
  std::optional<std::string> error;
};

struct MethodSummary {
  std::string method;
  std::vector<TrialRecord> trials;
  double mean_train_mse = 0.0;  // over successful trials
  double mean_test_mse = 0.0;
  int failures = 0;
};

struct SettingReport {
  BenchSetting setting;
  std::vector<MethodSummary> methods;

  const MethodSummary& method(std::string_view name) const;
};

struct BenchReport {
  int trials = 0;
  std::uint64_t seed = 0;
  Eigen::Index k_learn = 15;
  std::vector<SettingReport> settings;
  std::vector<std::string> notes;
};

/// Seed of trial `trial` in setting `setting` derived from the master seed.
std::uint64_t trial_seed(std::uint64_t master, std::size_t setting, std::size_t trial);

BenchReport run_benchmark(const BenchConfig& config);

struct SweepCurve {
  std::string method;
  std::vector<double> mean_test_mse;  // one per grid value
  std::vector<int> failures;
};

struct SweepSetting {
  BenchSetting setting;
  std::vector<SweepCurve> curves;
  double pca_reference = 0.0;
  double ols_reference = 0.0;

  const SweepCurve& curve(std::string_view method) const;
};

struct SweepReport {
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<Gamma> grid;
  std::vector<SweepSetting> settings;
};

/// Test MSE of LSPCA, extended Barshan and extended PLS at every grid value
/// with identical trial data across the grid, plus PCA and OLS references.
SweepReport gamma_sweep(const BenchConfig& config, const std::vector<Gamma>& grid);

}  // namespace sdr
