#pragma once

// Brute-force and closed-form checks at small scale (P ≤ 5), plus the seeded
// fixtures they share with the test suites.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdr/data.hpp"

namespace sdr {

/// Centered Gaussian design with y = Xβ + noise·ε for a random β.
Dataset random_centered_dataset(Eigen::Index N, Eigen::Index P, double noise, std::uint64_t seed);

/// Centered design with XᵀX = I exactly (orthonormal columns) and a centered
/// noisy linear response.
Dataset whitened_dataset(Eigen::Index N, Eigen::Index P, std::uint64_t seed);

/// Samples from x = Uz + σ e_x, y = vᵀz + σ e_y with z ~ N(0, I_K), centered.
/// The same seed produces the same U and v for any N; `draw` selects an
/// independent sample (0 for training, 1 for testing, ...).
Dataset sppca_model_dataset(Eigen::Index N, Eigen::Index P, Eigen::Index K, double sigma,
                            std::uint64_t seed, std::uint64_t draw);

/// max uᵀAu over unit vectors on a 1° (θ, φ) grid of the 2-sphere.
double sphere_grid_max(const Eigen::Matrix3d& A);

struct OracleResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every oracle. With `inject_failure` the eigen-reconstruction oracle
/// is fed a perturbed decomposition and must fail.
std::vector<OracleResult> run_oracles(std::uint64_t seed, bool inject_failure = false);

}  // namespace sdr
