#include "sdr/synthetic.hpp"

#include <cctype>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"

namespace sdr {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for one purpose (eigenbasis, directions, samples).
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(purpose)));
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(rows, cols);
  // Fill row by row so a prefix of rows does not depend on the total count.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) G(i, j) = normal(rng);
  }
  return G;
}

}  // namespace

std::string_view to_string(SpectrumKind s) {
  return s == SpectrumKind::FAST_DECAY ? "FAST_DECAY" : "SLOW_DECAY";
}

std::string_view to_string(AlignmentKind a) {
  switch (a) {
    case AlignmentKind::WELL_ALIGNED:
      return "WELL_ALIGNED";
    case AlignmentKind::MISALIGNED:
      return "MISALIGNED";
    case AlignmentKind::PARTIAL:
      return "PARTIAL";
  }
  return "UNKNOWN";
}

SpectrumKind parse_spectrum(std::string_view s) {
  const std::string k = lower(s);
  if (k == "fast" || k == "fast_decay") return SpectrumKind::FAST_DECAY;
  if (k == "slow" || k == "slow_decay") return SpectrumKind::SLOW_DECAY;
  throw ConfigError("unknown spectrum '" + std::string(s) + "' (expected fast or slow)");
}

AlignmentKind parse_alignment(std::string_view s) {
  const std::string k = lower(s);
  if (k == "well" || k == "well_aligned") return AlignmentKind::WELL_ALIGNED;
  if (k == "mis" || k == "misaligned") return AlignmentKind::MISALIGNED;
  if (k == "partial") return AlignmentKind::PARTIAL;
  throw ConfigError("unknown alignment '" + std::string(s) + "' (expected well, mis or partial)");
}

Eigen::VectorXd SpectrumSpec::eigenvalues() const {
  if (P < 1) throw ContractViolation("SpectrumSpec: P must be positive");
  Eigen::VectorXd lambda(P);
  for (Eigen::Index i = 1; i <= P; ++i) {
    lambda(i - 1) = kind == SpectrumKind::FAST_DECAY
                        ? a * std::pow(rho, static_cast<double>(i))
                        : c * static_cast<double>(P - i + 1) / static_cast<double>(P);
  }
  return lambda;
}

TrialSpec TrialSpec::protocol(SpectrumKind s, AlignmentKind a, Eigen::Index n_train,
                              std::uint64_t seed) {
  TrialSpec t;
  t.spectrum.kind = s;
  t.alignment = a;
  t.n_train = n_train;
  t.noise_sigma = s == SpectrumKind::FAST_DECAY ? 0.5 : 2.5;
  t.seed = seed;
  return t;
}

void TrialSpec::validate() const {
  const Eigen::Index P = spectrum.P;
  if (spectrum.kind == SpectrumKind::FAST_DECAY && !(spectrum.rho > 0.0 && spectrum.rho < 1.0)) {
    throw ContractViolation("TrialSpec: decay ratio must lie in (0, 1)");
  }
  if (!(spectrum.a > 0.0) || !(spectrum.c > 0.0)) {
    throw ContractViolation("TrialSpec: spectrum scale must be positive");
  }
  if (alpha.size() != latent) throw ContractViolation("TrialSpec: alpha length != latent dim");
  const Eigen::Index needed = alignment == AlignmentKind::WELL_ALIGNED ? latent : 2 * latent;
  if (needed > P) throw ContractViolation("TrialSpec: alignment case needs more eigenvectors than P");
  if (n_train < 2 || n_test < 2) throw ContractViolation("TrialSpec: sample sizes must be >= 2");
  if (!(noise_sigma >= 0.0)) throw ContractViolation("TrialSpec: noise must be nonnegative");
  if (k_learn < 1 || k_learn > P) throw ContractViolation("TrialSpec: k_learn outside [1, P]");
  const auto n_val = static_cast<Eigen::Index>(std::llround(validation_fraction * static_cast<double>(n_train)));
  if (n_val < 2 || n_train - n_val < 2) throw ContractViolation("TrialSpec: validation split too small");
}

Eigen::MatrixXd random_orthogonal(Eigen::Index P, std::uint64_t seed) {
  if (P < 1) throw ContractViolation("random_orthogonal: P must be positive");
  auto rng = stream(seed, 1);
  const Eigen::MatrixXd G = gaussian_matrix(P, P, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  for (Eigen::Index j = 0; j < P; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

Eigen::MatrixXd alignment_basis(AlignmentKind a, const Eigen::MatrixXd& eigenvectors,
                                Eigen::Index latent, std::uint64_t seed) {
  const Eigen::Index P = eigenvectors.rows();
  switch (a) {
    case AlignmentKind::WELL_ALIGNED:
      return eigenvectors.leftCols(latent);
    case AlignmentKind::MISALIGNED:
      return eigenvectors.middleCols(latent, latent);
    case AlignmentKind::PARTIAL: {
      // Eigenvectors latent+1, latent+3, ... (1-based) plus free directions.
      const Eigen::Index fixed = latent / 2;
      const Eigen::Index free = latent - fixed;
      Eigen::MatrixXd M(P, latent);
      for (Eigen::Index i = 0; i < fixed; ++i) M.col(i) = eigenvectors.col(latent + 2 * i);
      auto rng = stream(seed, 2);
      M.rightCols(free) = gaussian_matrix(free, P, rng).transpose();
      // QR keeps the leading orthonormal columns and Gram-Schmidts the rest.
      return linalg::orthonormalize(M);
    }
  }
  throw ContractViolation("alignment_basis: unknown case");
}

Trial generate_trial(const TrialSpec& spec) {
  spec.validate();
  const Eigen::Index P = spec.spectrum.P;
  const Dataset placeholder(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(2));
  Trial t{Split{placeholder, placeholder, placeholder, placeholder}, {}, {}, {}, {}};
  t.eigenvalues = spec.spectrum.eigenvalues();
  t.eigenvectors = random_orthogonal(P, spec.seed);
  t.phi = alignment_basis(spec.alignment, t.eigenvectors, spec.latent, spec.seed);
  t.beta = t.phi * spec.alpha;

  // x = V diag(√λ) g, so row-wise X = G diag(√λ) Vᵀ.
  const Eigen::MatrixXd mix =
      t.eigenvalues.array().sqrt().matrix().asDiagonal() * t.eigenvectors.transpose();
  auto draw = [&](Eigen::Index n, std::uint64_t purpose) {
    auto rng = stream(spec.seed, purpose);
    Eigen::MatrixXd X = gaussian_matrix(n, P, rng) * mix;
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::VectorXd y = X * t.beta;
    for (Eigen::Index i = 0; i < n; ++i) y(i) += spec.noise_sigma * noise(rng);
    return Dataset(std::move(X), std::move(y));
  };
  Dataset train = draw(spec.n_train, 3);
  Dataset test = draw(spec.n_test, 4);
  const auto n_val = static_cast<Eigen::Index>(
      std::llround(spec.validation_fraction * static_cast<double>(spec.n_train)));
  const Eigen::Index n_fit = spec.n_train - n_val;
  t.split = Split{train, train.rows(0, n_fit), train.rows(n_fit, n_val), std::move(test)};
  return t;
}

std::string BenchSetting::label() const {
  return std::string(to_string(spectrum)) + "/" + std::string(to_string(alignment)) + "/N" +
         std::to_string(n_train);
}

std::vector<BenchSetting> protocol_settings() {
  std::vector<BenchSetting> out;
  for (auto s : {SpectrumKind::FAST_DECAY, SpectrumKind::SLOW_DECAY}) {
    for (auto a : {AlignmentKind::WELL_ALIGNED, AlignmentKind::MISALIGNED, AlignmentKind::PARTIAL}) {
      for (Eigen::Index n : {150, 1500}) out.push_back({s, a, n});
    }
  }
  return out;
}

const MethodSummary& SettingReport::method(std::string_view name) const {
  for (const auto& m : methods) {
    if (m.method == name) return m;
  }
  throw ContractViolation("SettingReport: no method named " + std::string(name));
}

const SweepCurve& SweepSetting::curve(std::string_view method) const {
  for (const auto& c : curves) {
    if (c.method == method) return c;
  }
  throw ContractViolation("SweepSetting: no curve for " + std::string(method));
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t setting, std::size_t trial) {
  return splitmix64(splitmix64(master) ^ splitmix64(0x5e771ULL + setting) ^
                    splitmix64(0x7a1a1ULL + (trial << 20)));
}

namespace {

TrialSpec trial_spec(const BenchConfig& cfg, const BenchSetting& s, std::uint64_t seed) {
  TrialSpec spec = TrialSpec::protocol(s.spectrum, s.alignment, s.n_train, seed);
  if (cfg.spectrum_override) {
    spec.spectrum = *cfg.spectrum_override;
    spec.spectrum.kind = s.spectrum;
  }
  if (cfg.noise_override) spec.noise_sigma = *cfg.noise_override;
  spec.k_learn = cfg.k_learn;
  spec.n_test = cfg.n_test;
  return spec;
}

void validate_config(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trial count must be at least 1");
  if (cfg.methods.empty()) throw ConfigError("method list is empty");
  if (cfg.settings.empty()) throw ConfigError("no benchmark settings selected");
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& config) {
  validate_config(config);
  BenchReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  report.k_learn = config.k_learn;
  report.notes = {
      "validation split: last 20% of each training sample, used only to tune gamma",
      "gamma values are dimensionless (see raw_gamma)",
      "MSE reported in original response units",
  };
  const auto n_trials = static_cast<std::size_t>(config.trials);
  for (std::size_t si = 0; si < config.settings.size(); ++si) {
    const BenchSetting& setting = config.settings[si];
    // records[trial][method]
    std::vector<std::vector<TrialRecord>> records(n_trials);
    detail::parallel_for(n_trials, config.threads, [&](std::size_t ti) {
      const std::uint64_t seed = trial_seed(config.seed, si, ti);
      const Trial trial = generate_trial(trial_spec(config, setting, seed));
      auto& row = records[ti];
      row.resize(config.methods.size());
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        TrialRecord& rec = row[mi];
        rec.seed = seed;
        try {
          const Evaluation ev =
              evaluate(config.methods[mi], trial.split, config.k_learn, config.method_config);
          rec.train_mse = ev.train_mse;
          rec.test_mse = ev.test_mse;
          rec.gamma = ev.gamma;
          rec.M = ev.M;
          rec.flags = ev.flags;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
      }
    });

    SettingReport sr{setting, {}};
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      MethodSummary ms;
      ms.method = config.methods[mi].name();
      double train_sum = 0.0;
      double test_sum = 0.0;
      int ok = 0;
      for (std::size_t ti = 0; ti < n_trials; ++ti) {
        const TrialRecord& rec = records[ti][mi];
        ms.trials.push_back(rec);
        if (rec.error) {
          ++ms.failures;
          continue;
        }
        train_sum += rec.train_mse;
        test_sum += rec.test_mse;
        ++ok;
      }
      if (ok > 0) {
        ms.mean_train_mse = train_sum / ok;
        ms.mean_test_mse = test_sum / ok;
      } else {
        ms.mean_train_mse = std::nan("");
        ms.mean_test_mse = std::nan("");
      }
      sr.methods.push_back(std::move(ms));
    }
    report.settings.push_back(std::move(sr));
  }
  return report;
}

SweepReport gamma_sweep(const BenchConfig& config, const std::vector<Gamma>& grid) {
  validate_config(config);
  if (grid.empty()) throw ConfigError("gamma grid is empty");
  std::vector<MethodSpec> swept;
  for (const auto& m : config.methods) {
    if (m.tunes_gamma()) swept.push_back(m);
  }
  if (swept.empty()) {
    swept = {MethodSpec::reducer(MethodTag::LSPCA), MethodSpec::reducer(MethodTag::BARSHAN_EXT),
             MethodSpec::reducer(MethodTag::PLS_EXT)};
  }
  SweepReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  report.grid = grid;
  const auto n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t G = grid.size();

  for (std::size_t si = 0; si < config.settings.size(); ++si) {
    const BenchSetting& setting = config.settings[si];
    // mse[trial][method][gamma]; NaN marks a failed fit.
    std::vector<std::vector<std::vector<double>>> mse(n_trials);
    std::vector<double> pca(n_trials, std::nan(""));
    std::vector<double> ols(n_trials, std::nan(""));
    detail::parallel_for(n_trials, config.threads, [&](std::size_t ti) {
      const Trial trial = generate_trial(trial_spec(config, setting, trial_seed(config.seed, si, ti)));
      try {
        pca[ti] = evaluate(MethodSpec::reducer(MethodTag::PCA), trial.split, config.k_learn,
                           config.method_config).test_mse;
        ols[ti] = evaluate(MethodSpec::ols(), trial.split, config.k_learn, config.method_config).test_mse;
      } catch (const std::exception&) {
      }
      mse[ti].assign(swept.size(), std::vector<double>(G, std::nan("")));
      for (std::size_t mi = 0; mi < swept.size(); ++mi) {
        for (std::size_t gi = 0; gi < G; ++gi) {
          try {
            mse[ti][mi][gi] = evaluate(swept[mi], trial.split, config.k_learn,
                                       config.method_config, grid[gi]).test_mse;
          } catch (const std::exception&) {
          }
        }
      }
    });

    auto mean_of = [&](const std::vector<double>& v) {
      double sum = 0.0;
      int n = 0;
      for (double x : v) {
        if (std::isnan(x)) continue;
        sum += x;
        ++n;
      }
      return n > 0 ? sum / n : std::nan("");
    };
    SweepSetting ss{setting, {}, mean_of(pca), mean_of(ols)};
    for (std::size_t mi = 0; mi < swept.size(); ++mi) {
      SweepCurve curve;
      curve.method = swept[mi].name();
      for (std::size_t gi = 0; gi < G; ++gi) {
        std::vector<double> column(n_trials);
        int failures = 0;
        for (std::size_t ti = 0; ti < n_trials; ++ti) {
          column[ti] = mse[ti][mi][gi];
          if (std::isnan(column[ti])) ++failures;
        }
        curve.mean_test_mse.push_back(mean_of(column));
        curve.failures.push_back(failures);
      }
      ss.curves.push_back(std::move(curve));
    }
    report.settings.push_back(std::move(ss));
  }
  return report;
}

}  // namespace sdr
