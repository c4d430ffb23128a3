#include "sdr/pipeline.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "sdr/errors.hpp"
#include "sdr/regression.hpp"

namespace sdr {

MethodSpec MethodSpec::parse(std::string_view name) {
  std::string key(name);
  for (auto& c : key) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (key == "OLS") return ols();
  return reducer(parse_method(name));
}

MethodTag MethodSpec::tag() const {
  if (!tag_) throw ContractViolation("MethodSpec: OLS baseline has no reducer tag");
  return *tag_;
}

std::string MethodSpec::name() const {
  return tag_ ? std::string(to_string(*tag_)) : std::string("OLS");
}

bool MethodSpec::tunes_gamma() const noexcept {
  return tag_ && (*tag_ == MethodTag::PLS_EXT || *tag_ == MethodTag::BARSHAN_EXT ||
                  *tag_ == MethodTag::LSPCA);
}

std::vector<MethodSpec> default_methods() {
  return {MethodSpec::ols(),
          MethodSpec::reducer(MethodTag::PCA),
          MethodSpec::reducer(MethodTag::BAIR),
          MethodSpec::reducer(MethodTag::PV),
          MethodSpec::reducer(MethodTag::PCPS),
          MethodSpec::reducer(MethodTag::BARSHAN_EXT),
          MethodSpec::reducer(MethodTag::PLS_EXT),
          MethodSpec::reducer(MethodTag::LSPCA),
          MethodSpec::reducer(MethodTag::SPPCA)};
}

std::vector<Gamma> log_gamma_grid() {
  std::vector<Gamma> grid;
  constexpr int kPoints = 15;
  for (int i = 0; i < kPoints; ++i) {
    const double exponent = -4.0 + 8.0 * static_cast<double>(i) / (kPoints - 1);
    grid.push_back(Gamma::finite(std::pow(10.0, exponent)));
  }
  return grid;
}

std::vector<Gamma> default_tuning_grid() {
  std::vector<Gamma> grid{Gamma::finite(0.0)};
  for (const auto& g : log_gamma_grid()) grid.push_back(g);
  grid.push_back(Gamma::infinity());
  return grid;
}

Gamma raw_gamma(MethodTag method, const Gamma& dimensionless, const Dataset& centered) {
  if (dimensionless.is_infinite()) return dimensionless;
  const double yy = centered.y().squaredNorm();
  double scale = yy;
  if (method == MethodTag::LSPCA) {
    const double xx = centered.X().squaredNorm();
    scale = xx > 0.0 ? yy / xx : 0.0;
  }
  return Gamma::finite(dimensionless.value() * scale);
}

FittedReducer fit_reducer(MethodTag method, const Dataset& centered, Eigen::Index K,
                          const std::optional<Gamma>& dimensionless_gamma,
                          const MethodConfig& cfg) {
  const auto gamma = [&] {
    if (!dimensionless_gamma) {
      throw ContractViolation("fit_reducer: " + std::string(to_string(method)) +
                              " needs a gamma value");
    }
    return raw_gamma(method, *dimensionless_gamma, centered);
  };
  switch (method) {
    case MethodTag::PCA:
      return fit_pca(centered, K);
    case MethodTag::BAIR:
      return fit_bair(centered, K, cfg.score, training_mse_evaluator(centered));
    case MethodTag::PV:
      return fit_pv(centered, K, cfg.score, cfg.pv);
    case MethodTag::PCPS:
      return fit_pcps(centered, K, cfg.score);
    case MethodTag::PLS:
      return fit_pls(centered, K);
    case MethodTag::PLS_EXT:
      return fit_pls_extended(centered, K, gamma());
    case MethodTag::BARSHAN:
      return fit_barshan(centered, K);
    case MethodTag::BARSHAN_EXT:
      return fit_barshan_extended(centered, K, gamma());
    case MethodTag::LSPCA:
      return fit_lspca(centered, K, gamma(), cfg.lspca).reducer;
    case MethodTag::SPPCA:
      return fit_sppca(centered, K, cfg.sppca).reducer;
  }
  throw ContractViolation("fit_reducer: unknown method");
}

namespace {

struct Fitted {
  FittedReducer reducer;
  RegressionModel model;
};

Fitted fit_with_regression(MethodTag method, const Dataset& raw, const CenteringTransform& t,
                           Eigen::Index K, const std::optional<Gamma>& gamma,
                           const MethodConfig& cfg) {
  const Dataset centered = t.apply(raw);
  Fitted f{fit_reducer(method, centered, K, gamma, cfg), {}};
  f.model = ols_fit(reduce(f.reducer, centered.X()), raw.y());
  return f;
}

double predict_mse(const Fitted& f, const CenteringTransform& t, const Dataset& raw) {
  const Eigen::MatrixXd Z = reduce(f.reducer, t.apply(raw.X()));
  return mse(f.model.predict(Z), raw.y());
}

Gamma tune_gamma(MethodTag method, const Split& split, Eigen::Index K, const MethodConfig& cfg) {
  if (cfg.gamma_grid.empty()) throw ConfigError("empty gamma grid");
  const CenteringTransform t = fit_centering(split.tune_train, cfg.unit_scale);
  std::optional<Gamma> best;
  double best_mse = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (const Gamma& g : cfg.gamma_grid) {
    try {
      const Fitted f = fit_with_regression(method, split.tune_train, t, K, g, cfg);
      const double value = predict_mse(f, t, split.validation);
      if (value < best_mse) {
        best_mse = value;
        best = g;
      }
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (!best) throw Error("gamma tuning failed for every grid value: " + last_error);
  return *best;
}

}  // namespace

Evaluation evaluate(const MethodSpec& method, const Split& split, Eigen::Index K,
                    const MethodConfig& cfg, const std::optional<Gamma>& fixed_gamma) {
  const CenteringTransform t = fit_centering(split.train, cfg.unit_scale);
  Evaluation ev;
  if (method.is_ols()) {
    const Eigen::MatrixXd Xtr = t.apply(split.train.X());
    const RegressionModel model = ols_fit(Xtr, split.train.y());
    ev.train_mse = mse(model.predict(Xtr), split.train.y());
    ev.test_mse = mse(model.predict(t.apply(split.test.X())), split.test.y());
    return ev;
  }
  std::optional<Gamma> gamma;
  if (method.tunes_gamma()) {
    gamma = fixed_gamma ? *fixed_gamma : tune_gamma(method.tag(), split, K, cfg);
  }
  const Fitted f = fit_with_regression(method.tag(), split.train, t, K, gamma, cfg);
  ev.train_mse = predict_mse(f, t, split.train);
  ev.test_mse = predict_mse(f, t, split.test);
  ev.gamma = gamma;
  ev.M = f.reducer.hyper.M;
  ev.flags = f.reducer.flags;
  return ev;
}

}  // namespace sdr
