#include "sdr/reducer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"

namespace sdr {

namespace {

constexpr std::array<std::pair<MethodTag, std::string_view>, 10> kMethodNames{{
    {MethodTag::PCA, "PCA"},
    {MethodTag::BAIR, "BAIR"},
    {MethodTag::PV, "PV"},
    {MethodTag::PCPS, "PCPS"},
    {MethodTag::PLS, "PLS"},
    {MethodTag::PLS_EXT, "PLS_EXT"},
    {MethodTag::BARSHAN, "BARSHAN"},
    {MethodTag::BARSHAN_EXT, "BARSHAN_EXT"},
    {MethodTag::LSPCA, "LSPCA"},
    {MethodTag::SPPCA, "SPPCA"},
}};

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  return out;
}

constexpr double kOrthoTol = 1e-8;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index cols_if_empty) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : cols_if_empty;
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ContractViolation("reducer JSON: ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return M;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json gamma_to_json(const Gamma& g) {
  if (g.is_infinite()) return "INFINITY";
  return g.value();
}

Gamma gamma_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "INFINITY") throw ContractViolation("reducer JSON: bad gamma");
    return Gamma::infinity();
  }
  return Gamma::finite(j.get<double>());
}

Eigen::MatrixXd pv_reduce(const PvState& s, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd work = X;
  Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(s.steps.size()));
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    const PvStep& step = s.steps[k];
    Eigen::VectorXd z = Eigen::VectorXd::Zero(X.rows());
    for (std::size_t i = 0; i < step.variables.size(); ++i) {
      z += step.direction(static_cast<Eigen::Index>(i)) * work.col(step.variables[i]);
    }
    work.noalias() -= z * step.deflation.transpose();
    Z.col(static_cast<Eigen::Index>(k)) = z;
  }
  return Z;
}

}  // namespace

std::string_view to_string(MethodTag m) {
  for (const auto& [tag, name] : kMethodNames) {
    if (tag == m) return name;
  }
  return "UNKNOWN";
}

MethodTag parse_method(std::string_view name) {
  const std::string key = upper(name);
  for (const auto& [tag, label] : kMethodNames) {
    if (key == label) return tag;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(ScoreKind s) {
  return s == ScoreKind::COVARIANCE ? "COVARIANCE" : "PEARSON";
}

ScoreKind parse_score(std::string_view name) {
  const std::string key = upper(name);
  if (key == "COVARIANCE" || key == "COV") return ScoreKind::COVARIANCE;
  if (key == "PEARSON") return ScoreKind::PEARSON;
  throw ConfigError("unknown score function '" + std::string(name) + "'");
}

Gamma Gamma::finite(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ContractViolation("gamma must be finite and nonnegative");
  }
  return Gamma(false, value);
}

double Gamma::value() const {
  if (infinite_) throw ContractViolation("gamma is infinite");
  return value_;
}

std::string to_string(const Gamma& g) {
  if (g.is_infinite()) return "inf";
  nlohmann::json j = g.value();
  return j.dump();
}

FittedReducer make_basis_reducer(MethodTag method, Eigen::MatrixXd U) {
  FittedReducer r;
  r.method = method;
  r.K = U.cols();
  r.state = BasisState{std::move(U)};
  r.validate(r.variables());
  return r;
}

Eigen::Index FittedReducer::variables() const {
  if (const auto* b = std::get_if<BasisState>(&state)) return b->U.rows();
  if (const auto* s = std::get_if<SppcaParams>(&state)) return s->U.rows();
  const auto& pv = std::get<PvState>(state);
  return pv.steps.empty() ? 0 : pv.steps.front().deflation.size();
}

bool FittedReducer::has_flag(std::string_view f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

void FittedReducer::validate(Eigen::Index P) const {
  if (K < 1 || K > P) throw ContractViolation("FittedReducer: K outside [1, P]");
  switch (method) {
    case MethodTag::PV: {
      const auto* pv = std::get_if<PvState>(&state);
      if (pv == nullptr) throw ContractViolation("FittedReducer: PV tag without PV state");
      if (static_cast<Eigen::Index>(pv->steps.size()) != K) {
        throw ContractViolation("FittedReducer: PV state has wrong number of steps");
      }
      for (const auto& s : pv->steps) {
        if (s.deflation.size() != P ||
            static_cast<Eigen::Index>(s.variables.size()) != s.direction.size()) {
          throw ContractViolation("FittedReducer: malformed PV step");
        }
        for (Eigen::Index v : s.variables) {
          if (v < 0 || v >= P) throw ContractViolation("FittedReducer: PV variable out of range");
        }
      }
      return;
    }
    case MethodTag::SPPCA: {
      const auto* sp = std::get_if<SppcaParams>(&state);
      if (sp == nullptr) throw ContractViolation("FittedReducer: SPPCA tag without SPPCA state");
      if (sp->U.rows() != P || sp->U.cols() != K || sp->v.size() != K) {
        throw ContractViolation("FittedReducer: SPPCA parameter shapes");
      }
      if (!(sp->sigma_x > 0.0) || !(sp->sigma_y > 0.0) || !sp->U.allFinite() ||
          !sp->v.allFinite()) {
        throw ContractViolation("FittedReducer: SPPCA parameters must be finite, sigmas positive");
      }
      return;
    }
    default: {
      const auto* b = std::get_if<BasisState>(&state);
      if (b == nullptr) throw ContractViolation("FittedReducer: basis method without basis");
      if (b->U.rows() != P || b->U.cols() != K) {
        throw ContractViolation("FittedReducer: basis shape");
      }
      if (linalg::orthonormality_error(b->U) > kOrthoTol) {
        throw ContractViolation("FittedReducer: basis columns not orthonormal");
      }
      return;
    }
  }
}

Eigen::MatrixXd reduce(const FittedReducer& r, const Eigen::MatrixXd& X) {
  const bool pv_tag = r.method == MethodTag::PV;
  const bool sppca_tag = r.method == MethodTag::SPPCA;
  if (pv_tag != std::holds_alternative<PvState>(r.state) ||
      sppca_tag != std::holds_alternative<SppcaParams>(r.state)) {
    throw ContractViolation("reduce: method tag does not match fitted state");
  }
  if (X.cols() != r.variables()) {
    throw DimensionMismatch("reduce: expected " + std::to_string(r.variables()) +
                            " variables, got " + std::to_string(X.cols()));
  }
  if (const auto* b = std::get_if<BasisState>(&r.state)) return X * b->U;
  if (const auto* pv = std::get_if<PvState>(&r.state)) return pv_reduce(*pv, X);
  const auto& sp = std::get<SppcaParams>(r.state);
  Eigen::MatrixXd M = sp.U.transpose() * sp.U;
  M.diagonal().array() += sp.sigma_x * sp.sigma_x;
  // Z = X U M⁻¹ with M symmetric positive definite.
  return M.ldlt().solve(sp.U.transpose() * X.transpose()).transpose();
}

nlohmann::json to_json(const FittedReducer& r) {
  nlohmann::json j;
  j["method"] = std::string(to_string(r.method));
  j["K"] = r.K;
  if (const auto* b = std::get_if<BasisState>(&r.state)) {
    j["basis"] = matrix_to_json(b->U);
  } else if (const auto* pv = std::get_if<PvState>(&r.state)) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : pv->steps) {
      steps.push_back({{"variables", s.variables},
                       {"direction", vector_to_json(s.direction)},
                       {"deflation", vector_to_json(s.deflation)}});
    }
    j["pv_state"] = std::move(steps);
  } else {
    const auto& sp = std::get<SppcaParams>(r.state);
    j["sppca_state"] = {{"U", matrix_to_json(sp.U)},
                        {"v", vector_to_json(sp.v)},
                        {"sigma_x", sp.sigma_x},
                        {"sigma_y", sp.sigma_y}};
  }
  nlohmann::json hp = nlohmann::json::object();
  if (r.hyper.M) hp["M"] = *r.hyper.M;
  if (r.hyper.gamma) hp["gamma"] = gamma_to_json(*r.hyper.gamma);
  if (r.hyper.score) hp["score"] = std::string(to_string(*r.hyper.score));
  j["hyperparameters"] = std::move(hp);
  j["flags"] = r.flags;
  return j;
}

FittedReducer reducer_from_json(const nlohmann::json& j) {
  FittedReducer r;
  r.method = parse_method(j.at("method").get<std::string>());
  r.K = j.at("K").get<Eigen::Index>();
  if (j.contains("basis")) {
    r.state = BasisState{matrix_from_json(j.at("basis"), r.K)};
  } else if (j.contains("pv_state")) {
    PvState pv;
    for (const auto& s : j.at("pv_state")) {
      PvStep step;
      step.variables = s.at("variables").get<std::vector<Eigen::Index>>();
      step.direction = vector_from_json(s.at("direction"));
      step.deflation = vector_from_json(s.at("deflation"));
      pv.steps.push_back(std::move(step));
    }
    r.state = std::move(pv);
  } else if (j.contains("sppca_state")) {
    const auto& s = j.at("sppca_state");
    SppcaParams sp;
    sp.U = matrix_from_json(s.at("U"), r.K);
    sp.v = vector_from_json(s.at("v"));
    sp.sigma_x = s.at("sigma_x").get<double>();
    sp.sigma_y = s.at("sigma_y").get<double>();
    r.state = std::move(sp);
  } else {
    throw ContractViolation("reducer JSON: no state present");
  }
  if (j.contains("hyperparameters")) {
    const auto& hp = j.at("hyperparameters");
    if (hp.contains("M")) r.hyper.M = hp.at("M").get<Eigen::Index>();
    if (hp.contains("gamma")) r.hyper.gamma = gamma_from_json(hp.at("gamma"));
    if (hp.contains("score")) r.hyper.score = parse_score(hp.at("score").get<std::string>());
  }
  if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  r.validate(r.variables());
  return r;
}

}  // namespace sdr
