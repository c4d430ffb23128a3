#include "sdr/intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdr/errors.hpp"
#include "sdr/linalg.hpp"
#include "sdr/wrapper.hpp"

namespace sdr {

namespace {

constexpr double kDegenerateTol = 1e-12;
constexpr double kTieTol = 1e-9;
constexpr double kVarianceFloor = 1e-12;
constexpr double kMonotoneTol = 1e-8;
constexpr int kMaxHalvings = 60;

void check_k(Eigen::Index K, Eigen::Index P, const char* who) {
  if (K < 1 || K > P) {
    throw ContractViolation(std::string(who) + ": K=" + std::to_string(K) + " outside [1, " +
                            std::to_string(P) + "]");
  }
}

[[noreturn]] void degenerate(Eigen::Index k, const char* who) {
  throw DegenerateDirectionError(static_cast<std::size_t>(k + 1),
                                 std::string(who) + ": direction vanished at iteration " +
                                     std::to_string(k + 1));
}

// Index of the first eigenvalue in the tied cluster that contains position K-1
// and K (0-based), and one past its last member.
struct Cluster {
  Eigen::Index first;
  Eigen::Index last;  // exclusive
};

Cluster tied_cluster(const Eigen::VectorXd& values, Eigen::Index K, double tol) {
  Cluster c{K - 1, K + 1};
  while (c.first > 0 && values(c.first - 1) - values(c.first) <= tol) --c.first;
  while (c.last < values.size() && values(c.last - 1) - values(c.last) <= tol) ++c.last;
  return c;
}

bool ties_at(const Eigen::VectorXd& values, Eigen::Index K, double tol) {
  return K < values.size() && values(K - 1) - values(K) <= tol;
}

// Completes `keep` leading eigenvectors of a matrix with a tie at position K
// using the variance of X inside the tied eigenspace, then the PCA basis.
Eigen::MatrixXd complete_tied_basis(const linalg::EigenPairs& full, Eigen::Index K,
                                    const Eigen::MatrixXd& C, const Eigen::MatrixXd& X) {
  const double scale = std::max(std::abs(full.values(0)), 1e-300);
  const Cluster cl = tied_cluster(full.values, K, kTieTol * scale);
  const Eigen::Index keep = cl.first;
  const Eigen::Index need = K - keep;
  const Eigen::MatrixXd E = full.vectors.middleCols(cl.first, cl.last - cl.first);

  const Eigen::MatrixXd restricted = E.transpose() * C * E;
  const linalg::EigenPairs inner = linalg::sym_eig_topk(restricted, restricted.rows());
  const double inner_scale = std::max(std::abs(inner.values(0)), 1e-300);
  Eigen::MatrixXd extra;
  if (!ties_at(inner.values, need, kTieTol * inner_scale)) {
    extra = E * inner.vectors.leftCols(need);
  } else {
    const Eigen::MatrixXd reference = pca_basis(X, K);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E.transpose() * reference, Eigen::ComputeThinU);
    extra = E * svd.matrixU().leftCols(need);
  }
  Eigen::MatrixXd U(full.vectors.rows(), K);
  U.leftCols(keep) = full.vectors.leftCols(keep);
  U.rightCols(need) = extra;
  // Re-orthonormalize against roundoff, keeping the column order.
  U = linalg::orthonormalize(U);
  linalg::fix_signs(U);
  return U;
}

Eigen::VectorXd least_squares_beta(const Eigen::MatrixXd& G, const Eigen::VectorXd& b) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(G).solve(b);
}

// Sufficient statistics shared by LSPCA and SPPCA.
struct Moments {
  Eigen::MatrixXd C;  // XᵀX
  Eigen::VectorXd w;  // Xᵀy
  double yy;          // ‖y‖²
  double xx;          // ‖X‖²_F
  double n;
};

Moments moments(const Dataset& d) {
  Moments m;
  m.C = linalg::gram(d.X());
  m.w = d.X().transpose() * d.y();
  m.yy = d.y().squaredNorm();
  m.xx = m.C.trace();
  m.n = static_cast<double>(d.samples());
  return m;
}

struct LspcaState {
  Eigen::MatrixXd U;
  Eigen::MatrixXd CU;
  Eigen::VectorXd beta;
  double objective = 0.0;
};

LspcaState lspca_state(const Moments& m, Eigen::MatrixXd U, double gamma) {
  LspcaState s;
  s.CU = m.C * U;
  const Eigen::MatrixXd G = U.transpose() * s.CU;
  const Eigen::VectorXd b = U.transpose() * m.w;
  s.beta = least_squares_beta(G, b);
  // With β optimal for U the residual is ‖y‖² − bᵀβ.
  const double fit = std::max(0.0, m.yy - 2.0 * b.dot(s.beta) + s.beta.dot(G * s.beta));
  const double recon = std::max(0.0, m.xx - G.trace());
  s.objective = fit + gamma * recon;
  s.U = std::move(U);
  return s;
}

Eigen::MatrixXd lspca_gradient(const Moments& m, const LspcaState& s, double gamma) {
  return -2.0 * (m.w - s.CU * s.beta) * s.beta.transpose() - 2.0 * gamma * s.CU;
}

}  // namespace

PlsPath pls_path(const Dataset& centered, Eigen::Index K, const Gamma& gamma) {
  const Eigen::Index P = centered.variables();
  check_k(K, P, "pls_path");
  Eigen::MatrixXd Xk = centered.X();
  Eigen::VectorXd yk = centered.y();
  PlsPath path;
  path.U.resize(P, K);
  path.scores.resize(centered.samples(), K);

  for (Eigen::Index k = 0; k < K; ++k) {
    Eigen::VectorXd u;
    const Eigen::VectorXd w = Xk.transpose() * yk;
    if (!gamma.is_infinite() && gamma.value() == 0.0) {
      const double wn = w.norm();
      if (!(wn > kDegenerateTol * Xk.norm() * yk.norm()) || wn == 0.0) degenerate(k, "fit_pls");
      u = w / wn;
      linalg::fix_sign(u);
    } else {
      Eigen::MatrixXd A = linalg::gram(Xk);
      if (!gamma.is_infinite()) {
        A *= gamma.value();
        A.noalias() += w * w.transpose();
      }
      const linalg::EigenPairs top = linalg::sym_eig_topk(A, 1);
      if (!(top.values(0) > 0.0)) degenerate(k, "fit_pls_extended");
      u = top.vectors.col(0);
    }
    const Eigen::VectorXd z = Xk * u;
    const double zz = z.squaredNorm();
    if (!(zz > 0.0)) degenerate(k, "fit_pls");
    Xk.noalias() -= z * u.transpose();
    yk -= (yk.dot(z) / zz) * z;
    path.U.col(k) = u;
    path.scores.col(k) = z;
  }
  return path;
}

FittedReducer fit_pls(const Dataset& centered, Eigen::Index K) {
  return make_basis_reducer(MethodTag::PLS, pls_path(centered, K, Gamma::finite(0.0)).U);
}

FittedReducer fit_pls_extended(const Dataset& centered, Eigen::Index K, const Gamma& gamma) {
  FittedReducer r = make_basis_reducer(MethodTag::PLS_EXT, pls_path(centered, K, gamma).U);
  r.hyper.gamma = gamma;
  return r;
}

FittedReducer fit_barshan_extended(const Dataset& centered, Eigen::Index K, const Gamma& gamma) {
  const Eigen::MatrixXd& X = centered.X();
  const Eigen::Index P = X.cols();
  check_k(K, P, "fit_barshan_extended");
  FittedReducer r;
  if (gamma.is_infinite()) {
    r = make_basis_reducer(MethodTag::BARSHAN_EXT, pca_basis(X, K));
    r.hyper.gamma = gamma;
    return r;
  }
  const Eigen::MatrixXd C = linalg::gram(X);
  const Eigen::VectorXd w = X.transpose() * centered.y();
  if (gamma.value() == 0.0) {
    const double wn = w.norm();
    if (wn == 0.0 || !(wn > kDegenerateTol * X.norm() * centered.y().norm())) {
      degenerate(0, "fit_barshan");
    }
  }
  Eigen::MatrixXd A = gamma.value() * C;
  A.noalias() += w * w.transpose();
  const linalg::EigenPairs full = linalg::sym_eig_topk(A, P);
  const double scale = std::max(std::abs(full.values(0)), 1e-300);
  bool completed = false;
  Eigen::MatrixXd U;
  if (ties_at(full.values, K, kTieTol * scale)) {
    U = complete_tied_basis(full, K, C, X);
    completed = true;
  } else {
    U = full.vectors.leftCols(K);
  }
  r = make_basis_reducer(MethodTag::BARSHAN_EXT, std::move(U));
  r.hyper.gamma = gamma;
  if (completed) r.flags.emplace_back("basis_completed");
  return r;
}

FittedReducer fit_barshan(const Dataset& centered, Eigen::Index K) {
  FittedReducer r = fit_barshan_extended(centered, K, Gamma::finite(0.0));
  r.method = MethodTag::BARSHAN;
  r.hyper.gamma.reset();
  return r;
}

double lspca_objective(const Dataset& centered, const Eigen::MatrixXd& U,
                       const Eigen::VectorXd& beta, double gamma) {
  const Eigen::MatrixXd XU = centered.X() * U;
  const double fit = (centered.y() - XU * beta).squaredNorm();
  const double recon = (centered.X() - XU * U.transpose()).squaredNorm();
  return fit + gamma * recon;
}

LspcaFit fit_lspca(const Dataset& centered, Eigen::Index K, const Gamma& gamma,
                   const LspcaOptions& opts) {
  const Eigen::Index P = centered.variables();
  check_k(K, P, "fit_lspca");
  const Moments m = moments(centered);
  LspcaFit out;

  const double g = gamma.is_infinite() ? 0.0 : gamma.value();
  LspcaState cur = lspca_state(m, pca_basis(centered.X(), K), g);
  out.solution.objective.push_back(cur.objective);

  if (gamma.is_infinite()) {
    out.solution.converged = true;
  } else {
    // Initial step from a Lipschitz-style bound, then Barzilai-Borwein.
    const double lmax = std::max(linalg::sym_eig_topk(m.C, 1).values(0), 1e-300);
    double step = 1.0 / (2.0 * lmax * (cur.beta.squaredNorm() + g) + 1e-300);
    Eigen::MatrixXd xi = linalg::tangent_project(cur.U, lspca_gradient(m, cur, g));
    int it = 0;
    for (; it < opts.max_iters; ++it) {
      if (xi.norm() == 0.0) {
        out.solution.converged = true;
        break;
      }
      bool accepted = false;
      LspcaState next;
      for (int h = 0; h < kMaxHalvings; ++h) {
        next = lspca_state(m, linalg::orthonormalize(cur.U - step * xi), g);
        if (next.objective < cur.objective) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // No descent left at machine precision.
        out.solution.converged = true;
        break;
      }
      const double rel = (cur.objective - next.objective) / std::max(std::abs(cur.objective), 1e-300);
      const Eigen::MatrixXd next_xi = linalg::tangent_project(next.U, lspca_gradient(m, next, g));
      const Eigen::MatrixXd S = next.U - cur.U;
      const Eigen::MatrixXd Y = next_xi - xi;
      const double sy = std::abs((S.array() * Y.array()).sum());
      const double bb = (it % 2 == 0) ? S.squaredNorm() / sy : sy / Y.squaredNorm();
      step = (std::isfinite(bb) && bb > 0.0) ? bb : 2.0 * step;
      cur = std::move(next);
      xi = next_xi;
      out.solution.objective.push_back(cur.objective);
      if (rel < opts.tol) {
        out.solution.converged = true;
        ++it;
        break;
      }
    }
    out.solution.iterations = it;
  }

  out.solution.U = cur.U;
  out.solution.beta = cur.beta;
  out.reducer = make_basis_reducer(MethodTag::LSPCA, cur.U);
  out.reducer.hyper.gamma = gamma;
  if (!out.solution.converged) out.reducer.flags.emplace_back("not_converged");
  return out;
}

namespace {

struct EStep {
  Eigen::MatrixXd Minv;  // posterior covariance of z
  Eigen::MatrixXd XtEz;  // Xᵀ E[Z]
  Eigen::VectorXd Ezy;   // E[Z]ᵀ y
  Eigen::MatrixXd EzEz;  // E[Z]ᵀ E[Z]
  double logdetM = 0.0;
  double quad = 0.0;     // Σ_n t_nᵀ Σ⁻¹ t_n
};

EStep e_step(const Moments& m, const SppcaParams& p) {
  const Eigen::Index K = p.U.cols();
  const double sx2 = p.sigma_x * p.sigma_x;
  const double sy2 = p.sigma_y * p.sigma_y;
  const Eigen::MatrixXd CU = m.C * p.U;
  const Eigen::MatrixXd A = p.U.transpose() * CU;
  const Eigen::VectorXd b = p.U.transpose() * m.w;

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(K, K);
  M.noalias() += p.U.transpose() * p.U / sx2;
  M.noalias() += p.v * p.v.transpose() / sy2;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw Error("fit_sppca: posterior precision not positive definite");
  EStep e;
  e.Minv = llt.solve(Eigen::MatrixXd::Identity(K, K));
  e.logdetM = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();

  // H = XU/σx² + y vᵀ/σy² is never formed; only its Gram products are needed.
  Eigen::MatrixXd HtH = A / (sx2 * sx2);
  HtH.noalias() += (b * p.v.transpose() + p.v * b.transpose()) / (sx2 * sy2);
  HtH.noalias() += m.yy * p.v * p.v.transpose() / (sy2 * sy2);
  const Eigen::MatrixXd XtH = CU / sx2 + m.w * p.v.transpose() / sy2;
  const Eigen::VectorXd Hty = b / sx2 + p.v * (m.yy / sy2);

  e.XtEz = XtH * e.Minv;
  e.Ezy = e.Minv * Hty;
  e.EzEz = e.Minv * HtH * e.Minv;
  e.quad = m.xx / sx2 + m.yy / sy2 - (e.Minv * HtH).trace();
  return e;
}

double log_likelihood(const Moments& m, const SppcaParams& p, const EStep& e) {
  const auto P = static_cast<double>(p.U.rows());
  const double logdet = P * std::log(p.sigma_x * p.sigma_x) +
                        std::log(p.sigma_y * p.sigma_y) + e.logdetM;
  return -0.5 * (m.n * (P + 1.0) * std::log(2.0 * std::numbers::pi) + m.n * logdet + e.quad);
}

}  // namespace

double sppca_log_likelihood(const Dataset& centered, const SppcaParams& params) {
  const Moments m = moments(centered);
  return log_likelihood(m, params, e_step(m, params));
}

SppcaFit fit_sppca(const Dataset& centered, Eigen::Index K, const SppcaOptions& opts) {
  const Eigen::Index P = centered.variables();
  check_k(K, P, "fit_sppca");
  const Moments m = moments(centered);
  const double n = m.n;
  const double var_scale = std::max(m.xx / (n * static_cast<double>(P)), 1e-300);
  SppcaFit out;

  // Start from the maximum-likelihood PPCA fit of X alone.
  const linalg::EigenPairs pcs = linalg::sym_eig_topk(m.C, K);
  const Eigen::VectorXd ell = pcs.values / n;
  double sx2 = P > K ? (m.xx / n - ell.sum()) / static_cast<double>(P - K) : 0.1 * var_scale;
  sx2 = std::max(sx2, 1e-6 * var_scale);
  SppcaParams p;
  p.U = pcs.vectors * (ell.array() - sx2).max(1e-6 * var_scale).sqrt().matrix().asDiagonal();
  {
    Eigen::MatrixXd M = p.U.transpose() * p.U;
    M.diagonal().array() += sx2;
    const Eigen::MatrixXd Z = M.ldlt().solve(p.U.transpose() * centered.X().transpose()).transpose();
    p.v = least_squares_beta(Z.transpose() * Z, Z.transpose() * centered.y());
    const double resid = (centered.y() - Z * p.v).squaredNorm() / n;
    p.sigma_y = std::sqrt(std::max(resid, 1e-6 * std::max(m.yy / n, 1e-300)));
  }
  p.sigma_x = std::sqrt(sx2);

  EStep e = e_step(m, p);
  double ll = log_likelihood(m, p, e);
  out.log_likelihood.push_back(ll);

  for (int it = 0; it < opts.max_iters; ++it) {
    // M-step; E[ΣzzᵀE] carries N copies of the posterior covariance.
    const Eigen::MatrixXd S = n * e.Minv + e.EzEz;
    const Eigen::LDLT<Eigen::MatrixXd> Sf(S);
    SppcaParams q;
    q.U = Sf.solve(e.XtEz.transpose()).transpose();
    q.v = Sf.solve(e.Ezy);
    double new_sx2 = (m.xx - 2.0 * (q.U.transpose() * e.XtEz).trace() +
                      (S * q.U.transpose() * q.U).trace()) /
                     (n * static_cast<double>(P));
    double new_sy2 = (m.yy - 2.0 * q.v.dot(e.Ezy) + q.v.dot(S * q.v)) / n;
    bool floored = false;
    if (!(new_sx2 >= kVarianceFloor)) {
      new_sx2 = kVarianceFloor;
      floored = true;
    }
    if (!(new_sy2 >= kVarianceFloor)) {
      new_sy2 = kVarianceFloor;
      floored = true;
    }
    q.sigma_x = std::sqrt(new_sx2);
    q.sigma_y = std::sqrt(new_sy2);
    out.variance_floored = out.variance_floored || floored;

    const EStep qe = e_step(m, q);
    const double qll = log_likelihood(m, q, qe);
    const double scale = std::max(1.0, std::abs(ll));
    if (!floored && qll < ll - kMonotoneTol * scale) {
      throw Error("fit_sppca: log-likelihood decreased from " + std::to_string(ll) + " to " +
                  std::to_string(qll) + " at EM step " + std::to_string(it + 1));
    }
    const double change = std::abs(qll - ll) / scale;
    p = std::move(q);
    e = qe;
    ll = qll;
    out.log_likelihood.push_back(ll);
    if (change < opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.reducer.method = MethodTag::SPPCA;
  out.reducer.K = K;
  out.reducer.state = std::move(p);
  if (!out.converged) out.reducer.flags.emplace_back("not_converged");
  if (out.variance_floored) out.reducer.flags.emplace_back("variance_floored");
  return out;
}

Eigen::VectorXd predict_sppca(const FittedReducer& r, const Eigen::MatrixXd& X_centered,
                              double y_mean) {
  const auto* p = std::get_if<SppcaParams>(&r.state);
  if (r.method != MethodTag::SPPCA || p == nullptr) {
    throw ContractViolation("predict_sppca: reducer is not an SPPCA fit");
  }
  if (!(p->sigma_x > 0.0)) throw ContractViolation("predict_sppca: sigma_x must be positive");
  return (reduce(r, X_centered) * p->v).array() + y_mean;
}

}  // namespace sdr
