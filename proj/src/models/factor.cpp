#include "usplit/models/factor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "usplit/types.hpp"

namespace usplit::models {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Average log-likelihood per observation: -(v ln 2pi + ln det Sigma +
// tr(Sigma^{-1} S)) / 2 with Sigma = diag(omega) + gamma gamma^T.
double avg_loglik(const Eigen::MatrixXd& s, const Eigen::VectorXd& omega,
                  const Eigen::VectorXd& gamma) {
  const auto v = s.rows();
  Eigen::MatrixXd sigma = omega.asDiagonal();
  sigma.noalias() += gamma * gamma.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double logdet =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = llt.solve(s).trace();
  return -0.5 * (static_cast<double>(v) * std::log(2.0 * std::numbers::pi) +
                 logdet + trace);
}

struct Gradient {
  Eigen::VectorXd g_gamma;
  Eigen::VectorXd g_omega;      // entries zeroed on the active set
  Eigen::Array<bool, Eigen::Dynamic, 1> active;
  double norm = 0.0;
};

Eigen::MatrixXd inverse_of(const Eigen::VectorXd& omega,
                           const Eigen::VectorXd& gamma) {
  Eigen::MatrixXd sigma = omega.asDiagonal();
  sigma.noalias() += gamma * gamma.transpose();
  return sigma.llt().solve(
      Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
}

// Gradient of the average log-likelihood, projected onto the feasible
// directions: an omega coordinate at the floor whose gradient points
// further down is frozen (active constraint).
Gradient projected_gradient(const Eigen::MatrixXd& s,
                            const Eigen::VectorXd& omega,
                            const Eigen::VectorXd& gamma, double floor) {
  const Eigen::MatrixXd si = inverse_of(omega, gamma);
  Eigen::MatrixXd m = si * s * si;
  m -= si;
  Gradient grad;
  grad.g_gamma = m * gamma;
  grad.g_omega = 0.5 * m.diagonal();
  grad.active = (omega.array() <= floor * (1.0 + 1e-9)) &&
                (grad.g_omega.array() < 0.0);
  for (Eigen::Index j = 0; j < omega.size(); ++j) {
    if (grad.active[j]) grad.g_omega[j] = 0.0;
  }
  grad.norm = std::sqrt(grad.g_gamma.squaredNorm() + grad.g_omega.squaredNorm());
  return grad;
}

// Hessian of the average log-likelihood in (gamma, omega) coordinates.
Eigen::MatrixXd hessian(const Eigen::MatrixXd& s, const Eigen::VectorXd& omega,
                        const Eigen::VectorXd& gamma) {
  const auto v = s.rows();
  const Eigen::MatrixXd si = inverse_of(omega, gamma);
  const Eigen::MatrixXd b = si * s * si;
  const Eigen::MatrixXd m = b - si;
  const Eigen::VectorXd a = si * gamma;
  const Eigen::VectorXd bg = b * gamma;
  const double gta = gamma.dot(a);
  const double gtb = gamma.dot(bg);

  Eigen::MatrixXd h(2 * v, 2 * v);
  h.topLeftCorner(v, v) = -(si * gtb + a * bg.transpose()) -
                          (b * gta + bg * a.transpose()) +
                          (si * gta + a * a.transpose()) + m;
  h.bottomRightCorner(v, v) =
      0.5 * (si.cwiseProduct(si) - 2.0 * si.cwiseProduct(b));
  const Eigen::MatrixXd h_go =
      -si * bg.asDiagonal() - b * a.asDiagonal() + si * a.asDiagonal();
  h.topRightCorner(v, v) = h_go;
  h.bottomLeftCorner(v, v) = h_go.transpose();
  return h;
}

struct StartCandidate {
  Eigen::VectorXd gamma;
  Eigen::VectorXd omega;
  double avg_ll = kNegInf;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  std::vector<double> trace;
};

StartCandidate run_one_start(const Eigen::MatrixXd& s,
                             const Eigen::VectorXd& gamma_start,
                             const FactorFitOptions& opts) {
  const auto v = s.rows();
  const double floor = opts.omega_floor;

  StartCandidate cand;
  Eigen::VectorXd gamma = gamma_start;
  Eigen::VectorXd omega =
      (s.diagonal() - gamma.cwiseProduct(gamma))
          .cwiseMax((0.05 * s.diagonal()).cwiseMax(floor));

  int iters = 0;
  bool converged = false;
  double ll_cur = avg_loglik(s, omega, gamma);
  double ll_prev = kNegInf;
  int stall = 0;
  std::vector<double> trace{ll_cur};

  // Phase 1: expectation-maximization updates.  Each accepted iterate must
  // not decrease the likelihood; a decreasing update (possible only when the
  // variance floor clips the exact update) is rejected and control passes to
  // the Newton phase.
  for (int it = 0; it < opts.em_cap && iters < opts.max_iter; ++it) {
    Eigen::MatrixXd sigma = omega.asDiagonal();
    sigma.noalias() += gamma * gamma.transpose();
    const Eigen::VectorXd beta = sigma.llt().solve(gamma);
    const Eigen::VectorXd sb = s * beta;
    const double denom = 1.0 - beta.dot(gamma) + beta.dot(sb);
    const Eigen::VectorXd gamma_new = sb / denom;
    const Eigen::VectorXd omega_new =
        (s.diagonal() - gamma_new.cwiseProduct(sb)).cwiseMax(floor);
    const double ll_new = avg_loglik(s, omega_new, gamma_new);
    if (!(ll_new >= ll_cur - 1e-12 * std::max(1.0, std::abs(ll_cur)))) break;
    gamma = gamma_new;
    omega = omega_new;
    ll_cur = ll_new;
    trace.push_back(ll_cur);
    ++iters;

    const Gradient grad = projected_gradient(s, omega, gamma, floor);
    if (grad.norm <= opts.tol) {
      converged = true;
      break;
    }
    if (ll_cur - ll_prev < 1e-10) {
      if (++stall >= 2) break;
    } else {
      stall = 0;
    }
    ll_prev = ll_cur;
  }

  // Phase 2: Newton steps on the free coordinates with Levenberg damping and
  // a backtracking line search; omega stays clipped at the floor.
  double f = ll_cur;
  while (!converged && iters < opts.max_iter) {
    const Gradient grad = projected_gradient(s, omega, gamma, floor);
    Eigen::VectorXd g(2 * v);
    g << grad.g_gamma, grad.g_omega;

    std::vector<Eigen::Index> free_idx;
    free_idx.reserve(2 * v);
    for (Eigen::Index j = 0; j < v; ++j) free_idx.push_back(j);
    for (Eigen::Index j = 0; j < v; ++j) {
      if (!grad.active[j]) free_idx.push_back(v + j);
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());

    const Eigen::MatrixXd h = hessian(s, omega, gamma);
    Eigen::MatrixXd hf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index r = 0; r < nf; ++r) {
      gf[r] = g[free_idx[r]];
      for (Eigen::Index c = 0; c < nf; ++c) {
        hf(r, c) = h(free_idx[r], free_idx[c]);
      }
    }

    // Damp until -H_f + lambda I is positive definite.
    double lambda = 1e-9;
    Eigen::VectorXd step_f;
    bool have_step = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd damped = -hf;
      damped.diagonal().array() += lambda;
      const Eigen::LLT<Eigen::MatrixXd> llt(damped);
      if (llt.info() == Eigen::Success) {
        step_f = llt.solve(gf);
        have_step = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!have_step) break;

    Eigen::VectorXd step = Eigen::VectorXd::Zero(2 * v);
    for (Eigen::Index r = 0; r < nf; ++r) step[free_idx[r]] = step_f[r];
    const double slope = g.dot(step);  // >= 0 by construction

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd gamma_new, omega_new;
    double fn = kNegInf;
    while (t > 1e-14) {
      gamma_new = gamma + t * step.head(v);
      omega_new = (omega + t * step.tail(v)).cwiseMax(floor);
      fn = avg_loglik(s, omega_new, gamma_new);
      if (std::isfinite(fn) && fn >= f + 1e-6 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++iters;
    if (!accepted) break;
    gamma = gamma_new;
    omega = omega_new;
    f = fn;
    trace.push_back(f);

    const Gradient after = projected_gradient(s, omega, gamma, floor);
    if (after.norm <= opts.tol) converged = true;
  }

  cand.gamma = gamma;
  cand.omega = omega;
  cand.avg_ll = avg_loglik(s, omega, gamma);
  cand.iterations = iters;
  cand.grad_norm = projected_gradient(s, omega, gamma, floor).norm;
  cand.converged = converged;
  cand.trace = std::move(trace);
  return cand;
}

}  // namespace

OneFactorFit one_factor_mle(const Eigen::MatrixXd& s,
                            const FactorFitOptions& opts,
                            FactorFitReport* report) {
  if (s.rows() != s.cols() || s.rows() < 2) {
    throw std::invalid_argument("one_factor_mle: s must be square, >= 2x2");
  }
  const auto v = s.rows();

  // Spectral start: loading along the top eigenvector, scaled by the excess
  // of the top eigenvalue over the median; sign fixed by the largest entry.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument("one_factor_mle: eigendecomposition failed");
  }
  const Eigen::VectorXd w = eig.eigenvalues();  // ascending
  const double median = (v % 2 == 1)
                            ? w[v / 2]
                            : 0.5 * (w[v / 2 - 1] + w[v / 2]);
  Eigen::VectorXd g0 =
      std::sqrt(std::max(w[v - 1] - median, 1e-12)) * eig.eigenvectors().col(v - 1);
  Eigen::Index top = 0;
  g0.cwiseAbs().maxCoeff(&top);
  if (g0[top] < 0.0) g0 = -g0;

  std::vector<Eigen::VectorXd> starts{g0};
  // Deterministic perturbed restarts (fixed directions, independent of any
  // caller seed, so the fit is a pure function of s).
  const double spread = 0.1 * g0.norm() / std::sqrt(static_cast<double>(v));
  for (int sidx = 1; sidx < opts.n_starts; ++sidx) {
    auto rng = random::make_stream(random::kGolden,
                                   random::stream_tag("factor-start"),
                                   static_cast<std::uint64_t>(sidx));
    Eigen::VectorXd eps(v);
    random::fill_normals(rng, eps.data(), static_cast<std::size_t>(v));
    starts.push_back(g0 + spread * eps);
  }

  StartCandidate best;
  int n_converged = 0;
  for (const auto& start : starts) {
    StartCandidate cand = run_one_start(s, start, opts);
    if (cand.converged) ++n_converged;
    if (cand.avg_ll > best.avg_ll || best.gamma.size() == 0) {
      best = std::move(cand);
    }
  }
  if (n_converged == 0) {
    throw NonConvergenceError(
        "one_factor_mle: no start reached the gradient tolerance");
  }

  if (report != nullptr) {
    report->iterations = best.iterations;
    report->grad_norm = best.grad_norm;
    report->converged = best.converged;
    report->n_converged = n_converged;
    report->avg_loglik_trace = best.trace;
  }
  return {std::move(best.gamma), std::move(best.omega), best.avg_ll};
}

FactorModel::FactorModel(std::size_t n_vars, FactorFitOptions opts)
    : n_vars_(n_vars), opts_(opts) {
  if (n_vars < 3) {
    // One factor needs at least three variables to be identified.
    throw std::invalid_argument("FactorModel: n_vars must be >= 3");
  }
}

Eigen::MatrixXd FactorModel::sample_covariance(const Dataset& data) const {
  if (data.n_cols != n_vars_) {
    throw std::invalid_argument("FactorModel: dimension mismatch");
  }
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
      x(data.values.data(), static_cast<Eigen::Index>(data.n_rows),
        static_cast<Eigen::Index>(data.n_cols));
  Eigen::MatrixXd s = x.transpose() * x;
  s /= static_cast<double>(data.n_rows);
  return s;
}

double FactorModel::log_likelihood(const Theta& theta,
                                   const Dataset& data) const {
  if (theta.sigma.rows() != static_cast<Eigen::Index>(n_vars_) ||
      theta.sigma.cols() != static_cast<Eigen::Index>(n_vars_)) {
    throw std::invalid_argument("FactorModel: dimension mismatch");
  }
  const Eigen::MatrixXd s = sample_covariance(data);
  const Eigen::LLT<Eigen::MatrixXd> llt(theta.sigma);
  if (llt.info() != Eigen::Success) return kNegInf;
  const double logdet =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = llt.solve(s).trace();
  const double n = static_cast<double>(data.n_rows);
  const double v = static_cast<double>(n_vars_);
  return -0.5 * n *
         (v * std::log(2.0 * std::numbers::pi) + logdet + trace);
}

FactorModel::Theta FactorModel::mle_full(const Dataset& data) const {
  if (data.n_rows <= n_vars_) {
    throw std::invalid_argument(
        "FactorModel: need more observations than variables");
  }
  return {sample_covariance(data)};
}

FactorModel::Theta FactorModel::mle_null(const Dataset& data) const {
  if (data.n_rows <= n_vars_) {
    throw std::invalid_argument(
        "FactorModel: need more observations than variables");
  }
  const OneFactorFit fit = one_factor_mle(sample_covariance(data), opts_);
  Eigen::MatrixXd sigma = fit.omega.asDiagonal();
  sigma.noalias() += fit.gamma * fit.gamma.transpose();
  return {std::move(sigma)};
}

Dataset FactorModel::simulate(const Theta& theta, std::size_t n,
                              random::Xoshiro256pp& rng) const {
  const Eigen::LLT<Eigen::MatrixXd> llt(theta.sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("FactorModel: covariance not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  Dataset out(n, n_vars_);
  random::fill_normals(rng, out.values.data(), n * n_vars_);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>
      x(out.values.data(), static_cast<Eigen::Index>(n),
        static_cast<Eigen::Index>(n_vars_));
  x = x * l.transpose();
  return out;
}

FactorModel::Theta factor_mle(const Dataset& data,
                              bool restrict_to_one_factor, double tol,
                              int max_iter) {
  const FactorModel model(data.n_cols);
  if (!restrict_to_one_factor) return model.mle_full(data);
  FactorFitOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  const FactorModel restricted(data.n_cols, opts);
  return restricted.mle_null(data);
}

Eigen::MatrixXd FactorScenario::sigma() const {
  Eigen::MatrixXd out = omega.asDiagonal();
  out.noalias() += gamma * gamma.transpose();
  out.noalias() += gamma2 * gamma2.transpose();
  return out;
}

FactorScenario factor_scenario(bool regular, double h) {
  constexpr Eigen::Index v = 12;
  FactorScenario scenario;
  scenario.regular = regular;
  scenario.h = h;
  scenario.omega = Eigen::VectorXd::Constant(v, 0.2);
  scenario.gamma = Eigen::VectorXd::Zero(v);
  const Eigen::Index strong = regular ? 3 : 2;
  for (Eigen::Index j = 0; j < strong; ++j) scenario.gamma[j] = 5.0;
  scenario.gamma2 =
      Eigen::VectorXd::Constant(v, h / std::sqrt(static_cast<double>(v)));
  return scenario;
}

}  // namespace usplit::models
