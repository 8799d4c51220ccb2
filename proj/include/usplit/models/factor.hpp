#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "usplit/data.hpp"
#include "usplit/rng.hpp"
#include "usplit/slrt.hpp"

namespace usplit::models {

struct FactorFitOptions {
  double tol = 1e-6;         // projected-gradient norm of the average loglik
  int max_iter = 500;        // iteration cap per start (all phases combined)
  int em_cap = 100;          // warm-start iterations before the Newton phase
  int n_starts = 5;          // spectral start plus deterministic perturbations
  double omega_floor = 1e-6; // lower bound for the unique variances
};

struct FactorFitReport {
  int iterations = 0;         // iterations used by the winning start
  double grad_norm = 0.0;     // final projected-gradient norm
  bool converged = false;     // winning start reached the tolerance
  int n_converged = 0;        // how many starts reached the tolerance
  std::vector<double> avg_loglik_trace;  // accepted iterates, non-decreasing
};

struct OneFactorFit {
  Eigen::VectorXd gamma;
  Eigen::VectorXd omega;
  double avg_loglik = 0.0;
};

// Maximum-likelihood one-factor covariance fit Sigma = diag(omega) +
// gamma gamma^T to a zero-mean sample covariance s.  Warm-started by the
// expectation-maximization update and polished with an active-set Newton
// method so unique variances pinned at the floor (boundary solutions) are
// handled.  Returns the best start by log-likelihood; throws
// NonConvergenceError if no start reaches the gradient tolerance.
OneFactorFit one_factor_mle(const Eigen::MatrixXd& s,
                            const FactorFitOptions& opts = {},
                            FactorFitReport* report = nullptr);

// Zero-mean multivariate normal covariance model on n_vars variables.  The
// full model is an unrestricted covariance (d = n_vars (n_vars + 1) / 2 free
// parameters); the null restricts to the one-factor structure (k = 2 n_vars).
class FactorModel {
 public:
  struct Theta {
    Eigen::MatrixXd sigma;
  };

  explicit FactorModel(std::size_t n_vars = 12, FactorFitOptions opts = {});

  double log_likelihood(const Theta& theta, const Dataset& data) const;
  Theta mle_full(const Dataset& data) const;  // sample covariance
  Theta mle_null(const Dataset& data) const;  // one-factor fit
  Dataset simulate(const Theta& theta, std::size_t n,
                   random::Xoshiro256pp& rng) const;
  ModelDims dims() const noexcept {
    return {n_vars_ * (n_vars_ + 1) / 2, 2 * n_vars_};
  }
  std::size_t n_vars() const noexcept { return n_vars_; }

  // Uncentered sample covariance X^T X / n of the dataset rows.
  Eigen::MatrixXd sample_covariance(const Dataset& data) const;

 private:
  std::size_t n_vars_;
  FactorFitOptions opts_;
};

// Covariance MLE over the full or the one-factor parameter set.
FactorModel::Theta factor_mle(const Dataset& data,
                              bool restrict_to_one_factor, double tol = 1e-6,
                              int max_iter = 500);

// Simulation truth: a one-factor structure plus an h-scaled second factor
// with constant loadings.  regular keeps three strong loadings; the
// irregular variant keeps only two, which makes the one-factor fit sit on
// the boundary of the parameter set.
struct FactorScenario {
  bool regular = true;
  double h = 0.0;
  Eigen::VectorXd gamma;
  Eigen::VectorXd gamma2;
  Eigen::VectorXd omega;

  Eigen::MatrixXd sigma() const;
  FactorModel::Theta truth() const { return {sigma()}; }
};

FactorScenario factor_scenario(bool regular, double h);

}  // namespace usplit::models
