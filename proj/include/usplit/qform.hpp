#pragma once

#include <Eigen/Dense>

#include "usplit/types.hpp"

// Moments of Gaussian quadratic forms, used as an independent oracle for the
// closed-form moments of the limiting split statistics.  Both limit laws are
// indefinite quadratic forms Q = scale * (Z + mu)' A (Z + mu) with
// Z ~ N(0, Sigma), so their cumulants follow from the trace formulas below
// without reusing any of the hand-derived mean/variance expressions.
namespace usplit::qform {

struct QuadraticFormSpec {
  Eigen::MatrixXd a;      // symmetric coefficient matrix
  Eigen::MatrixXd sigma;  // covariance of Z
  Eigen::VectorXd mu;     // mean shift
  double scale = 1.0;
};

// Cumulants of Q up to order four:
//   kappa_r = 2^{r-1} (r-1)! [tr((A Sigma)^r) + r mu' (A Sigma)^{r-1} A mu]
//             * scale^r
struct CumulantSummary {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;

  MomentSummary moments() const { return {k1, k2}; }

  // Raw moments E[Q^r] from the cumulants.
  double raw(int r) const;
};

CumulantSummary quadratic_form_cumulants(const QuadraticFormSpec& spec);

// Quadratic-form representation of the limiting split statistic
//   ||X_[p] + sqrt(m0) h||^2 - ||X - sqrt(m0/m1) Y||^2,  X, Y ~ N_d(0, I),
// under the coupling X = sqrt(m0) u, Y = sqrt(m1) v with coordinates
// z = (u, v), Sigma = diag(I_d / m0, I_d / m1), mu = (h, 0, h, 0) and
// scale = m0, where h = (sqrt(delta), 0, ..., 0) in R^p.
QuadraticFormSpec split_construction(const SplitChiSqParams& params);

// Representation of the cross-fit statistic
//   w0 * T(m0 part) + (1 - w0) * T(m1 part)
// sharing one (X, Y) pair: B = w0 m0 A + (1 - w0) m1 P A P with P the
// block swap of u and v, scale 1.
QuadraticFormSpec crossfit_construction(const SplitChiSqParams& params,
                                        double w0 = 0.5);

}  // namespace usplit::qform
