#include "usplit/qform.hpp"

#include <cmath>
#include <stdexcept>

namespace usplit::qform {

double CumulantSummary::raw(int r) const {
  switch (r) {
    case 1:
      return k1;
    case 2:
      return k1 * k1 + k2;
    case 3:
      return k1 * k1 * k1 + 3.0 * k1 * k2 + k3;
    case 4:
      return k1 * k1 * k1 * k1 + 6.0 * k1 * k1 * k2 + 3.0 * k2 * k2 +
             4.0 * k1 * k3 + k4;
    default:
      throw std::invalid_argument("CumulantSummary::raw: r must be 1..4");
  }
}

CumulantSummary quadratic_form_cumulants(const QuadraticFormSpec& spec) {
  const auto n = spec.a.rows();
  if (spec.a.cols() != n || spec.sigma.rows() != n || spec.sigma.cols() != n ||
      spec.mu.size() != n) {
    throw std::invalid_argument("quadratic_form_cumulants: shape mismatch");
  }
  const Eigen::MatrixXd m = spec.a * spec.sigma;  // A Sigma
  const Eigen::VectorXd amu = spec.a * spec.mu;

  double kappa[5] = {};
  Eigen::MatrixXd mpow = Eigen::MatrixXd::Identity(n, n);  // (A Sigma)^{r-1}
  double factor = 0.5;                                     // 2^{r-1} (r-1)!
  double scale_pow = 1.0;
  for (int r = 1; r <= 4; ++r) {
    factor *= 2.0 * (r == 1 ? 1.0 : (r - 1));  // 1, 2, 8, 48
    scale_pow *= spec.scale;
    const double cross = spec.mu.dot(mpow * amu);
    mpow = mpow * m;  // now (A Sigma)^r
    kappa[r] = factor * (mpow.trace() + r * cross) * scale_pow;
  }
  return {kappa[1], kappa[2], kappa[3], kappa[4]};
}

namespace {

// Symmetric A of the coupled form with coordinates z = (u_p, u_k, v_p, v_k):
//   m0 [ ||u_p + h||^2 - ||u - v||^2 ]
//     = scale * (z + mu)' A (z + mu), expanding to
//   -||u_k||^2 - ||v||^2 + 2 u_p . v_p + 2 u_k . v_k  (on shifted coords).
Eigen::MatrixXd coupling_matrix(std::size_t d, std::size_t p) {
  const auto dd = static_cast<Eigen::Index>(d);
  const auto pp = static_cast<Eigen::Index>(p);
  const Eigen::Index kk = dd - pp;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * dd, 2 * dd);
  a.block(0, dd, pp, pp).setIdentity();           // u_p x v_p
  a.block(dd, 0, pp, pp).setIdentity();           // v_p x u_p
  a.block(pp, pp, kk, kk) = -Eigen::MatrixXd::Identity(kk, kk);  // -||u_k||^2
  a.block(pp, dd + pp, kk, kk).setIdentity();     // u_k x v_k
  a.block(dd + pp, pp, kk, kk).setIdentity();     // v_k x u_k
  a.block(dd, dd, pp, pp) = -Eigen::MatrixXd::Identity(pp, pp);  // -||v_p||^2
  a.block(dd + pp, dd + pp, kk, kk) =
      -Eigen::MatrixXd::Identity(kk, kk);         // -||v_k||^2
  return a;
}

Eigen::MatrixXd coupling_sigma(const SplitChiSqParams& params) {
  const auto dd = static_cast<Eigen::Index>(params.d);
  Eigen::VectorXd diag(2 * dd);
  diag.head(dd).setConstant(1.0 / params.m0);
  diag.tail(dd).setConstant(1.0 / params.m1());
  return diag.asDiagonal();
}

Eigen::VectorXd coupling_mu(const SplitChiSqParams& params) {
  const auto dd = static_cast<Eigen::Index>(params.d);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(2 * dd);
  const double h = std::sqrt(params.delta);
  mu(0) = h;
  mu(dd) = h;
  return mu;
}

}  // namespace

QuadraticFormSpec split_construction(const SplitChiSqParams& params) {
  QuadraticFormSpec spec;
  spec.a = coupling_matrix(params.d, params.p);
  spec.sigma = coupling_sigma(params);
  spec.mu = coupling_mu(params);
  spec.scale = params.m0;
  return spec;
}

QuadraticFormSpec crossfit_construction(const SplitChiSqParams& params,
                                        double w0) {
  if (!(w0 >= 0.0 && w0 <= 1.0)) {
    throw std::invalid_argument("crossfit_construction: w0 must be in [0,1]");
  }
  const auto dd = static_cast<Eigen::Index>(params.d);
  const Eigen::MatrixXd a = coupling_matrix(params.d, params.p);

  // P swaps the u and v blocks; P A P is the same statistic with the roles of
  // the two parts (and their sizes m0, m1) exchanged.
  Eigen::MatrixXd swapped(2 * dd, 2 * dd);
  swapped.topLeftCorner(dd, dd) = a.bottomRightCorner(dd, dd);
  swapped.topRightCorner(dd, dd) = a.bottomLeftCorner(dd, dd);
  swapped.bottomLeftCorner(dd, dd) = a.topRightCorner(dd, dd);
  swapped.bottomRightCorner(dd, dd) = a.topLeftCorner(dd, dd);

  QuadraticFormSpec spec;
  spec.a = w0 * params.m0 * a + (1.0 - w0) * params.m1() * swapped;
  spec.sigma = coupling_sigma(params);
  spec.mu = coupling_mu(params);
  spec.scale = 1.0;
  return spec;
}

}  // namespace usplit::qform
