#include "usplit/models/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "usplit/simd.hpp"

namespace usplit::models {

GaussianMeanModel::GaussianMeanModel(std::size_t d, std::size_t k)
    : d_(d), k_(k) {
  if (d == 0) throw std::invalid_argument("GaussianMeanModel: d must be >= 1");
  if (k > d) throw std::invalid_argument("GaussianMeanModel: k must be <= d");
}

double GaussianMeanModel::log_likelihood(const Theta& theta,
                                         const Dataset& data) const {
  if (theta.size() != d_ || data.n_cols != d_) {
    throw std::invalid_argument("GaussianMeanModel: dimension mismatch");
  }
  const auto n = data.n_rows;
  // sum_i |x_i - theta|^2 = sum_i |x_i|^2 - 2 theta.colsum + n |theta|^2
  const double ss = simd::sum_squares(data.values.data(), n * d_);
  std::vector<double> colsum(d_, 0.0);
  simd::add_columns(data.values.data(), n, d_, colsum.data());
  const double cross = simd::dot(theta.data(), colsum.data(), d_);
  const double tt = simd::sum_squares(theta.data(), d_);
  const double nd = static_cast<double>(n) * static_cast<double>(d_);
  return -0.5 * (ss - 2.0 * cross + static_cast<double>(n) * tt) -
         0.5 * nd * std::log(2.0 * std::numbers::pi);
}

GaussianMeanModel::Theta GaussianMeanModel::mle_full(
    const Dataset& data) const {
  if (data.n_cols != d_ || data.n_rows == 0) {
    throw std::invalid_argument("GaussianMeanModel: bad dataset");
  }
  Theta mean(d_, 0.0);
  simd::add_columns(data.values.data(), data.n_rows, d_, mean.data());
  const double inv_n = 1.0 / static_cast<double>(data.n_rows);
  for (double& m : mean) m *= inv_n;
  return mean;
}

GaussianMeanModel::Theta GaussianMeanModel::mle_null(
    const Dataset& data) const {
  Theta mean = mle_full(data);
  const std::size_t p = d_ - k_;
  for (std::size_t j = 0; j < p; ++j) mean[j] = 0.0;
  return mean;
}

Dataset GaussianMeanModel::simulate(const Theta& theta, std::size_t n,
                                    random::Xoshiro256pp& rng) const {
  if (theta.size() != d_) {
    throw std::invalid_argument("GaussianMeanModel: dimension mismatch");
  }
  Dataset out(n, d_);
  random::fill_normals(rng, out.values.data(), n * d_);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.row(i);
    for (std::size_t j = 0; j < d_; ++j) row[j] += theta[j];
  }
  return out;
}

}  // namespace usplit::models
