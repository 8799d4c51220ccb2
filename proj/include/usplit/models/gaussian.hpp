#pragma once

#include <cstddef>
#include <vector>

#include "usplit/data.hpp"
#include "usplit/rng.hpp"
#include "usplit/slrt.hpp"

namespace usplit::models {

// d-variate normal location model with identity covariance.  The null
// hypothesis fixes the first p = d - k mean coordinates at zero and leaves
// the remaining k free.
class GaussianMeanModel {
 public:
  using Theta = std::vector<double>;  // mean vector, size d

  GaussianMeanModel(std::size_t d, std::size_t k);

  double log_likelihood(const Theta& theta, const Dataset& data) const;
  Theta mle_full(const Dataset& data) const;
  Theta mle_null(const Dataset& data) const;
  Dataset simulate(const Theta& theta, std::size_t n,
                   random::Xoshiro256pp& rng) const;
  ModelDims dims() const noexcept { return {d_, k_}; }

 private:
  std::size_t d_;
  std::size_t k_;
};

}  // namespace usplit::models
