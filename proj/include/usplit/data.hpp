#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace usplit {

// Row-major numeric dataset: n_rows observations of n_cols variables.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;  // row-major, n_rows * n_cols entries

  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols)
      : n_rows(rows), n_cols(cols), values(rows * cols, 0.0) {}

  double* row(std::size_t i) noexcept { return values.data() + i * n_cols; }
  const double* row(std::size_t i) const noexcept {
    return values.data() + i * n_cols;
  }
};

// A two-way partition of row indices {0, ..., n-1}.  part0 is the evaluation
// part with exactly floor(m0 * n) elements; part1 is its complement.  Both
// index lists are sorted so that materialized subsets preserve row order.
struct DataSplit {
  std::vector<std::size_t> part0;
  std::vector<std::size_t> part1;
  double m0 = 0.5;
  std::uint64_t seed = 0;
};

// Draw a uniformly random partition, deterministic in (seed, index).  The
// index selects independent replicate splits of the same data for the same
// seed (index 0 is the canonical split).  Throws std::invalid_argument if
// either part would be empty.
DataSplit split_data(std::size_t n, double m0, std::uint64_t seed,
                     std::uint64_t index = 0);

// Copy the selected rows (in the given order) into a new contiguous dataset.
Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& rows);

}  // namespace usplit
