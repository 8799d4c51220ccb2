#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace usplit::sim {

// One output row of a simulation study.  The `power` column carries the
// row's estimate: a rejection rate for power/size rows, a quantile or
// threshold for quantile-study rows (se = 0 there), or a splitting ratio
// for `*-ratio` rows.
struct CsvRow {
  std::string scenario;
  std::string variable;
  double value = 0.0;
  std::string method;
  double power = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

// Shortest round-trip decimal form (17 significant digits).
std::string format_g17(double x);

// Binomial standard error sqrt(p (1 - p) / n).
double binomial_se(double p_hat, std::size_t n_reps);

// Render rows under the versioned header:
//   schema=1
//   scenario,variable,value,method,power,se,reps,seed
std::string render_csv(const std::vector<CsvRow>& rows);

// Write atomically: to a temporary file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

void write_rows(const std::string& path, const std::vector<CsvRow>& rows);

}  // namespace usplit::sim
