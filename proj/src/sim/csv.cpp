#include "usplit/sim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace usplit::sim {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double binomial_se(double p_hat, std::size_t n_reps) {
  if (n_reps == 0) return 0.0;
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n_reps));
}

std::string render_csv(const std::vector<CsvRow>& rows) {
  std::string out = "schema=1\n";
  out += "scenario,variable,value,method,power,se,reps,seed\n";
  for (const CsvRow& row : rows) {
    out += row.scenario;
    out += ',';
    out += row.variable;
    out += ',';
    out += format_g17(row.value);
    out += ',';
    out += row.method;
    out += ',';
    out += format_g17(row.power);
    out += ',';
    out += format_g17(row.se);
    out += ',';
    out += std::to_string(row.reps);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw std::runtime_error("cannot open for writing: " + tmp.string());
    }
    file.write(content.data(),
               static_cast<std::streamsize>(content.size()));
    file.flush();
    if (!file) {
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, target);
}

void write_rows(const std::string& path, const std::vector<CsvRow>& rows) {
  write_text_atomic(path, render_csv(rows));
}

}  // namespace usplit::sim
