#include "usplit/sim/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "usplit/data.hpp"
#include "usplit/models/factor.hpp"
#include "usplit/models/gaussian.hpp"
#include "usplit/optim.hpp"
#include "usplit/ratio.hpp"
#include "usplit/rng.hpp"
#include "usplit/slrt.hpp"
#include "usplit/splitchisq.hpp"
#include "usplit/types.hpp"

namespace usplit::sim {

namespace {

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_config(std::size_t n_reps, bool grids_ok) {
  require(n_reps >= 100, "study config: n_reps must be >= 100");
  require(grids_ok, "study config: all grids must be nonempty");
}

}  // namespace

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  const auto usable = static_cast<std::size_t>(std::max(threads, 1));
  if (usable <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t n_workers = std::min(usable, n);
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t chunk = (n + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    workers.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t tag,
                               std::uint64_t rep) {
  using random::mix64;
  std::uint64_t s = seed;
  s = mix64(s ^ mix64(tag));
  s = mix64(s ^ mix64(rep));
  return s;
}

std::vector<CsvRow> run_quantile_study(std::size_t d,
                                       const std::vector<std::size_t>& p_list,
                                       const std::vector<double>& m0_grid,
                                       const std::vector<double>& alpha_list,
                                       std::size_t n_reps, std::uint64_t seed,
                                       int threads) {
  check_config(n_reps,
               !p_list.empty() && !m0_grid.empty() && !alpha_list.empty());
  std::vector<CsvRow> rows;
  std::vector<double> draws(n_reps);
  for (const std::size_t p : p_list) {
    const LimitBatch batch(d, p, n_reps, seed,
                           random::stream_tag("quantile"), threads);
    const std::string scenario =
        "quantile-d" + std::to_string(d) + "-p" + std::to_string(p);
    for (const double m0 : m0_grid) {
      const auto params = make_params(d, p, m0, 0.0);
      batch.split_draws(params.m0, params.delta, draws.data());
      for (const double alpha : alpha_list) {
        const double q = mc_quantile(draws, 1.0 - alpha);
        rows.push_back({scenario, "m0", m0, "quantile-a" + short_num(alpha),
                        q, 0.0, n_reps, seed});
        rows.push_back({scenario, "m0", m0, "threshold-a" + short_num(alpha),
                        universal_threshold(alpha), 0.0, n_reps, seed});
      }
    }
  }
  return rows;
}

std::vector<CsvRow> run_power_vs_n(std::size_t d, std::size_t k, double theta,
                                   const std::vector<std::size_t>& n_grid,
                                   const std::vector<double>& m0_list,
                                   double alpha, std::size_t n_reps,
                                   std::uint64_t seed, int threads) {
  check_config(n_reps, !n_grid.empty() && !m0_list.empty());
  const models::GaussianMeanModel model(d, k);
  const std::size_t p = d - k;
  const models::GaussianMeanModel::Theta theta_vec(d, theta);
  const double thr = universal_threshold(alpha);

  // Critical values of the null limit law, one per splitting ratio.
  std::vector<double> asym_crit(m0_list.size());
  for (std::size_t mi = 0; mi < m0_list.size(); ++mi) {
    asym_crit[mi] = mc_quantile(
        make_params(d, p, m0_list[mi], 0.0), /*crossfit=*/false, 1.0 - alpha,
        100000,
        replication_seed(seed, random::stream_tag("asym-critical"), mi),
        threads);
  }

  const std::string scenario = "gaussian-d" + std::to_string(d) + "-k" +
                               std::to_string(k) + "-theta" +
                               short_num(theta);
  std::vector<CsvRow> rows;
  std::vector<std::uint8_t> lrt_rej(n_reps);
  std::vector<std::vector<std::uint8_t>> slrt_rej(m0_list.size()),
      asym_rej(m0_list.size());

  for (const std::size_t n : n_grid) {
    require(n >= 2, "power-vs-n: sample sizes must be >= 2");
    for (auto& v : slrt_rej) v.assign(n_reps, 0);
    for (auto& v : asym_rej) v.assign(n_reps, 0);
    lrt_rej.assign(n_reps, 0);

    const std::uint64_t tag_n = random::mix64(
        random::stream_tag("power-vs-n") ^ random::mix64(n));
    parallel_for(n_reps, threads, [&](std::size_t rep) {
      auto rng = random::make_stream(seed, tag_n, rep);
      const Dataset data = model.simulate(theta_vec, n, rng);
      lrt_rej[rep] = classical_lrt(model, data, alpha).reject ? 1 : 0;
      const std::uint64_t split_seed = replication_seed(seed, tag_n, rep);
      for (std::size_t mi = 0; mi < m0_list.size(); ++mi) {
        const DataSplit split = split_data(n, m0_list[mi], split_seed);
        const double lambda = slrt_statistic(model, data, split);
        slrt_rej[mi][rep] = lambda > thr ? 1 : 0;
        asym_rej[mi][rep] = lambda > asym_crit[mi] ? 1 : 0;
      }
    });

    const auto emit = [&](const std::string& method,
                          const std::vector<std::uint8_t>& rej) {
      std::size_t count = 0;
      for (const std::uint8_t r : rej) count += r;
      const double p_hat = static_cast<double>(count) / static_cast<double>(n_reps);
      rows.push_back({scenario, "n", static_cast<double>(n), method, p_hat,
                      binomial_se(p_hat, n_reps), n_reps, seed});
    };
    emit("lrt", lrt_rej);
    for (std::size_t mi = 0; mi < m0_list.size(); ++mi) {
      emit("slrt-m" + short_num(m0_list[mi]), slrt_rej[mi]);
      emit("asym-slrt-m" + short_num(m0_list[mi]), asym_rej[mi]);
    }
  }
  return rows;
}

std::vector<CsvRow> run_power_vs_split(std::size_t d,
                                       const std::vector<std::size_t>& p_list,
                                       double delta, double alpha,
                                       const std::vector<double>& m0_grid,
                                       std::size_t n_reps, std::uint64_t seed,
                                       int threads) {
  check_config(n_reps, !p_list.empty() && !m0_grid.empty());
  const double thr = universal_threshold(alpha);
  std::vector<CsvRow> rows;
  const std::string scenario =
      "limit-d" + std::to_string(d) + "-delta" + short_num(delta);
  for (const std::size_t p : p_list) {
    const LimitBatch batch(d, p, n_reps, seed,
                           random::stream_tag("power-vs-split"), threads);
    for (const double m0 : m0_grid) {
      const auto params = make_params(d, p, m0, delta);
      const double p_hat =
          batch.split_exceed_fraction(params.m0, params.delta, thr);
      rows.push_back({scenario, "m0", m0, "slrt-p" + std::to_string(p),
                      p_hat, binomial_se(p_hat, n_reps), n_reps, seed});
    }
  }
  return rows;
}

std::vector<CsvRow> run_optimal_split_comparison(
    const std::vector<std::size_t>& d_grid, KRule k_rule, double alpha,
    const DeltaRule& delta_rule, std::size_t n_reps, std::uint64_t seed,
    int threads) {
  check_config(n_reps, !d_grid.empty());
  const double thr = universal_threshold(alpha);
  SplitSearchConfig cfg;
  cfg.alpha = alpha;
  cfg.n_reps = n_reps;
  cfg.seed = seed;
  cfg.threads = threads;

  const std::string k_name =
      k_rule == KRule::fixed_five ? "k5" : "kd6";
  const std::string scenario =
      std::string("poweropti-") +
      (delta_rule.calibrated ? "power" + short_num(delta_rule.value)
                             : "delta" + short_num(delta_rule.value)) +
      "-" + k_name;

  std::vector<CsvRow> rows;
  for (const std::size_t d : d_grid) {
    const std::size_t k =
        k_rule == KRule::fixed_five ? 5 : std::max<std::size_t>(1, d / 6);
    require(k < d, "split comparison: k rule must leave p = d - k >= 1");
    const std::size_t p = d - k;

    double delta_star;
    double m0_algo1;
    if (delta_rule.calibrated) {
      SplitSearchConfig calib = cfg;
      calib.target_power = delta_rule.value;
      const SplitRatioResult algo = optimal_split_normal(d, p, calib);
      delta_star = algo.delta_used;
      m0_algo1 = algo.m0_opt;
    } else {
      delta_star = delta_rule.value;
      m0_algo1 =
          grid_then_golden(
              [&](double m0) {
                return normal_approx_cdf(thr,
                                         make_params(d, p, m0, delta_star));
              },
              cfg.grid_lo, cfg.grid_hi, cfg.grid_step, cfg.refine_tol)
              .first;
    }

    const LimitBatch batch(d, p, n_reps, seed, random::stream_tag("opti"),
                           threads);
    const double m0_mc =
        grid_then_golden(
            [&](double m0) {
              return -batch.split_exceed_fraction(m0, delta_star, thr);
            },
            cfg.grid_lo, cfg.grid_hi, cfg.grid_step, cfg.refine_tol)
            .first;
    const double m0_eq5 = worst_case_split(d, alpha);
    const double m0_thumb = rule_of_thumb_split(d, k);

    rows.push_back({scenario, "d", static_cast<double>(d), "delta",
                    delta_star, 0.0, n_reps, seed});
    const std::array<std::pair<const char*, double>, 4> methods{{
        {"algo1", m0_algo1},
        {"mc", m0_mc},
        {"eq5", m0_eq5},
        {"thumb", m0_thumb},
    }};
    for (const auto& [name, m0] : methods) {
      rows.push_back({scenario, "d", static_cast<double>(d),
                      std::string(name) + "-ratio", m0, 0.0, n_reps, seed});
      const double p_hat = batch.split_exceed_fraction(m0, delta_star, thr);
      rows.push_back({scenario, "d", static_cast<double>(d), name, p_hat,
                      binomial_se(p_hat, n_reps), n_reps, seed});
    }
  }
  return rows;
}

std::vector<CsvRow> run_factor_study(const std::vector<double>& h_grid,
                                     std::size_t n, double alpha,
                                     std::size_t n_reps, std::uint64_t seed,
                                     int threads) {
  check_config(n_reps, !h_grid.empty());
  require(n > 12, "factor study: need more observations than variables");
  const models::FactorModel model;
  const double thr = universal_threshold(alpha);

  constexpr std::size_t kNMethods = 7;
  const std::array<const char*, kNMethods> method_names{
      "slrt-m0.41",          "slrt-m0.51",          "crossfit-m0.50-w0.50",
      "crossfit-m0.41-w0.25", "crossfit-m0.41-w0.50", "crossfit-m0.41-w0.75",
      "subsample-m0.41-j2"};

  std::vector<CsvRow> rows;
  for (const bool regular : {true, false}) {
    const std::string scenario =
        regular ? "factor-regular" : "factor-irregular";
    const std::uint64_t scen_tag = random::stream_tag(scenario.c_str());
    for (std::size_t hi = 0; hi < h_grid.size(); ++hi) {
      const double h = h_grid[hi];
      const auto truth = models::factor_scenario(regular, h).truth();
      const std::uint64_t tag_h =
          random::mix64(scen_tag ^ random::mix64(hi));

      std::vector<std::array<std::uint8_t, kNMethods>> reject(
          n_reps, std::array<std::uint8_t, kNMethods>{});
      std::vector<std::array<std::uint8_t, kNMethods>> failed(
          n_reps, std::array<std::uint8_t, kNMethods>{});

      parallel_for(n_reps, threads, [&](std::size_t rep) {
        auto rng = random::make_stream(seed, tag_h, rep);
        const Dataset data = model.simulate(truth, n, rng);
        const std::uint64_t seed_r = replication_seed(seed, tag_h, rep);
        auto& rej = reject[rep];
        auto& fail = failed[rep];

        const DataSplit s41 = split_data(n, 0.41, seed_r);
        const DataSplit s51 = split_data(n, 0.51, seed_r);
        const DataSplit s50 = split_data(n, 0.50, seed_r);

        double lambda41 = std::numeric_limits<double>::quiet_NaN();
        try {
          lambda41 = slrt_statistic(model, data, s41);
          rej[0] = lambda41 > thr ? 1 : 0;
        } catch (const NonConvergenceError&) {
          fail[0] = 1;
        }
        try {
          rej[1] = slrt_statistic(model, data, s51) > thr ? 1 : 0;
        } catch (const NonConvergenceError&) {
          fail[1] = 1;
        }
        try {
          rej[2] = crossfit_statistic(model, data, s50, 0.5, alpha).reject
                       ? 1
                       : 0;
        } catch (const NonConvergenceError&) {
          fail[2] = 1;
        }
        try {
          const SlrtResult cf = crossfit_statistic(model, data, s41, 0.5, alpha);
          const double swap = *cf.lambda_swap;
          // The cross-fit call succeeding implies the forward fits succeeded,
          // so lambda41 holds exactly the forward statistic it used.
          const double forward = lambda41;
          const std::array<double, 3> weights{0.25, 0.50, 0.75};
          for (std::size_t wi = 0; wi < weights.size(); ++wi) {
            const double combined =
                weights[wi] * forward + (1.0 - weights[wi]) * swap;
            rej[3 + wi] = combined > thr ? 1 : 0;
          }
        } catch (const NonConvergenceError&) {
          fail[3] = fail[4] = fail[5] = 1;
        }
        try {
          rej[6] = subsample_statistic(model, data, 0.41, 2, alpha, seed_r)
                           .reject
                       ? 1
                       : 0;
        } catch (const NonConvergenceError&) {
          fail[6] = 1;
        }
      });

      for (std::size_t m = 0; m < kNMethods; ++m) {
        std::size_t n_rej = 0, n_fail = 0;
        for (std::size_t rep = 0; rep < n_reps; ++rep) {
          n_rej += reject[rep][m];
          n_fail += failed[rep][m];
        }
        const double p_hat =
            static_cast<double>(n_rej) / static_cast<double>(n_reps);
        const double f_hat =
            static_cast<double>(n_fail) / static_cast<double>(n_reps);
        rows.push_back({scenario, "h", h, method_names[m], p_hat,
                        binomial_se(p_hat, n_reps), n_reps, seed});
        rows.push_back({scenario, "h", h,
                        std::string(method_names[m]) + ":nonconv", f_hat,
                        binomial_se(f_hat, n_reps), n_reps, seed});
      }
    }
  }
  return rows;
}

}  // namespace usplit::sim
