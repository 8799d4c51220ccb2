// usplit: command-line driver for the split likelihood-ratio testing
// library.  Subcommands draw from the limiting distribution, evaluate its
// closed-form moments, search for optimal data-splitting ratios, and run the
// simulation studies, emitting CSV to stdout or to --out <path>.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence.
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "usplit/ratio.hpp"
#include "usplit/rng.hpp"
#include "usplit/sim/csv.hpp"
#include "usplit/sim/harness.hpp"
#include "usplit/splitchisq.hpp"
#include "usplit/types.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::size_t reps = 0;  // 0 = per-subcommand default
  double alpha = 0.05;
  int threads = 1;
  std::string out;
};

// Every subcommand accepts the shared flags; binding them per subcommand
// keeps "usplit <cmd> --seed 3" natural.
void add_globals(CLI::App* sub, GlobalOpts* g) {
  sub->add_option("--seed", g->seed, "Random seed")->capture_default_str();
  sub->add_option("--reps", g->reps,
                  "Replications (0 = subcommand default)")
      ->capture_default_str();
  sub->add_option("--alpha", g->alpha, "Significance level")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12))
      ->capture_default_str();
  sub->add_option("--threads", g->threads, "Worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  sub->add_option("--out", g->out,
                  "Output path (written atomically; empty = stdout)");
}

std::size_t reps_or(const GlobalOpts& g, std::size_t fallback) {
  return g.reps == 0 ? fallback : g.reps;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    usplit::sim::write_text_atomic(out_path, text);
  }
}

struct LimitOpts {
  std::size_t d = 6;
  std::size_t p = 3;
  double m0 = 0.5;
  double delta = 0.0;
  bool crossfit = false;
  double w0 = 0.5;
};

void add_limit_params(CLI::App* sub, LimitOpts* o) {
  sub->add_option("--d", o->d, "Dimension of the full model")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--p", o->p, "Constrained coordinates (0..d)")
      ->capture_default_str();
  sub->add_option("--m0", o->m0, "Splitting ratio in (0,1)")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  sub->add_option("--delta", o->delta, "Noncentrality (squared shift norm)")
      ->capture_default_str();
  sub->add_flag("--crossfit", o->crossfit,
                "Cross-fit statistic instead of the one-way split");
  sub->add_option("--w0", o->w0, "Cross-fit weight on the forward term")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

int run_sample(const GlobalOpts& g, const LimitOpts& o) {
  const auto params = usplit::make_params(o.d, o.p, o.m0, o.delta);
  const std::size_t n = reps_or(g, 100000);
  usplit::LimitBatch batch(o.d, o.p, n, g.seed,
                           usplit::random::stream_tag("cli-sample"),
                           g.threads);
  std::vector<double> draws(n);
  if (o.crossfit) {
    batch.crossfit_draws(params.m0, params.delta, o.w0, draws.data());
  } else {
    batch.split_draws(params.m0, params.delta, draws.data());
  }
  std::string text = "draw\n";
  for (const double x : draws) {
    text += usplit::sim::format_g17(x);
    text += '\n';
  }
  emit(g.out, text);
  return 0;
}

int run_moments(const GlobalOpts& g, const LimitOpts& o) {
  const auto params = usplit::make_params(o.d, o.p, o.m0, o.delta);
  const usplit::MomentSummary m =
      o.crossfit ? usplit::crossfit_limit_moments(params, o.w0)
                 : usplit::split_limit_moments(params);
  std::string text = "mean,variance\n";
  text += usplit::sim::format_g17(m.mean);
  text += ',';
  text += usplit::sim::format_g17(m.variance);
  text += '\n';
  emit(g.out, text);
  return 0;
}

struct QuantileOpts {
  std::size_t d = 6;
  std::vector<std::size_t> p_list{1, 3, 6};
  std::vector<double> m0_grid;
  std::vector<double> alphas{0.1, 0.05, 0.01};
};

int run_quantile(const GlobalOpts& g, const QuantileOpts& o) {
  std::vector<double> m0_grid = o.m0_grid;
  if (m0_grid.empty()) {
    for (int i = 1; i <= 9; ++i) m0_grid.push_back(0.1 * i);
  }
  const auto rows = usplit::sim::run_quantile_study(
      o.d, o.p_list, m0_grid, o.alphas, reps_or(g, 100000), g.seed,
      g.threads);
  emit(g.out, usplit::sim::render_csv(rows));
  return 0;
}

struct OptimalSplitOpts {
  std::size_t d = 6;
  std::size_t k = 0;
  std::string method = "algo1";
  double grid_step = 0.01;
  double target_power = 0.8;
};

int run_optimal_split(const GlobalOpts& g, const OptimalSplitOpts& o) {
  if (o.k > o.d) {
    throw std::invalid_argument("optimal-split: --k must be in [0, d]");
  }
  const std::size_t p = o.d - o.k;
  usplit::SplitSearchConfig cfg;
  cfg.alpha = g.alpha;
  cfg.target_power = o.target_power;
  cfg.grid_step = o.grid_step;
  cfg.n_reps = reps_or(g, 100000);
  cfg.seed = g.seed;
  cfg.threads = g.threads;

  const double nan = std::nan("");
  usplit::SplitRatioResult res;
  if (o.method == "algo1") {
    res = usplit::optimal_split_normal(o.d, p, cfg);
  } else if (o.method == "mc") {
    res = usplit::optimal_split_mc(o.d, p, cfg);
  } else if (o.method == "crossfit") {
    res = usplit::optimal_split_crossfit(o.d, p, cfg);
  } else if (o.method == "eq5") {
    res.m0_opt = usplit::worst_case_split(o.d, g.alpha);
    res.achieved_power = nan;
    res.delta_used = nan;
  } else {  // "thumb" (the option validator admits nothing else)
    res.m0_opt = usplit::rule_of_thumb_split(o.d, o.k);
    res.achieved_power = nan;
    res.delta_used = nan;
  }
  std::string text = "m0_opt,achieved_power,delta_used\n";
  text += usplit::sim::format_g17(res.m0_opt);
  text += ',';
  text += usplit::sim::format_g17(res.achieved_power);
  text += ',';
  text += usplit::sim::format_g17(res.delta_used);
  text += '\n';
  emit(g.out, text);
  return 0;
}

struct PowerVsNOpts {
  std::size_t d = 6;
  std::size_t k = 0;
  double theta = 0.1;
  std::vector<std::size_t> n_grid{50, 100, 200, 400, 800};
  std::vector<double> m0_list{0.5};
};

int run_power_vs_n_cmd(const GlobalOpts& g, const PowerVsNOpts& o) {
  const auto rows = usplit::sim::run_power_vs_n(
      o.d, o.k, o.theta, o.n_grid, o.m0_list, g.alpha, reps_or(g, 10000),
      g.seed, g.threads);
  emit(g.out, usplit::sim::render_csv(rows));
  return 0;
}

struct PowerVsSplitOpts {
  std::size_t d = 6;
  std::vector<std::size_t> p_list{1, 3, 6};
  double delta = 40.0;
  std::vector<double> m0_grid;
};

int run_power_vs_split_cmd(const GlobalOpts& g, const PowerVsSplitOpts& o) {
  std::vector<double> m0_grid = o.m0_grid;
  if (m0_grid.empty()) {
    for (int i = 1; i <= 19; ++i) m0_grid.push_back(0.05 * i);
  }
  const auto rows = usplit::sim::run_power_vs_split(
      o.d, o.p_list, o.delta, g.alpha, m0_grid, reps_or(g, 100000), g.seed,
      g.threads);
  emit(g.out, usplit::sim::render_csv(rows));
  return 0;
}

struct SplitComparisonOpts {
  std::vector<std::size_t> d_grid{6, 12, 24, 48, 96};
  std::string k_rule = "k5";
  bool calibrate = false;
  double delta = 100.0;
  double target_power = 0.8;
};

int run_split_comparison(const GlobalOpts& g, const SplitComparisonOpts& o) {
  const usplit::sim::KRule k_rule = o.k_rule == "k5"
                                        ? usplit::sim::KRule::fixed_five
                                        : usplit::sim::KRule::d_over_six;
  usplit::sim::DeltaRule rule;
  rule.calibrated = o.calibrate;
  rule.value = o.calibrate ? o.target_power : o.delta;
  const auto rows = usplit::sim::run_optimal_split_comparison(
      o.d_grid, k_rule, g.alpha, rule, reps_or(g, 100000), g.seed, g.threads);
  emit(g.out, usplit::sim::render_csv(rows));
  return 0;
}

struct FactorStudyOpts {
  std::vector<double> h_grid{0.0, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::size_t n = 2000;
};

int run_factor_study_cmd(const GlobalOpts& g, const FactorStudyOpts& o) {
  const auto rows = usplit::sim::run_factor_study(
      o.h_grid, o.n, g.alpha, reps_or(g, 1000), g.seed, g.threads);
  emit(g.out, usplit::sim::render_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Split likelihood-ratio testing toolkit: limit-law sampling, "
      "split-ratio selection, and simulation studies emitting CSV."};
  app.require_subcommand(1);

  GlobalOpts g;

  LimitOpts sample_opts;
  CLI::App* sample_cmd = app.add_subcommand(
      "sample", "Draw replications of the limiting distribution");
  add_limit_params(sample_cmd, &sample_opts);
  add_globals(sample_cmd, &g);

  LimitOpts moments_opts;
  CLI::App* moments_cmd = app.add_subcommand(
      "moments", "Closed-form mean and variance of the limit");
  add_limit_params(moments_cmd, &moments_opts);
  add_globals(moments_cmd, &g);

  QuantileOpts quantile_opts;
  CLI::App* quantile_cmd = app.add_subcommand(
      "quantile", "Null-limit quantiles vs the e-value threshold");
  quantile_cmd->add_option("--d", quantile_opts.d, "Dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  quantile_cmd->add_option("--p", quantile_opts.p_list, "Constrained counts")
      ->delimiter(',')
      ->capture_default_str();
  quantile_cmd
      ->add_option("--m0", quantile_opts.m0_grid,
                   "Splitting ratios (default 0.1..0.9 step 0.1)")
      ->delimiter(',');
  quantile_cmd->add_option("--alphas", quantile_opts.alphas,
                           "Significance levels")
      ->delimiter(',')
      ->capture_default_str();
  add_globals(quantile_cmd, &g);

  OptimalSplitOpts opt_opts;
  CLI::App* opt_cmd = app.add_subcommand(
      "optimal-split", "Pick a splitting ratio by one of five methods");
  opt_cmd->add_option("--d", opt_opts.d, "Dimension of the full model")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  opt_cmd->add_option("--k", opt_opts.k, "Null-model dimension (p = d - k)")
      ->capture_default_str();
  opt_cmd
      ->add_option("--method", opt_opts.method,
                   "algo1 | mc | eq5 | thumb | crossfit")
      ->check(CLI::IsMember({"algo1", "mc", "eq5", "thumb", "crossfit"}))
      ->capture_default_str();
  opt_cmd->add_option("--grid-step", opt_opts.grid_step, "Search grid step")
      ->check(CLI::Range(1e-4, 0.5))
      ->capture_default_str();
  opt_cmd
      ->add_option("--target-power", opt_opts.target_power,
                   "Power the calibrated noncentrality must reach")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6))
      ->capture_default_str();
  add_globals(opt_cmd, &g);

  PowerVsNOpts pvn_opts;
  CLI::App* pvn_cmd = app.add_subcommand(
      "power-vs-n", "Gaussian-location power against sample size");
  pvn_cmd->add_option("--d", pvn_opts.d, "Dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pvn_cmd->add_option("--k", pvn_opts.k, "Unconstrained coordinates")
      ->capture_default_str();
  pvn_cmd->add_option("--theta", pvn_opts.theta, "Common mean entry")
      ->capture_default_str();
  pvn_cmd->add_option("--n", pvn_opts.n_grid, "Sample sizes")
      ->delimiter(',')
      ->capture_default_str();
  pvn_cmd->add_option("--m0", pvn_opts.m0_list, "Splitting ratios")
      ->delimiter(',')
      ->capture_default_str();
  add_globals(pvn_cmd, &g);

  PowerVsSplitOpts pvs_opts;
  CLI::App* pvs_cmd = app.add_subcommand(
      "power-vs-split", "Limit-law power against the splitting ratio");
  pvs_cmd->add_option("--d", pvs_opts.d, "Dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  pvs_cmd->add_option("--p", pvs_opts.p_list, "Constrained counts")
      ->delimiter(',')
      ->capture_default_str();
  pvs_cmd->add_option("--delta", pvs_opts.delta, "Noncentrality")
      ->capture_default_str();
  pvs_cmd
      ->add_option("--m0", pvs_opts.m0_grid,
                   "Splitting ratios (default 0.05..0.95 step 0.05)")
      ->delimiter(',');
  add_globals(pvs_cmd, &g);

  SplitComparisonOpts cmp_opts;
  CLI::App* cmp_cmd = app.add_subcommand(
      "split-comparison",
      "Ratio-selection methods compared on limit-law power");
  cmp_cmd->add_option("--d", cmp_opts.d_grid, "Dimension grid")
      ->delimiter(',')
      ->capture_default_str();
  cmp_cmd
      ->add_option("--k-rule", cmp_opts.k_rule,
                   "k5 (k = 5) | kd6 (k = max(1, d/6))")
      ->check(CLI::IsMember({"k5", "kd6"}))
      ->capture_default_str();
  cmp_cmd->add_flag(
      "--calibrate", cmp_opts.calibrate,
      "Grow the noncentrality until the searched split hits --target-power");
  cmp_cmd->add_option("--delta", cmp_opts.delta, "Fixed noncentrality")
      ->capture_default_str();
  cmp_cmd
      ->add_option("--target-power", cmp_opts.target_power,
                   "Calibration target (with --calibrate)")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6))
      ->capture_default_str();
  add_globals(cmp_cmd, &g);

  FactorStudyOpts factor_opts;
  CLI::App* factor_cmd = app.add_subcommand(
      "factor-study", "One-factor analysis power study (12 variables)");
  // Long-only help so the single-letter grid flag --h stays available.
  factor_cmd->set_help_flag("--help", "Print this help message and exit");
  factor_cmd->add_option("--h", factor_opts.h_grid, "Second-factor strengths")
      ->delimiter(',')
      ->capture_default_str();
  factor_cmd->add_option("--n", factor_opts.n, "Observations per replication")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_globals(factor_cmd, &g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sample_cmd) return run_sample(g, sample_opts);
    if (*moments_cmd) return run_moments(g, moments_opts);
    if (*quantile_cmd) return run_quantile(g, quantile_opts);
    if (*opt_cmd) return run_optimal_split(g, opt_opts);
    if (*pvn_cmd) return run_power_vs_n_cmd(g, pvn_opts);
    if (*pvs_cmd) return run_power_vs_split_cmd(g, pvs_opts);
    if (*cmp_cmd) return run_split_comparison(g, cmp_opts);
    if (*factor_cmd) return run_factor_study_cmd(g, factor_opts);
  } catch (const usplit::NonConvergenceError& e) {
    std::fprintf(stderr, "usplit: non-convergence: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usplit: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "usplit: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
