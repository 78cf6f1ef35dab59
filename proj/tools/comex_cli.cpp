#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "comex/benchmarks.hpp"
#include "comex/expert_surrogate.hpp"
#include "comex/fourier_basis.hpp"
#include "comex/harness.hpp"
#include "comex/theory_audit.hpp"

namespace {

struct RunArgs {
  comex::ExperimentConfig cfg;
  std::string seeds = "0";
  std::string eta = "adaptive";
  std::string budget_clock = "total";
  double wall_clock = 0.0;
  std::string dump_instance;
};

void add_problem_options(CLI::App* app, comex::ExperimentConfig& c) {
  app->add_option("--problem", c.problem, "Benchmark: nqueens, contamination or ising")
      ->check(CLI::IsMember({"nqueens", "contamination", "ising"}))
      ->capture_default_str();
  app->add_option("--n", c.n, "Board size for nqueens")->capture_default_str();
  app->add_option("--d", c.d, "Number of stages for contamination")->capture_default_str();
  app->add_option("--rows", c.ising_rows, "Ising grid rows")->capture_default_str();
  app->add_option("--cols", c.ising_cols, "Ising grid columns")->capture_default_str();
  app->add_option("--lambda-reg", c.lambda_reg, "Sparsity penalty (ising, contamination)")->capture_default_str();
  app->add_option("--noise-sigma", c.noise_sigma, "Observation noise on the scaled axis (nqueens)")
      ->capture_default_str();
  app->add_option("--mc-paths", c.mc_paths, "Monte-Carlo paths (contamination)")->capture_default_str();
  app->add_option("--instance", c.instance_path, "Read the problem instance from this file");
}

void add_algorithm_options(CLI::App* app, RunArgs& a) {
  auto& c = a.cfg;
  app->add_option("--algo", c.algorithm, "Algorithm: comex, rs or sa")
      ->check(CLI::IsMember({"comex", "rs", "sa"}))
      ->capture_default_str();
  app->add_option("--m", c.comex.m, "Maximum monomial degree")->capture_default_str();
  app->add_option("--lambda", c.comex.lambda, "Total weight mass")->capture_default_str();
  app->add_option("--omega", c.comex.omega, "Annealing rate in exp(-omega t / d)")->capture_default_str();
  app->add_option("--inner-iters", c.comex.inner_iters, "Annealing proposals per step (0 means 20 d)")
      ->capture_default_str();
  app->add_option("--eta", a.eta, "Learning rate: adaptive or a fixed positive number")->capture_default_str();
  app->add_flag("--warm-start", c.comex.warm_start, "Start annealing from the incumbent");
  app->add_flag("--dedup", c.comex.dedup, "Re-run annealing once when it returns an evaluated point");
  app->add_option("--chains", c.comex.chains, "Independent annealing chains per step")->capture_default_str();
  app->add_option("--budget", c.eval_budget, "Evaluation budget")->capture_default_str();
  app->add_option("--wall-clock", a.wall_clock, "Wall-clock budget in seconds (0 disables)")->capture_default_str();
  app->add_option("--budget-clock", a.budget_clock, "Clock charged to the wall-clock budget")
      ->check(CLI::IsMember({"algorithm", "oracle", "total"}))
      ->capture_default_str();
  app->add_option("--seeds", a.seeds, "Seed list, e.g. 0..9 or 1,2,5")->capture_default_str();
}

comex::ExperimentConfig finish(RunArgs& a) {
  a.cfg.seeds = comex::parse_seeds(a.seeds);
  a.cfg.comex.eta = comex::parse_rate_mode(a.eta);
  a.cfg.budget_clock = comex::parse_budget_clock(a.budget_clock);
  if (a.wall_clock > 0.0) a.cfg.wall_clock_seconds = a.wall_clock;
  a.cfg.validate();
  return a.cfg;
}

int cmd_run(RunArgs& a) {
  const comex::ExperimentConfig cfg = finish(a);
  if (!a.dump_instance.empty()) {
    auto streams = comex::RunStreams::derive(cfg.seeds.front());
    const auto oracle = comex::make_oracle(cfg, streams.instance);
    comex::save_instance_file(*oracle, a.dump_instance);
    std::cout << "wrote instance for seed " << cfg.seeds.front() << " to " << a.dump_instance << '\n';
  }
  const auto traces = comex::run_experiment(cfg);
  for (const auto& tr : traces) {
    std::cout << "seed " << tr.seed << ": steps " << tr.size() << ", final regret " << tr.rows.back().regret
              << ", best " << tr.best_point.to_string();
    if (tr.error) std::cout << ", aborted: " << *tr.error;
    std::cout << '\n';
  }
  const comex::Summary s = comex::summarize(traces);
  std::printf("final regret: mean %.6g, stderr %.6g, median %.6g; mean step time %.3g s\n", s.final_mean,
              s.final_stderr, s.final_median, s.mean_algorithm_seconds);
  if (!cfg.output_path.empty()) {
    comex::export_results(cfg, s, traces);
    std::cout << "wrote " << cfg.output_path << '\n';
  }
  for (const auto& tr : traces) {
    if (tr.error) return 3;
  }
  return 0;
}

int cmd_lemma1(const comex::Lemma1Config& cfg, bool quiet) {
  const comex::Lemma1Report r = comex::lemma1_audit(cfg);
  if (!quiet) {
    for (const auto& st : r.steps) {
      std::printf("step %zu %s drop %.6e bound %.6e\n", st.step, st.holds ? "PASS" : "FAIL", st.drop(), st.bound);
    }
  }
  std::printf("%s: %zu of %zu steps violate the bound (p = %zu, worst margin %.3e)\n", r.all_hold() ? "PASS" : "FAIL",
              r.violations, r.steps.size(), r.p, r.worst_margin);
  return r.all_hold() ? 0 : 1;
}

struct Theorem1Args {
  std::size_t d = 6;
  std::size_t m = 2;
  double temperature = 1.0;
  double eta = 0.01;
  std::size_t warmup = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

int cmd_theorem1(const Theorem1Args& a) {
  comex::Rng rng(a.seed);
  auto basis = std::make_shared<const comex::MonomialBasis>(a.d, a.m);
  const std::vector<double> target = comex::sample_simplex(basis->size(), rng);
  comex::SurrogateModel model = comex::init_model(basis, 1.0);
  comex::LearningRateState lr;
  lr.mode = comex::FixedRate{a.eta};
  const auto c = comex::ConstraintSet::unconstrained(a.d);
  for (std::size_t t = 0; t < a.warmup; ++t) {
    const comex::SpinPoint x = comex::sample_uniform(c, rng);
    comex::update(model, lr, x, comex::evaluate_polynomial(*basis, target, x));
  }
  const auto r = comex::theorem1_audit(model, target, a.temperature, a.eta, a.trials, a.seed);
  for (const auto& v : r.precondition_violations) std::cout << "precondition: " << v << '\n';
  std::printf("epsilon %.6e expected drop %.6e bound %.6e\n", r.epsilon, r.expected_drop, r.bound);
  if (r.sampled_drop) std::printf("sampled drop %.6e over %zu trials\n", *r.sampled_drop, a.trials);
  std::printf("%s\n", r.holds() ? "PASS" : "FAIL");
  return r.holds() ? 0 : 1;
}

int cmd_bench(RunArgs& a, std::size_t window) {
  comex::ExperimentConfig cfg = finish(a);
  cfg.algorithm = "comex";
  if (cfg.eval_budget < 2 * window) throw std::invalid_argument("budget must cover two windows");
  for (std::uint64_t seed : cfg.seeds) {
    const comex::RunTrace tr = comex::run_single(cfg, seed);
    if (tr.size() < 2 * window) throw std::runtime_error("run stopped before two full windows");
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < window; ++i) {
      head += tr.rows[i].algorithm_seconds();
      tail += tr.rows[tr.size() - window + i].algorithm_seconds();
    }
    head /= static_cast<double>(window);
    tail /= static_cast<double>(window);
    std::printf("seed %llu: first %zu steps %.3e s/step, last %zu steps %.3e s/step, ratio %.3f\n",
                static_cast<unsigned long long>(seed), window, head, window, tail, tail / head);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Black-box minimization over the Boolean hypercube with exponential-weight surrogates"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_config("--config", "", "Read options from a TOML file; run options go under [run]");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an algorithm on a benchmark over several seeds");
  run->fallthrough();
  add_problem_options(run, run_args.cfg);
  add_algorithm_options(run, run_args);
  run->add_option("--out", run_args.cfg.output_path, "Write results to this path");
  run->add_option("--format", run_args.cfg.output_format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  run->add_option("--dump-instance", run_args.dump_instance, "Save the instance of the first seed to this path");

  comex::Lemma1Config l1;
  bool l1_quiet = false;
  auto* lemma = app.add_subcommand("audit-lemma1", "Check the per-step potential drop of fixed-rate updates");
  lemma->add_option("--d", l1.d, "Dimension")->capture_default_str();
  lemma->add_option("--m", l1.m, "Maximum degree")->capture_default_str();
  lemma->add_option("--eta", l1.eta, "Learning rate, below 1/(8 lambda)")->capture_default_str();
  lemma->add_option("--lambda", l1.lambda, "Total weight mass")->capture_default_str();
  lemma->add_option("--steps", l1.steps, "Updates")->capture_default_str();
  lemma->add_option("--seed", l1.seed, "Seed")->capture_default_str();
  lemma->add_flag("--quiet", l1_quiet, "Print only the summary line");

  Theorem1Args t1;
  auto* theorem = app.add_subcommand("audit-theorem1", "Check the expected potential drop under exponential acquisition");
  theorem->add_option("--d", t1.d, "Dimension (at most 12)")->capture_default_str();
  theorem->add_option("--m", t1.m, "Maximum degree")->capture_default_str();
  theorem->add_option("--T", t1.temperature, "Acquisition temperature")->capture_default_str();
  theorem->add_option("--eta", t1.eta, "Learning rate")->capture_default_str();
  theorem->add_option("--warmup", t1.warmup, "Updates applied before the audit")->capture_default_str();
  theorem->add_option("--trials", t1.trials, "Monte-Carlo draws for a sampled estimate")->capture_default_str();
  theorem->add_option("--seed", t1.seed, "Seed")->capture_default_str();

  RunArgs bench_args;
  bench_args.cfg.problem = "contamination";
  bench_args.cfg.eval_budget = 500;
  std::size_t window = 100;
  auto* bench = app.add_subcommand("bench-step-time", "Compare per-step algorithm time early and late in a run");
  add_problem_options(bench, bench_args.cfg);
  add_algorithm_options(bench, bench_args);
  bench->add_option("--window", window, "Steps per window")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (lemma->parsed()) return cmd_lemma1(l1, l1_quiet);
    if (theorem->parsed()) return cmd_theorem1(t1);
    if (bench->parsed()) return cmd_bench(bench_args, window);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
