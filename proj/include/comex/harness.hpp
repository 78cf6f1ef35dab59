#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "comex/expert_surrogate.hpp"
#include "comex/oracle.hpp"
#include "comex/run_trace.hpp"

namespace comex {

struct ComexOptions {
  std::size_t m = 2;
  double lambda = 1.0;
  double omega = 1.0;
  std::size_t inner_iters = 0;  // 0 means 20 d
  RateMode eta = AdaptiveRate{};
  bool warm_start = false;  // start SA from the incumbent instead of a fresh uniform point
  bool dedup = false;       // re-run SA once if it returns an already evaluated point
  std::size_t chains = 1;   // independent SA chains per step; the best final score wins
};

// The COMEX outer loop: acquire by annealing over the surrogate, observe, update.
// An oracle failure stops the run and leaves the message in trace.error.
RunTrace run_comex(const Oracle& oracle, const ComexOptions& opts, const StopRule& stop, RunStreams& streams,
                   std::uint64_t seed = 0);

// --- experiments ---------------------------------------------------------------

struct ExperimentConfig {
  std::string problem = "nqueens";  // nqueens | contamination | ising
  std::size_t n = 5;                // board size for nqueens
  std::size_t d = 21;               // stages for contamination
  std::size_t ising_rows = 4;
  std::size_t ising_cols = 4;
  double lambda_reg = 0.01;
  double noise_sigma = 0.02;  // nqueens observation noise
  std::size_t mc_paths = 100;
  std::string instance_path;  // when set, the instance is read from this file for every seed

  std::string algorithm = "comex";  // comex | rs | sa
  ComexOptions comex;
  std::size_t eval_budget = 250;
  std::optional<double> wall_clock_seconds;
  BudgetClock budget_clock = BudgetClock::kTotal;
  std::vector<std::uint64_t> seeds{0};

  std::string output_path;
  std::string output_format = "csv";  // csv | json

  // Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

// "0..9", "1,2,5" or a mix such as "0..3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text);
std::string format_seeds(const std::vector<std::uint64_t>& seeds);

std::string budget_clock_name(BudgetClock c);
BudgetClock parse_budget_clock(const std::string& s);
// "adaptive" or a positive number.
RateMode parse_rate_mode(const std::string& s);
std::string rate_mode_name(const RateMode& mode);

std::unique_ptr<Oracle> make_oracle(const ExperimentConfig& config, Rng& instance_rng);

RunTrace run_single(const ExperimentConfig& config, std::uint64_t seed);

// One trace per seed, in seed order. Seeds run on worker threads; COMEX_THREADS
// caps the worker count.
std::vector<RunTrace> run_experiment(const ExperimentConfig& config);

std::size_t worker_count(std::size_t jobs);

// --- aggregation -----------------------------------------------------------------

struct Summary {
  std::vector<std::size_t> steps;
  std::vector<double> mean_regret;
  std::vector<double> stderr_regret;
  std::vector<double> mean_step_time;  // algorithm seconds only, oracle time excluded
  std::vector<bool> padded;            // per trace: shorter than the longest and carried forward
  std::vector<double> final_regrets;
  double final_mean = 0.0;
  double final_stderr = 0.0;
  double final_median = 0.0;
  double mean_algorithm_seconds = 0.0;  // over every recorded step of every trace

  [[nodiscard]] std::size_t n_traces() const { return final_regrets.size(); }
};

double mean(const std::vector<double>& v);
double median(std::vector<double> v);
// Sample standard deviation over sqrt(k); 0 for a single value.
double standard_error(const std::vector<double>& v);

// Throws std::invalid_argument for an empty list or a trace without rows.
Summary summarize(const std::vector<RunTrace>& traces);

void write_summary_csv(std::ostream& os, const Summary& s);
// Reads back the per-step columns of write_summary_csv.
Summary read_summary_csv(std::istream& is);

void write_json(std::ostream& os, const ExperimentConfig& config, const Summary& s,
                const std::vector<RunTrace>& traces);

// Writes csv or json to config.output_path; throws std::runtime_error on IO failure.
void export_results(const ExperimentConfig& config, const Summary& s, const std::vector<RunTrace>& traces);

}  // namespace comex
