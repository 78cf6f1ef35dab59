#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comex/boolean_domain.hpp"
#include "comex/oracle.hpp"

namespace comex {

enum class BudgetClock { kAlgorithm, kOracle, kTotal };

// Evaluation budget plus an optional wall-clock budget, checked between steps.
struct StopRule {
  std::size_t eval_budget = 250;
  std::optional<double> wall_clock_seconds;
  BudgetClock clock = BudgetClock::kTotal;
};

// Independent random streams spawned from one master seed, so that the problem
// instance does not depend on which algorithm consumes the other streams.
struct RunStreams {
  Rng instance;
  Rng acquisition;
  Rng noise;
  static RunStreams derive(std::uint64_t master_seed);
};

struct TraceRow {
  std::size_t step = 0;  // 1-based
  SpinPoint query;
  double raw = 0.0;
  double scaled = 0.0;
  double best_scaled = 0.0;  // min scaled value through this step
  double regret = 0.0;       // min_{i<=t} |scaled_i - reference|
  double update_seconds = 0.0;
  double acquisition_seconds = 0.0;
  double oracle_seconds = 0.0;
  [[nodiscard]] double algorithm_seconds() const { return update_seconds + acquisition_seconds; }
};

struct RunTrace {
  std::string algorithm;
  std::string problem;
  std::uint64_t seed = 0;
  double regret_reference = -1.0;
  std::vector<TraceRow> rows;
  SpinPoint best_point;  // argmin of the observed values
  double best_scaled = 0.0;
  bool stopped_by_clock = false;
  std::optional<std::string> error;  // set when the run aborted; rows hold the partial trace

  [[nodiscard]] std::size_t size() const { return rows.size(); }
  [[nodiscard]] std::vector<double> regrets() const;
};

// True once the wall-clock budget of `rule` is used up by the recorded rows.
bool clock_exhausted(const StopRule& rule, const RunTrace& trace);

// Appends rows while maintaining best-so-far, argmin and regret.
class TraceRecorder {
 public:
  TraceRecorder(std::string algorithm, const ScaledOracle& oracle, std::uint64_t seed);

  void record(const SpinPoint& x, const Observation& obs, double acquisition_seconds, double update_seconds,
              double oracle_seconds);
  [[nodiscard]] const RunTrace& trace() const { return trace_; }
  RunTrace take() { return std::move(trace_); }
  RunTrace& mutable_trace() { return trace_; }

 private:
  RunTrace trace_;
  double best_regret_ = 0.0;
  bool reference_is_level_ = false;
};

// R_t = min_{i<=t} |y_i - f_star| for the scaled values y_i of a trace. When
// `reference_is_level` is set, a value below f_star is an error: the level must
// sit under every observation.
std::vector<double> simple_regret(const RunTrace& trace, double f_star, bool reference_is_level = false);

}  // namespace comex
