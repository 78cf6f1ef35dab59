#include "comex/run_trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <stdexcept>

namespace comex {

RunStreams RunStreams::derive(std::uint64_t master_seed) {
  auto stream = [master_seed](std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32), tag};
    return Rng(seq);
  };
  return {stream(0x1A57A4CEu), stream(0xAC915u), stream(0x9015Eu)};
}

bool clock_exhausted(const StopRule& rule, const RunTrace& trace) {
  if (!rule.wall_clock_seconds) return false;
  double used = 0.0;
  for (const auto& r : trace.rows) {
    switch (rule.clock) {
      case BudgetClock::kAlgorithm: used += r.algorithm_seconds(); break;
      case BudgetClock::kOracle: used += r.oracle_seconds; break;
      case BudgetClock::kTotal: used += r.algorithm_seconds() + r.oracle_seconds; break;
    }
  }
  return used >= *rule.wall_clock_seconds;
}

std::vector<double> RunTrace::regrets() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.regret);
  return out;
}

TraceRecorder::TraceRecorder(std::string algorithm, const ScaledOracle& oracle, std::uint64_t seed) {
  trace_.algorithm = std::move(algorithm);
  trace_.problem = oracle.base().descriptor();
  trace_.seed = seed;
  trace_.regret_reference = oracle.regret_reference();
  trace_.best_scaled = std::numeric_limits<double>::infinity();
  best_regret_ = std::numeric_limits<double>::infinity();
  reference_is_level_ = oracle.reference_is_level();
}

void TraceRecorder::record(const SpinPoint& x, const Observation& obs, double acquisition_seconds,
                           double update_seconds, double oracle_seconds) {
  if (reference_is_level_ && obs.scaled < trace_.regret_reference) {
    throw std::runtime_error("observed value " + std::to_string(obs.scaled) +
                             " lies below the reference level; choose a lower level");
  }
  TraceRow row;
  row.step = trace_.rows.size() + 1;
  row.query = x;
  row.raw = obs.raw;
  row.scaled = obs.scaled;
  if (obs.scaled < trace_.best_scaled) {
    trace_.best_scaled = obs.scaled;
    trace_.best_point = x;
  }
  row.best_scaled = trace_.best_scaled;
  best_regret_ = std::min(best_regret_, std::fabs(obs.scaled - trace_.regret_reference));
  row.regret = best_regret_;
  row.acquisition_seconds = acquisition_seconds;
  row.update_seconds = update_seconds;
  row.oracle_seconds = oracle_seconds;
  trace_.rows.push_back(std::move(row));
}

std::vector<double> simple_regret(const RunTrace& trace, double f_star, bool reference_is_level) {
  std::vector<double> out;
  out.reserve(trace.rows.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.rows) {
    if (reference_is_level && r.scaled < f_star) {
      throw std::invalid_argument("simple_regret: reference level lies above an observed value");
    }
    best = std::min(best, std::fabs(r.scaled - f_star));
    out.push_back(best);
  }
  return out;
}

}  // namespace comex
