#include "comex/baselines.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "comex/acquisition.hpp"

namespace comex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_budget(const StopRule& stop) {
  if (stop.eval_budget < 1) throw std::invalid_argument("evaluation budget must be at least 1");
}

}  // namespace

RunTrace random_search(const Oracle& oracle, const StopRule& stop, RunStreams& streams, std::uint64_t seed) {
  check_budget(stop);
  const ScaledOracle scaled(oracle);
  TraceRecorder rec("rs", scaled, seed);
  const auto& c = oracle.constraint();
  for (std::size_t t = 0; t < stop.eval_budget; ++t) {
    auto t0 = Clock::now();
    const SpinPoint x = sample_uniform(c, streams.acquisition);
    const double acq = seconds_since(t0);
    t0 = Clock::now();
    Observation obs;
    try {
      obs = scaled.observe(x, streams.noise);
    } catch (const std::exception& e) {
      rec.mutable_trace().error = e.what();
      break;
    }
    rec.record(x, obs, acq, 0.0, seconds_since(t0));
    if (clock_exhausted(stop, rec.trace())) {
      rec.mutable_trace().stopped_by_clock = t + 1 < stop.eval_budget;
      break;
    }
  }
  return rec.take();
}

RunTrace simulated_annealing_direct(const Oracle& oracle, const StopRule& stop, double omega, RunStreams& streams,
                                    std::uint64_t seed) {
  check_budget(stop);
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  const ScaledOracle scaled(oracle);
  TraceRecorder rec("sa", scaled, seed);
  const auto& c = oracle.constraint();
  const AnnealSchedule sched{omega, c.dim()};
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto t0 = Clock::now();
  SpinPoint x = sample_uniform(c, streams.acquisition);
  double acq = seconds_since(t0);
  double fx = 0.0;
  for (std::size_t t = 0; t < stop.eval_budget; ++t) {
    SpinPoint z = x;
    if (t > 0) {
      t0 = Clock::now();
      z = sample_neighbor(c, x, streams.acquisition);
      acq = seconds_since(t0);
    }
    t0 = Clock::now();
    Observation obs;
    try {
      obs = scaled.observe(z, streams.noise);
    } catch (const std::exception& e) {
      rec.mutable_trace().error = e.what();
      break;
    }
    const double oracle_s = seconds_since(t0);
    t0 = Clock::now();
    if (t == 0) {
      fx = obs.scaled;
    } else if (obs.scaled <= fx ||
               unif(streams.acquisition) <= std::exp(-(obs.scaled - fx) / anneal_schedule(sched, static_cast<double>(t)))) {
      x = z;
      fx = obs.scaled;
    }
    acq += seconds_since(t0);
    rec.record(z, obs, acq, 0.0, oracle_s);
    if (clock_exhausted(stop, rec.trace())) {
      rec.mutable_trace().stopped_by_clock = t + 1 < stop.eval_budget;
      break;
    }
  }
  return rec.take();
}

}  // namespace comex
