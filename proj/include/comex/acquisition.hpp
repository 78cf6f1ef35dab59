#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "comex/boolean_domain.hpp"
#include "comex/expert_surrogate.hpp"

namespace comex {

// s(t) = exp(-omega t / d)
struct AnnealSchedule {
  double omega = 1.0;
  std::size_t d = 1;
};

double anneal_schedule(const AnnealSchedule& sched, double t);

// Something SA can minimize. value() scores a full point; value_after_flip()
// scores x with spin i flipped, given fx = value(x). x is never modified.
template <typename S>
concept PointScorer = requires(const S& s, const SpinPoint& x, double fx, std::size_t i) {
  { s.value(x) } -> std::convertible_to<double>;
  { s.value_after_flip(x, fx, i) } -> std::convertible_to<double>;
};

// Wraps a plain point -> real function; flips are scored by full recomputation.
class FunctionScorer {
 public:
  explicit FunctionScorer(std::function<double(const SpinPoint&)> f) : f_(std::move(f)) {}
  [[nodiscard]] double value(const SpinPoint& x) const { return f_(x); }
  [[nodiscard]] double value_after_flip(const SpinPoint& x, double, std::size_t i) const {
    return f_(x.flipped(i));
  }

 private:
  std::function<double(const SpinPoint&)> f_;
};

// Scores points by the surrogate prediction using the inverted-index flip delta.
class SurrogateScorer {
 public:
  explicit SurrogateScorer(const SurrogateModel& model) : model_(&model) {}
  [[nodiscard]] double value(const SpinPoint& x) const { return predict(*model_, x); }
  [[nodiscard]] double value_after_flip(const SpinPoint& x, double fx, std::size_t i) const {
    return predict_flip_delta(*model_, x, fx, i);
  }

 private:
  const SurrogateModel* model_;
};

struct AnnealStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t uphill_accepted = 0;
  double final_score = 0.0;
};

// Keeps the +1 / -1 coordinate lists of a sum-constrained point so swap moves
// can be drawn in O(1).
class SwapSampler {
 public:
  explicit SwapSampler(const SpinPoint& x);
  [[nodiscard]] Move draw(Rng& rng) const;
  void commit(const Move& mv);  // after apply_move on the tracked point

 private:
  std::vector<std::size_t> plus_;
  std::vector<std::size_t> minus_;
  std::vector<std::size_t> slot_;  // position of each coordinate inside its list
};

// Simulated annealing over `score` starting from x_init; runs n_iters proposals
// and returns the final state. Downhill and level moves are always accepted,
// uphill moves with probability exp(-delta / s(t)) where t counts proposals.
template <PointScorer Scorer>
SpinPoint simulated_annealing(const Scorer& score, const ConstraintSet& c, const AnnealSchedule& sched,
                              std::size_t n_iters, const SpinPoint& x_init, Rng& rng,
                              AnnealStats* stats = nullptr) {
  if (!contains(c, x_init)) throw std::invalid_argument("simulated_annealing: x_init is not in the constraint set");
  SpinPoint x = x_init;
  double fx = score.value(x);
  AnnealStats local;
  if (n_iters == 0) {
    local.final_score = fx;
    if (stats) *stats = local;
    return x;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const bool swaps = c.is_sum_constrained();
  std::optional<SwapSampler> sampler;
  if (swaps) sampler.emplace(x);
  std::uniform_int_distribution<std::size_t> pick(0, c.dim() - 1);

  for (std::size_t t = 0; t < n_iters; ++t) {
    Move mv;
    double fz = 0.0;
    if (swaps) {
      mv = sampler->draw(rng);
      // Score the swap as two chained flips.
      const double mid = score.value_after_flip(x, fx, mv.first);
      x.flip(mv.first);
      fz = score.value_after_flip(x, mid, mv.second);
      x.flip(mv.first);
    } else {
      mv = Move{pick(rng), 0, false};
      fz = score.value_after_flip(x, fx, mv.first);
    }
    ++local.proposals;
    bool accept = fz <= fx;
    if (!accept) {
      const double temp = anneal_schedule(sched, static_cast<double>(t));
      accept = unif(rng) <= std::exp(-(fz - fx) / temp);
      if (accept) ++local.uphill_accepted;
    }
    if (accept) {
      apply_move(x, mv);
      if (swaps) sampler->commit(mv);
      fx = fz;
      ++local.accepted;
    }
  }
  local.final_score = fx;
  if (stats) *stats = local;
  return x;
}

// Exact Boltzmann distribution exp(-f(x)/T)/Z over all 2^d points, indexed as
// in point_from_index. Audit-only: d is capped at 20.
struct AcquisitionPmf {
  double temperature = 1.0;
  std::vector<double> probabilities;
  double log_partition = 0.0;
  [[nodiscard]] double partition() const { return std::exp(log_partition); }
};

inline constexpr std::size_t kMaxEnumerationDim = 20;

AcquisitionPmf exponential_pmf(const std::function<double(const SpinPoint&)>& f, std::size_t d, double temperature);
AcquisitionPmf exponential_pmf_from_values(std::span<const double> values, double temperature);

// sum p log(p/q) over a common support.
double pmf_kl(const AcquisitionPmf& p, const AcquisitionPmf& q);

}  // namespace comex
