#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "comex/boolean_domain.hpp"

namespace comex {

// The objective is known to lie in [min, max]; values map affinely onto [-1, 1].
struct KnownRange {
  double min = 0.0;
  double max = 1.0;
};
// The minimum is unknown; regret is measured against a fixed level below every
// observed value. Values are passed through unscaled.
struct ReferenceLevel {
  double level = 0.0;
};
using ScaleBounds = std::variant<KnownRange, ReferenceLevel>;

// Black-box objective over a constraint set. evaluate() is the noiseless raw
// value; noise_sigma() > 0 declares additive Gaussian noise applied on the
// scaled axis.
class Oracle {
 public:
  virtual ~Oracle() = default;
  [[nodiscard]] virtual double evaluate(const SpinPoint& x) const = 0;
  [[nodiscard]] virtual const ConstraintSet& constraint() const = 0;
  [[nodiscard]] virtual std::string descriptor() const = 0;
  [[nodiscard]] virtual ScaleBounds scale_bounds() const = 0;
  [[nodiscard]] virtual double noise_sigma() const { return 0.0; }
  // Writes the frozen instance parameters; see instance_io.hpp.
  virtual void write_instance(std::ostream& os) const;
};

class ScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// y -> 2 (y - min) / (max - min) - 1. Throws ScaleError when max <= min.
double scale_value(const KnownRange& range, double y);

struct Observation {
  double raw = 0.0;     // noiseless objective value
  double scaled = 0.0;  // value on the comparison axis, noise included
};

// The scaled view of an oracle that every algorithm sees.
class ScaledOracle {
 public:
  explicit ScaledOracle(const Oracle& base);

  // Throws ScaleError if a Known range is violated by the raw value.
  Observation observe(const SpinPoint& x, Rng& noise_rng) const;
  [[nodiscard]] double scale(double raw) const;
  // -1 for a known range, the level itself otherwise.
  [[nodiscard]] double regret_reference() const;
  [[nodiscard]] bool reference_is_level() const { return std::holds_alternative<ReferenceLevel>(bounds_); }
  [[nodiscard]] const Oracle& base() const { return *base_; }
  [[nodiscard]] const ConstraintSet& constraint() const { return base_->constraint(); }

 private:
  const Oracle* base_;
  ScaleBounds bounds_;
};

ScaledOracle scale(const Oracle& oracle);

// Plain function oracle, mostly for tests and toy problems.
class FunctionOracle : public Oracle {
 public:
  FunctionOracle(std::string name, ConstraintSet c, std::function<double(const SpinPoint&)> f, ScaleBounds bounds,
                 double noise_sigma = 0.0);
  [[nodiscard]] double evaluate(const SpinPoint& x) const override { return f_(x); }
  [[nodiscard]] const ConstraintSet& constraint() const override { return c_; }
  [[nodiscard]] std::string descriptor() const override { return name_; }
  [[nodiscard]] ScaleBounds scale_bounds() const override { return bounds_; }
  [[nodiscard]] double noise_sigma() const override { return sigma_; }

 private:
  std::string name_;
  ConstraintSet c_;
  std::function<double(const SpinPoint&)> f_;
  ScaleBounds bounds_;
  double sigma_;
};

// Forwards to another oracle and counts evaluate() calls.
class CountingOracle : public Oracle {
 public:
  explicit CountingOracle(const Oracle& inner) : inner_(&inner) {}
  [[nodiscard]] double evaluate(const SpinPoint& x) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->evaluate(x);
  }
  [[nodiscard]] const ConstraintSet& constraint() const override { return inner_->constraint(); }
  [[nodiscard]] std::string descriptor() const override { return inner_->descriptor(); }
  [[nodiscard]] ScaleBounds scale_bounds() const override { return inner_->scale_bounds(); }
  [[nodiscard]] double noise_sigma() const override { return inner_->noise_sigma(); }
  [[nodiscard]] std::size_t calls() const { return calls_.load(); }

 private:
  const Oracle* inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace comex
