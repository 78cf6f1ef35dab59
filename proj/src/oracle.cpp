#include "comex/oracle.hpp"

#include <cmath>
#include <random>

namespace comex {

void Oracle::write_instance(std::ostream&) const {
  throw std::logic_error("oracle '" + descriptor() + "' has no instance file representation");
}

double scale_value(const KnownRange& range, double y) {
  if (!(range.max > range.min)) throw ScaleError("scale: max must exceed min");
  return 2.0 * (y - range.min) / (range.max - range.min) - 1.0;
}

ScaledOracle::ScaledOracle(const Oracle& base) : base_(&base), bounds_(base.scale_bounds()) {
  if (const auto* r = std::get_if<KnownRange>(&bounds_)) {
    if (!(r->max > r->min)) throw ScaleError("scale: max must exceed min for " + base.descriptor());
  }
}

double ScaledOracle::scale(double raw) const {
  if (const auto* r = std::get_if<KnownRange>(&bounds_)) return scale_value(*r, raw);
  return raw;
}

double ScaledOracle::regret_reference() const {
  if (std::holds_alternative<KnownRange>(bounds_)) return -1.0;
  return std::get<ReferenceLevel>(bounds_).level;
}

Observation ScaledOracle::observe(const SpinPoint& x, Rng& noise_rng) const {
  Observation obs;
  obs.raw = base_->evaluate(x);
  if (!std::isfinite(obs.raw)) throw std::runtime_error(base_->descriptor() + ": non-finite objective value");
  if (const auto* r = std::get_if<KnownRange>(&bounds_)) {
    const double slack = 1e-9 * (r->max - r->min);
    if (obs.raw > r->max + slack || obs.raw < r->min - slack) {
      throw ScaleError(base_->descriptor() + ": value " + std::to_string(obs.raw) + " outside the scaling range [" +
                       std::to_string(r->min) + ", " + std::to_string(r->max) + "]");
    }
  }
  obs.scaled = scale(obs.raw);
  if (const double sigma = base_->noise_sigma(); sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    obs.scaled += noise(noise_rng);
  }
  return obs;
}

ScaledOracle scale(const Oracle& oracle) { return ScaledOracle(oracle); }

FunctionOracle::FunctionOracle(std::string name, ConstraintSet c, std::function<double(const SpinPoint&)> f,
                               ScaleBounds bounds, double noise_sigma)
    : name_(std::move(name)), c_(c), f_(std::move(f)), bounds_(bounds), sigma_(noise_sigma) {}

}  // namespace comex
