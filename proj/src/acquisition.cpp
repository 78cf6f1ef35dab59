#include "comex/acquisition.hpp"

#include <algorithm>
#include <limits>

namespace comex {

double anneal_schedule(const AnnealSchedule& sched, double t) {
  if (t < 0.0) throw std::invalid_argument("anneal_schedule: negative step");
  return std::exp(-sched.omega * t / static_cast<double>(sched.d));
}

SwapSampler::SwapSampler(const SpinPoint& x) : slot_(x.size()) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto& list = x[i] > 0 ? plus_ : minus_;
    slot_[i] = list.size();
    list.push_back(i);
  }
  if (plus_.empty() || minus_.empty()) throw std::domain_error("sum-constrained neighborhood is empty");
}

Move SwapSampler::draw(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick_plus(0, plus_.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_minus(0, minus_.size() - 1);
  const std::size_t a = pick_plus(rng);
  const std::size_t b = pick_minus(rng);
  return {plus_[a], minus_[b], true};
}

void SwapSampler::commit(const Move& mv) {
  // mv.first went +1 -> -1 and mv.second went -1 -> +1; they trade slots.
  const std::size_t sa = slot_[mv.first];
  const std::size_t sb = slot_[mv.second];
  plus_[sa] = mv.second;
  minus_[sb] = mv.first;
  slot_[mv.second] = sa;
  slot_[mv.first] = sb;
}

AcquisitionPmf exponential_pmf_from_values(std::span<const double> values, double temperature) {
  if (!(temperature > 0.0)) throw std::invalid_argument("exponential_pmf: temperature must be positive");
  if (values.empty()) throw std::invalid_argument("exponential_pmf: no points");
  AcquisitionPmf out;
  out.temperature = temperature;
  out.probabilities.resize(values.size());
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, -v / temperature);
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.probabilities[k] = std::exp(-values[k] / temperature - top);
    sum += out.probabilities[k];
  }
  for (auto& p : out.probabilities) p /= sum;
  out.log_partition = top + std::log(sum);
  return out;
}

AcquisitionPmf exponential_pmf(const std::function<double(const SpinPoint&)>& f, std::size_t d, double temperature) {
  if (d == 0 || d > kMaxEnumerationDim) throw std::invalid_argument("exponential_pmf: dimension too large to enumerate");
  const std::uint64_t count = std::uint64_t{1} << d;
  std::vector<double> values(count);
  for (std::uint64_t k = 0; k < count; ++k) values[k] = f(point_from_index(k, d));
  return exponential_pmf_from_values(values, temperature);
}

double pmf_kl(const AcquisitionPmf& p, const AcquisitionPmf& q) {
  if (p.probabilities.size() != q.probabilities.size()) throw std::invalid_argument("pmf_kl: support mismatch");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.probabilities.size(); ++k) {
    const double a = p.probabilities[k];
    if (a == 0.0) continue;
    kl += a * std::log(a / q.probabilities[k]);
  }
  return kl;
}

}  // namespace comex
