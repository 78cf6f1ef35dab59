#include "comex/boolean_domain.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace comex {

SpinPoint::SpinPoint(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
  for (auto s : spins_) {
    if (s != 1 && s != -1) throw std::invalid_argument("SpinPoint entries must be -1 or +1");
  }
}

SpinPoint SpinPoint::filled(std::size_t d, std::int8_t value) {
  return SpinPoint(std::vector<std::int8_t>(d, value));
}

SpinPoint SpinPoint::flipped(std::size_t i) const {
  SpinPoint out = *this;
  out.flip(i);
  return out;
}

std::size_t SpinPoint::count_plus() const {
  return static_cast<std::size_t>(std::count(spins_.begin(), spins_.end(), std::int8_t{1}));
}

std::string SpinPoint::to_string() const {
  std::string s;
  s.reserve(spins_.size());
  for (auto v : spins_) s.push_back(v > 0 ? '+' : '-');
  return s;
}

SpinPoint from_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::int8_t> spins(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw std::invalid_argument("from_bits: entries must be 0 or 1");
    spins[i] = static_cast<std::int8_t>(2 * bits[i] - 1);
  }
  return SpinPoint(std::move(spins));
}

std::vector<std::uint8_t> to_bits(const SpinPoint& x) {
  std::vector<std::uint8_t> bits(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) bits[i] = x[i] > 0 ? 1 : 0;
  return bits;
}

SpinPoint point_from_index(std::uint64_t index, std::size_t d) {
  std::vector<std::int8_t> spins(d);
  for (std::size_t i = 0; i < d; ++i) spins[i] = ((index >> i) & 1U) ? 1 : -1;
  return SpinPoint(std::move(spins));
}

ConstraintSet ConstraintSet::unconstrained(std::size_t d) {
  if (d == 0) throw std::invalid_argument("constraint dimension must be positive");
  return {Kind::kUnconstrained, d, 0};
}

ConstraintSet ConstraintSet::sum_constrained(std::size_t d, std::size_t n) {
  if (d == 0) throw std::invalid_argument("constraint dimension must be positive");
  if (n == 0 || n >= d) throw std::invalid_argument("sum constraint requires 0 < n < d");
  return {Kind::kSumConstrained, d, n};
}

std::string ConstraintSet::describe() const {
  if (kind_ == Kind::kUnconstrained) return "unconstrained(d=" + std::to_string(d_) + ")";
  return "sum_constrained(d=" + std::to_string(d_) + ",n=" + std::to_string(n_) + ")";
}

bool contains(const ConstraintSet& c, const SpinPoint& x) {
  if (x.size() != c.dim()) {
    throw std::invalid_argument("contains: point has length " + std::to_string(x.size()) +
                                " but constraint dimension is " + std::to_string(c.dim()));
  }
  if (!c.is_sum_constrained()) return true;
  return x.count_plus() == c.n();
}

SpinPoint sample_uniform(const ConstraintSet& c, Rng& rng) {
  const std::size_t d = c.dim();
  if (!c.is_sum_constrained()) {
    std::bernoulli_distribution coin(0.5);
    std::vector<std::int8_t> spins(d);
    for (auto& s : spins) s = coin(rng) ? 1 : -1;
    return SpinPoint(std::move(spins));
  }
  // Partial Fisher-Yates: the first n slots of a random permutation receive +1.
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<std::int8_t> spins(d, -1);
  for (std::size_t k = 0; k < c.n(); ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, d - 1);
    std::swap(idx[k], idx[pick(rng)]);
    spins[idx[k]] = 1;
  }
  return SpinPoint(std::move(spins));
}

namespace {

std::size_t nth_with_sign(const SpinPoint& x, std::size_t k, int sign) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == sign) {
      if (k == 0) return i;
      --k;
    }
  }
  throw std::logic_error("nth_with_sign: not enough coordinates");
}

}  // namespace

Move propose_move(const ConstraintSet& c, const SpinPoint& x, Rng& rng) {
  if (x.size() != c.dim()) throw std::invalid_argument("propose_move: dimension mismatch");
  if (!c.is_sum_constrained()) {
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    return {pick(rng), 0, false};
  }
  const std::size_t plus = x.count_plus();
  const std::size_t minus = x.size() - plus;
  if (plus == 0 || minus == 0) throw std::domain_error("sum-constrained neighborhood is empty");
  std::uniform_int_distribution<std::size_t> pick_plus(0, plus - 1);
  std::uniform_int_distribution<std::size_t> pick_minus(0, minus - 1);
  const std::size_t a = pick_plus(rng);
  const std::size_t b = pick_minus(rng);
  return {nth_with_sign(x, a, 1), nth_with_sign(x, b, -1), true};
}

void apply_move(SpinPoint& x, const Move& mv) {
  x.flip(mv.first);
  if (mv.is_swap) x.flip(mv.second);
}

SpinPoint sample_neighbor(const ConstraintSet& c, const SpinPoint& x, Rng& rng) {
  SpinPoint out = x;
  apply_move(out, propose_move(c, x, rng));
  return out;
}

std::size_t hamming_distance(const SpinPoint& x, const SpinPoint& y) {
  if (x.size() != y.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) n += (x[i] != y[i]);
  return n;
}

}  // namespace comex
