#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace comex {

using Rng = std::mt19937_64;

// A point of {-1,+1}^d. Entries are stored as int8_t and are always exactly -1 or +1.
class SpinPoint {
 public:
  SpinPoint() = default;
  explicit SpinPoint(std::vector<std::int8_t> spins);
  static SpinPoint filled(std::size_t d, std::int8_t value);

  [[nodiscard]] std::size_t size() const { return spins_.size(); }
  [[nodiscard]] int operator[](std::size_t i) const { return spins_[i]; }
  [[nodiscard]] std::span<const std::int8_t> spins() const { return spins_; }

  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  [[nodiscard]] SpinPoint flipped(std::size_t i) const;

  [[nodiscard]] std::size_t count_plus() const;
  [[nodiscard]] std::string to_string() const;  // "+-+-" form

  friend bool operator==(const SpinPoint&, const SpinPoint&) = default;
  friend auto operator<=>(const SpinPoint&, const SpinPoint&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

// Bit 1 ("selected") maps to +1.
SpinPoint from_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> to_bits(const SpinPoint& x);

// Point number `index` of the hypercube enumeration: spin i is +1 iff bit i of index is set.
SpinPoint point_from_index(std::uint64_t index, std::size_t d);

class ConstraintSet {
 public:
  enum class Kind { kUnconstrained, kSumConstrained };

  static ConstraintSet unconstrained(std::size_t d);
  // Exactly n coordinates equal +1, 0 < n < d.
  static ConstraintSet sum_constrained(std::size_t d, std::size_t n);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] std::size_t dim() const { return d_; }
  [[nodiscard]] std::size_t n() const { return n_; }
  [[nodiscard]] bool is_sum_constrained() const { return kind_ == Kind::kSumConstrained; }
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  ConstraintSet(Kind kind, std::size_t d, std::size_t n) : kind_(kind), d_(d), n_(n) {}

  Kind kind_;
  std::size_t d_;
  std::size_t n_;
};

// Throws std::invalid_argument on dimension mismatch.
bool contains(const ConstraintSet& c, const SpinPoint& x);

SpinPoint sample_uniform(const ConstraintSet& c, Rng& rng);

// One neighborhood move. For unconstrained sets only `first` is flipped; for
// sum-constrained sets `first` is a +1 coordinate and `second` a -1 coordinate
// whose signs are swapped.
struct Move {
  std::size_t first = 0;
  std::size_t second = 0;
  bool is_swap = false;
};

// Uniform over N(x). Throws std::domain_error when the neighborhood is empty.
Move propose_move(const ConstraintSet& c, const SpinPoint& x, Rng& rng);
void apply_move(SpinPoint& x, const Move& mv);
SpinPoint sample_neighbor(const ConstraintSet& c, const SpinPoint& x, Rng& rng);

std::size_t hamming_distance(const SpinPoint& x, const SpinPoint& y);

}  // namespace comex
