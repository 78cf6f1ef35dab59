#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "comex/boolean_domain.hpp"

namespace comex {

// Index set I of a monomial psi_I(x) = prod_{i in I} x_i. Sorted, duplicate free.
struct MonomialIndex {
  std::vector<std::uint32_t> vars;

  [[nodiscard]] std::size_t degree() const { return vars.size(); }
  friend bool operator==(const MonomialIndex&, const MonomialIndex&) = default;
};

// +1 for the empty index set. Throws std::out_of_range if an index exceeds x.
int evaluate_monomial(const MonomialIndex& term, const SpinPoint& x);

// All monomials of degree <= m over d variables, ordered by degree and then
// lexicographically. Immutable once built.
class MonomialBasis {
 public:
  MonomialBasis(std::size_t d, std::size_t m);

  [[nodiscard]] std::size_t dim() const { return d_; }
  [[nodiscard]] std::size_t max_degree() const { return m_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] const MonomialIndex& term(std::size_t k) const { return terms_[k]; }
  [[nodiscard]] std::span<const MonomialIndex> terms() const { return terms_; }

  // Positions of the terms that contain coordinate i.
  [[nodiscard]] std::span<const std::uint32_t> terms_containing(std::size_t i) const {
    return containing_[i];
  }

  // Writes psi_k(x) for every term into out (size p). Each term of degree k is
  // the product of its degree k-1 prefix and its last variable, so this is O(p).
  void features(const SpinPoint& x, std::span<std::int8_t> out) const;
  [[nodiscard]] std::vector<std::int8_t> features(const SpinPoint& x) const;

 private:
  std::size_t d_;
  std::size_t m_;
  std::vector<MonomialIndex> terms_;
  std::vector<std::uint32_t> prefix_;  // position of the term without its last variable
  std::vector<std::vector<std::uint32_t>> containing_;
};

// p = sum_{i=0}^{m} C(d, i)
std::size_t basis_size(std::size_t d, std::size_t m);

// Throws std::invalid_argument unless 1 <= m <= d.
MonomialBasis enumerate_basis(std::size_t d, std::size_t m);

// Throws std::invalid_argument on dimension mismatch.
std::vector<std::int8_t> evaluate_features(const MonomialBasis& basis, const SpinPoint& x);

}  // namespace comex
