#include "comex/fourier_basis.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace comex {

int evaluate_monomial(const MonomialIndex& term, const SpinPoint& x) {
  int v = 1;
  for (auto i : term.vars) {
    if (i >= x.size()) throw std::out_of_range("monomial index " + std::to_string(i) + " out of range");
    v *= x[i];
  }
  return v;
}

std::size_t basis_size(std::size_t d, std::size_t m) {
  std::size_t total = 0;
  std::size_t binom = 1;  // C(d, 0)
  for (std::size_t k = 0; k <= m && k <= d; ++k) {
    total += binom;
    binom = binom * (d - k) / (k + 1);
  }
  return total;
}

MonomialBasis::MonomialBasis(std::size_t d, std::size_t m) : d_(d), m_(m) {
  if (d == 0) throw std::invalid_argument("basis dimension must be positive");
  if (m < 1 || m > d) throw std::invalid_argument("basis order must satisfy 1 <= m <= d");
  const std::size_t p = basis_size(d, m);
  if (p > std::numeric_limits<std::uint32_t>::max()) throw std::length_error("basis too large");

  terms_.reserve(p);
  prefix_.reserve(p);
  terms_.push_back(MonomialIndex{});
  prefix_.push_back(0);

  // Degree k terms extend each degree k-1 term by a variable beyond its last one.
  // Extending the lex-ordered degree k-1 block in order yields the lex order of the
  // degree k block.
  std::size_t block_begin = 0;
  std::size_t block_end = 1;
  for (std::size_t k = 1; k <= m; ++k) {
    for (std::size_t parent = block_begin; parent < block_end; ++parent) {
      const auto& pv = terms_[parent].vars;
      const std::uint32_t start = pv.empty() ? 0 : pv.back() + 1;
      for (std::uint32_t v = start; v < d; ++v) {
        MonomialIndex t{pv};
        t.vars.push_back(v);
        terms_.push_back(std::move(t));
        prefix_.push_back(static_cast<std::uint32_t>(parent));
      }
    }
    block_begin = block_end;
    block_end = terms_.size();
  }

  containing_.assign(d, {});
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    for (auto v : terms_[k].vars) containing_[v].push_back(static_cast<std::uint32_t>(k));
  }
}

void MonomialBasis::features(const SpinPoint& x, std::span<std::int8_t> out) const {
  if (x.size() != d_) throw std::invalid_argument("features: dimension mismatch");
  if (out.size() != terms_.size()) throw std::invalid_argument("features: output size mismatch");
  out[0] = 1;
  for (std::size_t k = 1; k < terms_.size(); ++k) {
    out[k] = static_cast<std::int8_t>(out[prefix_[k]] * x[terms_[k].vars.back()]);
  }
}

std::vector<std::int8_t> MonomialBasis::features(const SpinPoint& x) const {
  std::vector<std::int8_t> out(terms_.size());
  features(x, out);
  return out;
}

MonomialBasis enumerate_basis(std::size_t d, std::size_t m) { return MonomialBasis(d, m); }

std::vector<std::int8_t> evaluate_features(const MonomialBasis& basis, const SpinPoint& x) {
  return basis.features(x);
}

}  // namespace comex
