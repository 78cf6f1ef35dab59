#pragma once

// Empirical checks of the KL-potential guarantees of the exponential-weight
// surrogate. The target is f = sum_i a*_i psi_i with a* nonnegative and summing
// to 1, so phi_t = KL(a* || model weights at step t) is well defined.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comex/expert_surrogate.hpp"

namespace comex {

// Dirichlet(1, ..., 1) draw of length p: a uniform point of the simplex.
std::vector<double> sample_simplex(std::size_t p, Rng& rng);

// f(x) = sum_i a_i psi_i(x) for a length-p coefficient vector over `basis`.
double evaluate_polynomial(const MonomialBasis& basis, std::span<const double> coefficients, const SpinPoint& x);

struct Lemma1Config {
  std::size_t d = 6;
  std::size_t m = 2;
  double eta = 0.01;
  double lambda = 1.0;
  std::size_t steps = 200;
  std::uint64_t seed = 0;
  double slack = 1e-10;
};

struct Lemma1Step {
  std::size_t step = 0;
  double phi_before = 0.0;
  double phi_after = 0.0;
  double loss_before = 0.0;  // f_hat(x_t) - f(x_t) with the weights used to predict
  double loss_after = 0.0;   // same residual under the updated weights
  double bound = 0.0;        // 2 eta lambda loss_after^2 - eta^2
  double hoeffding_bound = 0.0;  // 2 eta lambda loss_before^2 - 2 eta^2 lambda^2 loss_before^2
  bool holds = false;
  [[nodiscard]] double drop() const { return phi_before - phi_after; }
};

struct Lemma1Report {
  Lemma1Config config;
  std::size_t p = 0;
  std::vector<Lemma1Step> steps;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min over steps of drop - bound
  [[nodiscard]] bool all_hold() const { return violations == 0; }
};

// Runs `steps` fixed-rate updates on uniformly drawn queries against a random
// simplex target and checks, per step, phi_{t-1} - phi_t >= bound - slack.
// Throws std::invalid_argument unless 0 < eta < 1/(8 lambda).
Lemma1Report lemma1_audit(const Lemma1Config& cfg);

struct Theorem1Report {
  double temperature = 1.0;
  double eta = 0.0;
  double lambda = 1.0;
  double kl_hat_to_true = 0.0;  // KL(P_hat || P)
  double log_partition_ratio = 0.0;  // log(Z / Z_hat)
  double epsilon = 0.0;  // |KL(P_hat || P) - log(Z / Z_hat)|
  double expected_drop = 0.0;  // exact E_{P_hat}[phi_{t-1} - phi_t]
  std::optional<double> sampled_drop;  // Monte-Carlo estimate when trials > 0
  double bound = 0.0;  // 2 eta lambda epsilon^2 T^2 - eta^2
  std::vector<std::string> precondition_violations;
  [[nodiscard]] bool holds(double slack = 1e-10) const {
    return precondition_violations.empty() && expected_drop >= bound - slack;
  }
};

// Exact-enumeration check of the exponential-acquisition bound for one model
// state. alpha_star is the length-p nonnegative target. Precondition failures
// (d > 12, |f| or |f_hat| above 1, negative a*) are listed in the report.
Theorem1Report theorem1_audit(const SurrogateModel& model, std::span<const double> alpha_star, double temperature,
                              double eta, std::size_t trials = 0, std::uint64_t seed = 0);

}  // namespace comex
