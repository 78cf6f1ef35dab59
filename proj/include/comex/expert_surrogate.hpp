#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "comex/boolean_domain.hpp"
#include "comex/fourier_basis.hpp"

namespace comex {

// Multilinear surrogate f(x) = sum_i (alpha_plus_i - alpha_minus_i) psi_i(x).
//
// Each monomial is an expert carrying a pair of nonnegative weights; the signed
// coefficient is their difference. After every update the 2p weights are
// renormalized to total mass lambda, so |f(x)| <= lambda for every x.
class SurrogateModel {
 public:
  // Uniform prior: every one of the 2p weights is 1/(2p) (total mass 1).
  SurrogateModel(std::shared_ptr<const MonomialBasis> basis, double lambda);

  // Explicit weights, e.g. from a checkpoint. Throws on size mismatch or negative entries.
  SurrogateModel(std::shared_ptr<const MonomialBasis> basis, double lambda,
                 std::vector<double> alpha_plus, std::vector<double> alpha_minus);

  [[nodiscard]] const MonomialBasis& basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const MonomialBasis>& basis_ptr() const { return basis_; }
  [[nodiscard]] std::size_t size() const { return plus_.size(); }
  [[nodiscard]] double lambda() const { return lambda_; }

  [[nodiscard]] std::span<const double> alpha_plus() const { return plus_; }
  [[nodiscard]] std::span<const double> alpha_minus() const { return minus_; }
  // Effective coefficients alpha_plus - alpha_minus.
  [[nodiscard]] std::span<const double> coefficients() const { return coef_; }
  [[nodiscard]] double total_mass() const;

 private:
  friend struct UpdateAccess;

  void refresh_coefficients();

  std::shared_ptr<const MonomialBasis> basis_;
  double lambda_;
  std::vector<double> plus_;
  std::vector<double> minus_;
  std::vector<double> coef_;
};

SurrogateModel init_model(std::shared_ptr<const MonomialBasis> basis, double lambda);

double predict(const SurrogateModel& model, const SpinPoint& x);

// Value of the surrogate at x with spin i flipped, given fx_hat = predict(model, x).
// Touches only the terms containing i.
double predict_flip_delta(const SurrogateModel& model, const SpinPoint& x, double fx_hat, std::size_t i);

// --- learning rate -------------------------------------------------------

struct AdaptiveRate {
  friend bool operator==(const AdaptiveRate&, const AdaptiveRate&) = default;
};
struct FixedRate {
  double eta = 0.05;
  friend bool operator==(const FixedRate&, const FixedRate&) = default;
};
using RateMode = std::variant<AdaptiveRate, FixedRate>;

// Anytime schedule state: e is the running dyadic bound on the loss range, v the
// cumulative weighted loss variance. Both start at 0 and never decrease.
struct LearningRateState {
  std::size_t t = 0;
  double e = 0.0;
  double v = 0.0;
  RateMode mode = AdaptiveRate{};
};

// sqrt(2 (sqrt(2) - 1) / (e - 2))
double adaptive_rate_constant();

// Smallest power of two >= r (0 for r <= 0).
double dyadic_ceil(double r);

// eta_t = min{1/e, c sqrt(ln(2p)/v)}. While e or v is still 0 the rate is
// min(1/(8 lambda), 0.5).
double learning_rate(const LearningRateState& state, std::size_t p, double lambda);

// Folds one step's losses z_j^gamma = -2 gamma lambda loss psi_j into (e, v) and
// advances t. The weights are the ones the prediction was made with; they are
// normalized to sum 1 for the variance.
LearningRateState advance_lr_state(const LearningRateState& state, double lambda, double loss,
                                   std::span<const std::int8_t> features,
                                   std::span<const double> alpha_plus,
                                   std::span<const double> alpha_minus);

struct UpdateDiagnostics {
  double loss = 0.0;  // prediction minus observed value
  double eta = 0.0;
  double mass_before = 0.0;
  double mass_after = 0.0;
};

// One exponential-weight step on observation (x, fx). Throws std::invalid_argument
// for a non-finite fx or a dimension mismatch.
UpdateDiagnostics update(SurrogateModel& model, LearningRateState& state, const SpinPoint& x, double fx);

// --- KL bookkeeping --------------------------------------------------------

// Splits signed coefficients with ||a||_1 <= 1 into 2p nonnegative entries summing
// to 1 (plus block then minus block). Leftover mass is shared equally by the two
// halves of every pair so that differences are preserved.
std::vector<double> split_to_simplex(std::span<const double> alpha_star);

// sum over the 2p entries of a* log(a* / w), with w the model weights scaled to
// total mass 1. Entries with a* = 0 contribute 0; w = 0 under a* > 0 gives +inf.
double kl_divergence(std::span<const double> alpha_star_simplex, const SurrogateModel& model);

// --- checkpoint ------------------------------------------------------------

struct Checkpoint {
  SurrogateModel model;
  LearningRateState lr;
};

void save_checkpoint(std::ostream& os, const SurrogateModel& model, const LearningRateState& lr);
Checkpoint load_checkpoint(std::istream& is);

}  // namespace comex
