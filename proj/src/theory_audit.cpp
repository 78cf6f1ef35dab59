#include "comex/theory_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

#include "comex/acquisition.hpp"

namespace comex {

std::vector<double> sample_simplex(std::size_t p, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> out(p);
  double sum = 0.0;
  for (auto& v : out) {
    v = expo(rng);
    sum += v;
  }
  for (auto& v : out) v /= sum;
  return out;
}

double evaluate_polynomial(const MonomialBasis& basis, std::span<const double> coefficients, const SpinPoint& x) {
  if (coefficients.size() != basis.size()) throw std::invalid_argument("evaluate_polynomial: size mismatch");
  const auto psi = basis.features(x);
  double s = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) s += coefficients[k] * psi[k];
  return s;
}

namespace {

std::vector<double> plus_side(std::span<const double> alpha_star) {
  std::vector<double> out(2 * alpha_star.size(), 0.0);
  std::copy(alpha_star.begin(), alpha_star.end(), out.begin());
  return out;
}

}  // namespace

Lemma1Report lemma1_audit(const Lemma1Config& cfg) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("lemma1_audit: lambda must be positive");
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0 / (8.0 * cfg.lambda))) {
    throw std::invalid_argument("lemma1_audit: requires 0 < eta < 1/(8 lambda)");
  }
  Rng rng(cfg.seed);
  auto basis = std::make_shared<const MonomialBasis>(cfg.d, cfg.m);
  const auto alpha_star = sample_simplex(basis->size(), rng);
  const auto target = plus_side(alpha_star);
  const auto domain = ConstraintSet::unconstrained(cfg.d);

  SurrogateModel model(basis, cfg.lambda);
  LearningRateState lr;
  lr.mode = FixedRate{cfg.eta};

  Lemma1Report report;
  report.config = cfg;
  report.p = basis->size();
  report.worst_margin = std::numeric_limits<double>::infinity();
  const double eta = cfg.eta;
  const double lam = cfg.lambda;

  double phi = kl_divergence(target, model);
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const SpinPoint x = sample_uniform(domain, rng);
    const double fx = evaluate_polynomial(*basis, alpha_star, x);
    Lemma1Step row;
    row.step = t + 1;
    row.phi_before = phi;
    row.loss_before = predict(model, x) - fx;
    update(model, lr, x, fx);
    row.phi_after = kl_divergence(target, model);
    row.loss_after = predict(model, x) - fx;
    row.bound = 2.0 * eta * lam * row.loss_after * row.loss_after - eta * eta;
    row.hoeffding_bound = 2.0 * eta * lam * row.loss_before * row.loss_before -
                          2.0 * eta * eta * lam * lam * row.loss_before * row.loss_before;
    row.holds = row.drop() >= row.bound - cfg.slack;
    report.worst_margin = std::min(report.worst_margin, row.drop() - row.bound);
    if (!row.holds) ++report.violations;
    report.steps.push_back(row);
    phi = row.phi_after;
  }
  return report;
}

Theorem1Report theorem1_audit(const SurrogateModel& model, std::span<const double> alpha_star, double temperature,
                              double eta, std::size_t trials, std::uint64_t seed) {
  const auto& basis = model.basis();
  const std::size_t d = basis.dim();
  Theorem1Report rep;
  rep.temperature = temperature;
  rep.eta = eta;
  rep.lambda = model.lambda();
  if (d > 12) {
    rep.precondition_violations.push_back("dimension above 12 cannot be enumerated for the audit");
    return rep;
  }
  if (alpha_star.size() != basis.size()) throw std::invalid_argument("theorem1_audit: alpha_star size mismatch");
  if (!(temperature > 0.0)) throw std::invalid_argument("theorem1_audit: temperature must be positive");
  if (std::any_of(alpha_star.begin(), alpha_star.end(), [](double a) { return a < 0.0; })) {
    rep.precondition_violations.push_back("target coefficients must be nonnegative");
    return rep;
  }
  if (!(eta > 0.0 && eta < 1.0 / (8.0 * model.lambda()))) {
    rep.precondition_violations.push_back("eta must satisfy 0 < eta < 1/(8 lambda)");
  }

  const std::uint64_t count = std::uint64_t{1} << d;
  std::vector<double> f_hat(count);
  std::vector<double> f(count);
  std::vector<SpinPoint> points;
  points.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    points.push_back(point_from_index(k, d));
    f_hat[k] = predict(model, points.back());
    f[k] = evaluate_polynomial(basis, alpha_star, points.back());
  }
  const double tol = 1e-12;
  if (std::any_of(f_hat.begin(), f_hat.end(), [&](double v) { return std::fabs(v) > 1.0 + tol; })) {
    rep.precondition_violations.push_back("surrogate leaves [-1, 1]");
  }
  if (std::any_of(f.begin(), f.end(), [&](double v) { return std::fabs(v) > 1.0 + tol; })) {
    rep.precondition_violations.push_back("target leaves [-1, 1]");
  }

  const auto p_hat = exponential_pmf_from_values(f_hat, temperature);
  const auto p_true = exponential_pmf_from_values(f, temperature);
  rep.kl_hat_to_true = pmf_kl(p_hat, p_true);
  rep.log_partition_ratio = p_true.log_partition - p_hat.log_partition;
  rep.epsilon = std::fabs(rep.kl_hat_to_true - rep.log_partition_ratio);
  rep.bound = 2.0 * eta * model.lambda() * rep.epsilon * rep.epsilon * temperature * temperature - eta * eta;

  const auto target = plus_side(alpha_star);
  const double phi_before = kl_divergence(target, model);
  std::vector<double> drops(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    SurrogateModel next = model;
    LearningRateState lr;
    lr.mode = FixedRate{eta};
    update(next, lr, points[k], f[k]);
    drops[k] = phi_before - kl_divergence(target, next);
  }
  rep.expected_drop = 0.0;
  for (std::uint64_t k = 0; k < count; ++k) rep.expected_drop += p_hat.probabilities[k] * drops[k];

  if (trials > 0) {
    Rng rng(seed);
    std::discrete_distribution<std::uint64_t> draw(p_hat.probabilities.begin(), p_hat.probabilities.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < trials; ++i) acc += drops[draw(rng)];
    rep.sampled_drop = acc / static_cast<double>(trials);
  }
  return rep;
}

}  // namespace comex
