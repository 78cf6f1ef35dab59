#include "comex/expert_surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "comex/kv_text.hpp"

namespace comex {

SurrogateModel::SurrogateModel(std::shared_ptr<const MonomialBasis> basis, double lambda)
    : basis_(std::move(basis)), lambda_(lambda) {
  if (!basis_) throw std::invalid_argument("surrogate requires a basis");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  const std::size_t p = basis_->size();
  const double w = 1.0 / (2.0 * static_cast<double>(p));
  plus_.assign(p, w);
  minus_.assign(p, w);
  refresh_coefficients();
}

SurrogateModel::SurrogateModel(std::shared_ptr<const MonomialBasis> basis, double lambda,
                               std::vector<double> alpha_plus, std::vector<double> alpha_minus)
    : basis_(std::move(basis)), lambda_(lambda), plus_(std::move(alpha_plus)), minus_(std::move(alpha_minus)) {
  if (!basis_) throw std::invalid_argument("surrogate requires a basis");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (plus_.size() != basis_->size() || minus_.size() != basis_->size()) {
    throw std::invalid_argument("weight vectors must have one entry per basis term");
  }
  auto bad = [](double w) { return !(w >= 0.0) || !std::isfinite(w); };
  if (std::any_of(plus_.begin(), plus_.end(), bad) || std::any_of(minus_.begin(), minus_.end(), bad)) {
    throw std::invalid_argument("weights must be finite and nonnegative");
  }
  refresh_coefficients();
}

double SurrogateModel::total_mass() const {
  return std::accumulate(plus_.begin(), plus_.end(), 0.0) + std::accumulate(minus_.begin(), minus_.end(), 0.0);
}

void SurrogateModel::refresh_coefficients() {
  coef_.resize(plus_.size());
  for (std::size_t i = 0; i < plus_.size(); ++i) coef_[i] = plus_[i] - minus_[i];
}

SurrogateModel init_model(std::shared_ptr<const MonomialBasis> basis, double lambda) {
  return SurrogateModel(std::move(basis), lambda);
}

double predict(const SurrogateModel& model, const SpinPoint& x) {
  const auto& basis = model.basis();
  if (x.size() != basis.dim()) throw std::invalid_argument("predict: dimension mismatch");
  const auto coef = model.coefficients();
  std::vector<std::int8_t> psi(basis.size());
  basis.features(x, psi);
  double s = 0.0;
  for (std::size_t k = 0; k < psi.size(); ++k) s += coef[k] * psi[k];
  return s;
}

double predict_flip_delta(const SurrogateModel& model, const SpinPoint& x, double fx_hat, std::size_t i) {
  const auto& basis = model.basis();
  if (x.size() != basis.dim()) throw std::invalid_argument("predict_flip_delta: dimension mismatch");
  if (i >= basis.dim()) throw std::out_of_range("predict_flip_delta: coordinate out of range");
  const auto coef = model.coefficients();
  double s = 0.0;
  for (auto k : basis.terms_containing(i)) {
    int psi = 1;
    for (auto v : basis.term(k).vars) psi *= x[v];
    s += coef[k] * psi;
  }
  return fx_hat - 2.0 * s;
}

double adaptive_rate_constant() {
  return std::sqrt(2.0 * (std::sqrt(2.0) - 1.0) / (std::exp(1.0) - 2.0));
}

double dyadic_ceil(double r) {
  if (!(r > 0.0)) return 0.0;
  int exp = 0;
  const double mant = std::frexp(r, &exp);  // r = mant * 2^exp, mant in [0.5, 1)
  return mant == 0.5 ? r : std::ldexp(1.0, exp);
}

double learning_rate(const LearningRateState& state, std::size_t p, double lambda) {
  if (const auto* fixed = std::get_if<FixedRate>(&state.mode)) return fixed->eta;
  if (state.e == 0.0 || state.v == 0.0) return std::min(1.0 / (8.0 * lambda), 0.5);
  const double arm_range = 1.0 / state.e;
  const double arm_var = adaptive_rate_constant() * std::sqrt(std::log(2.0 * static_cast<double>(p)) / state.v);
  return std::min(arm_range, arm_var);
}

LearningRateState advance_lr_state(const LearningRateState& state, double lambda, double loss,
                                   std::span<const std::int8_t> features,
                                   std::span<const double> alpha_plus,
                                   std::span<const double> alpha_minus) {
  const std::size_t p = features.size();
  if (alpha_plus.size() != p || alpha_minus.size() != p) {
    throw std::invalid_argument("advance_lr_state: size mismatch");
  }
  // z for the plus expert is -2 lambda loss psi_j, for the minus expert its negation.
  const double scale = -2.0 * lambda * loss;
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  double mass = 0.0;
  double mean = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double zp = scale * features[j];
    zmin = std::min({zmin, zp, -zp});
    zmax = std::max({zmax, zp, -zp});
    mass += alpha_plus[j] + alpha_minus[j];
    mean += alpha_plus[j] * zp - alpha_minus[j] * zp;
  }
  LearningRateState next = state;
  next.t = state.t + 1;
  next.e = std::max(state.e, dyadic_ceil(zmax - zmin));
  if (mass > 0.0 && loss != 0.0) {
    mean /= mass;
    double var = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double zp = scale * features[j];
      var += alpha_plus[j] * (zp - mean) * (zp - mean) + alpha_minus[j] * (-zp - mean) * (-zp - mean);
    }
    next.v = state.v + var / mass;
  }
  return next;
}

struct UpdateAccess {
  static UpdateDiagnostics run(SurrogateModel& model, LearningRateState& state, const SpinPoint& x, double fx) {
    if (!std::isfinite(fx)) throw std::invalid_argument("update: observed value is not finite");
    const auto& basis = model.basis();
    if (x.size() != basis.dim()) throw std::invalid_argument("update: dimension mismatch");
    const std::size_t p = basis.size();
    const double lambda = model.lambda_;

    std::vector<std::int8_t> psi(p);
    basis.features(x, psi);
    double fx_hat = 0.0;
    for (std::size_t k = 0; k < p; ++k) fx_hat += model.coef_[k] * psi[k];

    UpdateDiagnostics diag;
    diag.loss = fx_hat - fx;
    diag.eta = learning_rate(state, p, lambda);
    diag.mass_before = model.total_mass();

    // Expert loss l_i = 2 lambda loss psi_i; the (i, gamma) weight is multiplied by
    // exp(-gamma eta l_i) with gamma = +1 / -1. Exponents are shifted by their max
    // before exponentiating; the shift cancels in the normalization.
    const double base = diag.eta * 2.0 * lambda * diag.loss;
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      const double ex = -base * psi[i];
      shift = std::max({shift, ex, -ex});
    }
    std::vector<double> new_plus(p);
    std::vector<double> new_minus(p);
    double total = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double ex = -base * psi[i];
      new_plus[i] = model.plus_[i] * std::exp(ex - shift);
      new_minus[i] = model.minus_[i] * std::exp(-ex - shift);
      total += new_plus[i] + new_minus[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw std::runtime_error("update: weight mass degenerated");
    }
    const double norm = lambda / total;
    for (std::size_t i = 0; i < p; ++i) {
      new_plus[i] *= norm;
      new_minus[i] *= norm;
    }

    state = advance_lr_state(state, lambda, diag.loss, psi, model.plus_, model.minus_);
    model.plus_ = std::move(new_plus);
    model.minus_ = std::move(new_minus);
    model.refresh_coefficients();
    diag.mass_after = model.total_mass();
    return diag;
  }
};

UpdateDiagnostics update(SurrogateModel& model, LearningRateState& state, const SpinPoint& x, double fx) {
  return UpdateAccess::run(model, state, x, fx);
}

std::vector<double> split_to_simplex(std::span<const double> alpha_star) {
  const std::size_t p = alpha_star.size();
  if (p == 0) throw std::invalid_argument("split_to_simplex: empty coefficient vector");
  double l1 = 0.0;
  for (double a : alpha_star) {
    if (!std::isfinite(a)) throw std::invalid_argument("split_to_simplex: non-finite coefficient");
    l1 += std::fabs(a);
  }
  if (l1 > 1.0 + 1e-12) throw std::invalid_argument("split_to_simplex: l1 norm exceeds 1");
  const double rest = std::max(0.0, 1.0 - l1) / (2.0 * static_cast<double>(p));
  std::vector<double> out(2 * p);
  for (std::size_t i = 0; i < p; ++i) {
    out[i] = std::max(alpha_star[i], 0.0) + rest;
    out[p + i] = std::max(-alpha_star[i], 0.0) + rest;
  }
  return out;
}

double kl_divergence(std::span<const double> alpha_star_simplex, const SurrogateModel& model) {
  const std::size_t p = model.size();
  if (alpha_star_simplex.size() != 2 * p) throw std::invalid_argument("kl_divergence: expected 2p entries");
  const double mass = model.total_mass();
  const auto plus = model.alpha_plus();
  const auto minus = model.alpha_minus();
  double kl = 0.0;
  for (std::size_t k = 0; k < 2 * p; ++k) {
    const double a = alpha_star_simplex[k];
    if (a < 0.0) throw std::invalid_argument("kl_divergence: negative target entry");
    if (a == 0.0) continue;
    const double w = (k < p ? plus[k] : minus[k - p]) / mass;
    if (w == 0.0) return std::numeric_limits<double>::infinity();
    kl += a * std::log(a / w);
  }
  return kl;
}

namespace {
constexpr const char* kCheckpointFormat = "comex-checkpoint-1";
}

void save_checkpoint(std::ostream& os, const SurrogateModel& model, const LearningRateState& lr) {
  kv::Document doc;
  doc.set("format", kCheckpointFormat);
  doc.set_int("d", static_cast<long long>(model.basis().dim()));
  doc.set_int("m", static_cast<long long>(model.basis().max_degree()));
  doc.set_real("lambda", model.lambda());
  if (const auto* fixed = std::get_if<FixedRate>(&lr.mode)) {
    doc.set("lr_mode", "fixed");
    doc.set_real("lr_eta", fixed->eta);
  } else {
    doc.set("lr_mode", "adaptive");
  }
  doc.set_int("lr_t", static_cast<long long>(lr.t));
  doc.set_real("lr_e", lr.e);
  doc.set_real("lr_v", lr.v);
  doc.set_reals("alpha_plus", model.alpha_plus());
  doc.set_reals("alpha_minus", model.alpha_minus());
  os << "# COMEX surrogate checkpoint\n";
  doc.write(os);
}

Checkpoint load_checkpoint(std::istream& is) {
  const auto doc = kv::Document::read(is);
  if (doc.get("format") != kCheckpointFormat) {
    throw std::runtime_error("unsupported checkpoint format '" + doc.get("format") + "'");
  }
  const auto d = doc.get_int("d");
  const auto m = doc.get_int("m");
  if (d <= 0 || m <= 0) throw std::runtime_error("checkpoint: invalid d or m");
  auto basis = std::make_shared<const MonomialBasis>(static_cast<std::size_t>(d), static_cast<std::size_t>(m));
  SurrogateModel model(basis, doc.get_real("lambda"), doc.get_reals("alpha_plus"), doc.get_reals("alpha_minus"));
  LearningRateState lr;
  const auto& mode = doc.get("lr_mode");
  if (mode == "fixed") {
    lr.mode = FixedRate{doc.get_real("lr_eta")};
  } else if (mode != "adaptive") {
    throw std::runtime_error("checkpoint: unknown lr_mode '" + mode + "'");
  }
  const auto t = doc.get_int("lr_t");
  if (t < 0) throw std::runtime_error("checkpoint: negative lr_t");
  lr.t = static_cast<std::size_t>(t);
  lr.e = doc.get_real("lr_e");
  lr.v = doc.get_real("lr_v");
  return {std::move(model), lr};
}

}  // namespace comex
