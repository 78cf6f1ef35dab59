#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "comex/acquisition.hpp"
#include "comex/fourier_basis.hpp"
#include "comex/theory_audit.hpp"
#include "test_util.hpp"

using namespace comex;
using comex::test::sp;

TEST_CASE("simplex draws are nonnegative, sum to one and are centred") {
  Rng rng(41);
  std::vector<double> mean(5, 0.0);
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto a = sample_simplex(5, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      REQUIRE(a[i] >= 0.0);
      s += a[i];
      mean[i] += a[i] / draws;
    }
    REQUIRE(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (double m : mean) CHECK(m == doctest::Approx(0.2).epsilon(0.02));
}

TEST_CASE("polynomial evaluation") {
  const MonomialBasis b = enumerate_basis(2, 2);
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  CHECK(evaluate_polynomial(b, a, sp({1, -1})) == doctest::Approx(0.1 + 0.2 - 0.3 - 0.4));
  const std::vector<double> short_a{0.1};
  CHECK_THROWS_AS(evaluate_polynomial(b, short_a, sp({1, 1})), std::invalid_argument);
}

TEST_CASE("the potential bound holds on every audited step") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Lemma1Config cfg;
    cfg.d = 3 + seed % 4;
    cfg.m = 1 + seed % 2;
    cfg.seed = seed;
    const Lemma1Report r = lemma1_audit(cfg);
    REQUIRE(r.steps.size() == cfg.steps);
    CHECK(r.all_hold());
    CHECK(r.worst_margin >= -1e-10);
    for (const auto& st : r.steps) {
      REQUIRE(st.drop() >= st.hoeffding_bound - 1e-12);
      REQUIRE(st.phi_after >= 0.0);
    }
  }
}

TEST_CASE("the audit refuses learning rates outside its validity region") {
  Lemma1Config cfg;
  cfg.eta = 0.125;
  CHECK_THROWS_AS(lemma1_audit(cfg), std::invalid_argument);
  cfg.eta = 0.0;
  CHECK_THROWS_AS(lemma1_audit(cfg), std::invalid_argument);
  cfg.eta = 0.07;
  cfg.lambda = 2.0;
  CHECK_THROWS_AS(lemma1_audit(cfg), std::invalid_argument);
}

TEST_CASE("the bound fails when stated with the pre-update residual") {
  // Target f = 1 (all mass on the plus weight of the constant), fresh model, one update.
  const double eta = 0.1;
  auto basis = std::make_shared<const MonomialBasis>(1, 1);
  SurrogateModel model = init_model(basis, 1.0);
  LearningRateState lr;
  lr.mode = FixedRate{eta};
  const std::vector<double> target{1.0, 0.0, 0.0, 0.0};
  const double phi0 = kl_divergence(target, model);
  const SpinPoint x = sp({1});
  const double pre = predict(model, x) - 1.0;
  update(model, lr, x, 1.0);
  const double drop = phi0 - kl_divergence(target, model);
  const double post = predict(model, x) - 1.0;

  // Closed forms: drop = 2 eta - log cosh(2 eta), post-update prediction tanh(2 eta).
  CHECK(drop == doctest::Approx(2 * eta - std::log(std::cosh(2 * eta))).epsilon(1e-13));
  CHECK(post == doctest::Approx(std::tanh(2 * eta) - 1.0).epsilon(1e-13));
  CHECK(pre == -1.0);
  CHECK(drop < 2 * eta * pre * pre - eta * eta);
  CHECK(drop >= 2 * eta * post * post - eta * eta);
}

TEST_CASE("an exact surrogate gives epsilon zero") {
  Rng rng(42);
  auto basis = std::make_shared<const MonomialBasis>(5, 2);
  const auto star = sample_simplex(basis->size(), rng);
  const SurrogateModel exact(basis, 1.0, star, std::vector<double>(basis->size(), 0.0));
  const auto r = theorem1_audit(exact, star, 1.0, 0.01);
  CHECK(r.precondition_violations.empty());
  CHECK(r.epsilon == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r.kl_hat_to_true == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(-1e-4));
  CHECK(r.holds());
}

TEST_CASE("the acquisition bound holds for a fresh model at d = 6") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(100 + seed);
    auto basis = std::make_shared<const MonomialBasis>(6, 2);
    const auto star = sample_simplex(basis->size(), rng);
    const SurrogateModel model = init_model(basis, 1.0);
    const auto r = theorem1_audit(model, star, 1.0, 0.01, 4000, seed);
    CHECK(r.precondition_violations.empty());
    CHECK(r.epsilon > 0.0);
    CHECK(r.holds());
    REQUIRE(r.sampled_drop.has_value());
    CHECK(std::fabs(*r.sampled_drop - r.expected_drop) < 5e-3);
  }
}

TEST_CASE("epsilon shrinks as the temperature grows") {
  Rng rng(43);
  auto basis = std::make_shared<const MonomialBasis>(6, 2);
  const auto star = sample_simplex(basis->size(), rng);
  SurrogateModel model = init_model(basis, 1.0);
  LearningRateState lr;
  lr.mode = FixedRate{0.05};
  const auto c = ConstraintSet::unconstrained(6);
  for (int t = 0; t < 20; ++t) {
    const SpinPoint x = sample_uniform(c, rng);
    update(model, lr, x, evaluate_polynomial(*basis, star, x) * -1.0);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (double T : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = theorem1_audit(model, star, T, 0.01);
    CHECK(r.epsilon < prev);
    prev = r.epsilon;
  }
}

TEST_CASE("epsilon agrees with a direct pmf computation") {
  Rng rng(44);
  auto basis = std::make_shared<const MonomialBasis>(4, 2);
  const auto star = sample_simplex(basis->size(), rng);
  const SurrogateModel model = init_model(basis, 1.0);
  const double T = 0.7;
  std::vector<double> fh, f;
  for (std::uint64_t k = 0; k < 16; ++k) {
    const SpinPoint x = point_from_index(k, 4);
    fh.push_back(predict(model, x));
    f.push_back(evaluate_polynomial(*basis, star, x));
  }
  double zh = 0.0, z = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    zh += std::exp(-fh[k] / T);
    z += std::exp(-f[k] / T);
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    const double ph = std::exp(-fh[k] / T) / zh, p = std::exp(-f[k] / T) / z;
    kl += ph * std::log(ph / p);
  }
  const auto r = theorem1_audit(model, star, T, 0.01);
  CHECK(r.kl_hat_to_true == doctest::Approx(kl).epsilon(1e-12));
  CHECK(r.epsilon == doctest::Approx(std::fabs(kl - std::log(z / zh))).epsilon(1e-12));
}

TEST_CASE("precondition violations are reported") {
  auto basis = std::make_shared<const MonomialBasis>(3, 1);
  const SurrogateModel model = init_model(basis, 1.0);
  const std::vector<double> negative{0.5, -0.2, 0.3, 0.0};
  CHECK_FALSE(theorem1_audit(model, negative, 1.0, 0.01).precondition_violations.empty());
  const std::vector<double> big{2.0, 0.0, 0.0, 0.0};
  const auto r = theorem1_audit(model, big, 1.0, 0.01);
  CHECK_FALSE(r.precondition_violations.empty());
  CHECK_FALSE(r.holds());
  const std::vector<double> ok{0.25, 0.25, 0.25, 0.25};
  CHECK_FALSE(theorem1_audit(model, ok, 1.0, 0.5).precondition_violations.empty());

  auto wide = std::make_shared<const MonomialBasis>(13, 1);
  const std::vector<double> w(wide->size(), 1.0 / static_cast<double>(wide->size()));
  CHECK_FALSE(theorem1_audit(init_model(wide, 1.0), w, 1.0, 0.01).precondition_violations.empty());
}
