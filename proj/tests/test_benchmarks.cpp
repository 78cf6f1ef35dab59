#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "comex/benchmarks.hpp"
#include "test_util.hpp"

using namespace comex;
using comex::test::sp;

namespace {

// Direct-definition KL(p || q_x) summed over all 2^n spin states.
double direct_ising_kl(const IsingProblem& prob, const SpinPoint& x) {
  const std::size_t n = prob.n_nodes();
  const auto& edges = prob.edges();
  const auto& j = prob.couplings();
  std::vector<double> lp(std::size_t{1} << n), lq(std::size_t{1} << n);
  for (std::size_t s = 0; s < lp.size(); ++s) {
    double ep = 0.0, eq = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const double zu = (s >> edges[k].u) & 1 ? 1.0 : -1.0;
      const double zv = (s >> edges[k].v) & 1 ? 1.0 : -1.0;
      // z^T J z counts each edge twice.
      ep += 2.0 * j[k] * zu * zv;
      if (x[k] > 0) eq += 2.0 * j[k] * zu * zv;
    }
    lp[s] = ep;
    lq[s] = eq;
  }
  auto log_sum_exp = [](const std::vector<double>& v) {
    double m = v[0];
    for (double a : v) m = std::max(m, a);
    double s = 0.0;
    for (double a : v) s += std::exp(a - m);
    return m + std::log(s);
  };
  const double zp = log_sum_exp(lp), zq = log_sum_exp(lq);
  double kl = 0.0;
  for (std::size_t s = 0; s < lp.size(); ++s) {
    const double logp = lp[s] - zp;
    kl += std::exp(logp) * (logp - (lq[s] - zq));
  }
  return kl;
}

// Straight-line reimplementation of the contamination objective.
double direct_contamination(const ContaminationProblem& prob, const SpinPoint& x) {
  const auto bits = to_bits(x);
  double cost = 0.0, penalty = 0.0;
  for (std::size_t i = 0; i < prob.dim(); ++i) cost += prob.costs()[i] * bits[i] + prob.lambda_reg() * bits[i];
  for (std::size_t t = 0; t < prob.mc_paths(); ++t) {
    double z = prob.initial()[t];
    for (std::size_t i = 0; i < prob.dim(); ++i) {
      const double a = prob.rate(i, t), b = prob.restore(i, t);
      z = bits[i] ? (1.0 - b) * z : a * (1.0 - z) + z;
      if (z > prob.upper_limit()) penalty += prob.penalty() / static_cast<double>(prob.mc_paths());
    }
  }
  return cost + penalty;
}

// Direct row/column/diagonal count by pair enumeration.
double direct_queens(std::size_t n, const SpinPoint& x) {
  std::vector<std::pair<int, int>> q;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (x[k] > 0) q.emplace_back(static_cast<int>(k / n), static_cast<int>(k % n));
  }
  double e = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    int cr = 0, cc = 0;
    for (auto [i, j] : q) {
      cr += i == static_cast<int>(r);
      cc += j == static_cast<int>(r);
    }
    e += (cr - 1.0) * (cr - 1.0) + (cc - 1.0) * (cc - 1.0);
  }
  for (std::size_t a = 0; a < q.size(); ++a) {
    for (std::size_t b = a + 1; b < q.size(); ++b) {
      const int di = q[a].first - q[b].first, dj = q[a].second - q[b].second;
      if (di == dj || di == -dj) e += 1.0;
    }
  }
  return e;
}

IsingProblem ising3(std::uint64_t seed = 7) {
  Rng rng(seed);
  return IsingProblem::make(rng, 3, 3, 0.01);
}

}  // namespace

TEST_CASE("grid edge counts") {
  CHECK(grid_edges(4, 4).size() == 24);
  CHECK(grid_edges(3, 3).size() == 12);
  CHECK(grid_edges(1, 2).size() == 1);
  const auto e = grid_edges(2, 2);
  REQUIRE(e.size() == 4);
  CHECK((e[0].u == 0 && e[0].v == 1));
  CHECK((e[1].u == 0 && e[1].v == 2));
}

TEST_CASE("Ising couplings lie in [0.05, 5] and the 4x4 instance has 24 edges") {
  Rng rng(1);
  const IsingProblem p = IsingProblem::make(rng);
  CHECK(p.edges().size() == 24);
  CHECK(p.constraint().dim() == 24);
  for (double j : p.couplings()) {
    CHECK(j >= 0.05);
    CHECK(j <= 5.0);
  }
  CHECK_FALSE(p.bounds_are_exact());
  CHECK_THROWS_AS(IsingProblem::make(rng, 5, 5), std::invalid_argument);
}

TEST_CASE("Ising with vanishing couplings is uniform") {
  const IsingProblem p(3, 3, std::vector<double>(12, 0.0), 0.01);
  CHECK(p.log_partition() == doctest::Approx(9.0 * std::log(2.0)).epsilon(1e-14));
  for (double e : p.pair_expectations()) CHECK(e == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(p.kl_to_sparsified(SpinPoint::filled(12, -1)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("keeping every edge costs only the penalty") {
  const IsingProblem p = ising3();
  CHECK(p.kl_to_sparsified(SpinPoint::filled(12, 1)) == 0.0);
  CHECK(p.evaluate(SpinPoint::filled(12, 1)) == doctest::Approx(0.01 * 12).epsilon(1e-15));
  Rng rng(2);
  const IsingProblem big = IsingProblem::make(rng);
  CHECK(big.evaluate(SpinPoint::filled(24, 1)) - 0.01 * 24 == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("Ising objective matches the direct KL sum on every subset of the 3x3 grid") {
  const IsingProblem p = ising3();
  REQUIRE(p.bounds_are_exact());
  double lo = 1e300;
  for (std::uint64_t k = 0; k < 4096; ++k) {
    const SpinPoint x = point_from_index(k, 12);
    const double kl = p.kl_to_sparsified(x);
    REQUIRE(kl >= -1e-12);
    REQUIRE(kl == doctest::Approx(direct_ising_kl(p, x)).epsilon(1e-9).scale(1.0));
    lo = std::min(lo, p.evaluate(x));
  }
  const auto [argmin, best] = p.exhaustive_minimum();
  CHECK(best == lo);
  CHECK(p.evaluate(argmin) == best);
  const auto range = std::get<KnownRange>(p.scale_bounds());
  CHECK(range.min == lo);
}

TEST_CASE("the provable Ising range contains every value") {
  Rng rng(3);
  const IsingProblem p = IsingProblem::make(rng);
  const auto r = std::get<KnownRange>(p.scale_bounds());
  for (int k = 0; k < 300; ++k) {
    const double v = p.evaluate(sample_uniform(p.constraint(), rng));
    REQUIRE(v >= r.min);
    REQUIRE(v <= r.max);
  }
}

TEST_CASE("contamination edge cases follow the recursion") {
  const std::size_t d = 5, t = 3;
  // Restoration rates of one clear every path at the first intervention.
  const ContaminationProblem clean(d, t, 0.1, 1.0, 0.01, std::vector<double>(d, 1.0), {0.5, 0.2, 0.9},
                                   std::vector<double>(d * t, 0.7), std::vector<double>(d * t, 1.0));
  CHECK(clean.evaluate(SpinPoint::filled(d, 1)) == doctest::Approx(d * 1.0 + 0.01 * d).epsilon(1e-15));
  const ContaminationProblem none(d, t, 0.1, 1.0, 0.01, std::vector<double>(d, 1.0), {0.0, 0.0, 0.0},
                                  std::vector<double>(d * t, 0.0), std::vector<double>(d * t, 0.5));
  CHECK(none.evaluate(SpinPoint::filled(d, -1)) == 0.0);
  CHECK_THROWS_AS(ContaminationProblem(d, t, 0.1, 1.0, 0.01, std::vector<double>(d, 1.0), {0.0, 0.0, 1.5},
                                       std::vector<double>(d * t, 0.0), std::vector<double>(d * t, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("contamination matches a straight-line reimplementation") {
  Rng rng(4);
  const ContaminationProblem p = ContaminationProblem::make(rng);
  REQUIRE(p.dim() == 21);
  REQUIRE(p.mc_paths() == 100);
  Rng q(5);
  for (int k = 0; k < 200; ++k) {
    const SpinPoint x = sample_uniform(p.constraint(), q);
    REQUIRE(p.evaluate(x) == doctest::Approx(direct_contamination(p, x)).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < p.dim(); ++i) {
    for (std::size_t t = 0; t < p.mc_paths(); ++t) {
      REQUIRE(p.rate(i, t) >= 0.0);
      REQUIRE(p.rate(i, t) <= 1.0);
      REQUIRE(p.restore(i, t) >= 0.0);
      REQUIRE(p.restore(i, t) <= 1.0);
    }
  }
}

TEST_CASE("contamination fractions stay in the unit interval") {
  Rng rng(6);
  ContaminationParams params;
  params.d = 8;
  params.mc_paths = 20;
  const ContaminationProblem p = ContaminationProblem::make(rng, params);
  for (std::uint64_t k = 0; k < 256; ++k) {
    const auto bits = to_bits(point_from_index(k, 8));
    for (std::size_t t = 0; t < p.mc_paths(); ++t) {
      double z = p.initial()[t];
      for (std::size_t i = 0; i < 8; ++i) {
        z = p.rate(i, t) * (1.0 - bits[i]) * (1.0 - z) + (1.0 - p.restore(i, t) * bits[i]) * z;
        REQUIRE(z >= 0.0);
        REQUIRE(z <= 1.0);
      }
    }
  }
}

TEST_CASE("exact contamination range matches brute force") {
  Rng rng(7);
  ContaminationParams params;
  params.d = 10;
  const ContaminationProblem p = ContaminationProblem::make(rng, params);
  REQUIRE(p.bounds_are_exact());
  double lo = 1e300, hi = -1e300;
  for (std::uint64_t k = 0; k < 1024; ++k) {
    const double v = p.evaluate(point_from_index(k, 10));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const KnownRange r = p.exhaustive_range();
  CHECK(r.min == doctest::Approx(lo).epsilon(1e-12));
  CHECK(r.max == doctest::Approx(hi).epsilon(1e-12));
}

TEST_CASE("beta samples have the right mean") {
  Rng rng(8);
  double s = 0.0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) s += sample_beta(1.0, 3.0 / 7.0, rng);
  CHECK(s / draws == doctest::Approx(0.7).epsilon(0.01));
}

TEST_CASE("n-queens energies") {
  const std::vector<std::size_t> sol{1, 3, 0, 2};
  CHECK(nqueens_energy(4, queens_from_columns(sol)) == 0.0);

  std::vector<std::int8_t> row0(16, -1);
  for (int j = 0; j < 4; ++j) row0[j] = 1;
  const auto e = nqueens_energy_terms(4, SpinPoint(row0));
  CHECK(e.rows == 12.0);
  CHECK(e.cols == 0.0);
  CHECK(e.diags == 0.0);

  const auto empty = nqueens_energy_terms(5, SpinPoint::filled(25, -1));
  CHECK(empty.rows == 5.0);
  CHECK(empty.cols == 5.0);
  CHECK(empty.diags == 0.0);

  CHECK_THROWS_AS(nqueens_energy(4, SpinPoint::filled(9, -1)), std::invalid_argument);
}

TEST_CASE("n-queens energy matches pair enumeration") {
  Rng rng(9);
  for (std::size_t n : {4, 5, 6, 7}) {
    const auto c = ConstraintSet::sum_constrained(n * n, n);
    for (int k = 0; k < 300; ++k) {
      const SpinPoint x = sample_uniform(c, rng);
      REQUIRE(nqueens_energy(n, x) == direct_queens(n, x));
    }
  }
}

TEST_CASE("backtracking solutions have zero energy") {
  CHECK(solve_nqueens(4).size() == 2);
  CHECK(solve_nqueens(5).size() == 10);
  CHECK(solve_nqueens(6).size() == 4);
  for (std::size_t n : {4, 5, 6}) {
    for (const auto& s : solve_nqueens(n)) REQUIRE(nqueens_energy(n, queens_from_columns(s)) == 0.0);
  }
}

TEST_CASE("the scaling maximum bounds every placement for n = 4 and 5") {
  for (std::size_t n : {4, 5}) {
    const NQueensProblem prob(n, 0.0);
    CHECK(prob.scaling_max() == static_cast<double>(n * (n - 1)));
    const std::size_t d = n * n;
    double hi = 0.0;
    std::size_t zeros = 0;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << d); ++k) {
      if (static_cast<std::size_t>(__builtin_popcountll(k)) != n) continue;
      const double e = nqueens_energy(n, point_from_index(k, d));
      hi = std::max(hi, e);
      zeros += e == 0.0;
    }
    CHECK(hi <= prob.scaling_max());
    CHECK(zeros == solve_nqueens(n).size());
  }
}

TEST_CASE("noisy n-queens scaling and noise") {
  const NQueensProblem prob(4, 0.02);
  const std::vector<std::size_t> sol{1, 3, 0, 2};
  const SpinPoint x = queens_from_columns(sol);
  Rng rng(10);
  double s = 0.0;
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) s += nqueens_evaluate(prob, x, rng);
  const double mean = s / draws;
  CHECK(mean >= -1.0006);
  CHECK(mean <= -0.9994);

  const NQueensProblem quiet(4, 0.0);
  std::vector<std::int8_t> row0(16, -1);
  for (int j = 0; j < 4; ++j) row0[j] = 1;
  CHECK(nqueens_evaluate(quiet, SpinPoint(row0), rng) == 1.0);
  CHECK(nqueens_evaluate(quiet, x, rng) == -1.0);
}

TEST_CASE("scaling maps the range onto [-1, 1]") {
  const KnownRange r{2.0, 6.0};
  CHECK(scale_value(r, 2.0) == -1.0);
  CHECK(scale_value(r, 6.0) == 1.0);
  CHECK(scale_value(r, 4.0) == 0.0);
  CHECK_THROWS_AS(scale_value(KnownRange{1.0, 1.0}, 1.0), ScaleError);

  const FunctionOracle bad("bad", ConstraintSet::unconstrained(2), [](const SpinPoint&) { return 0.0; },
                           KnownRange{3.0, 3.0});
  CHECK_THROWS_AS(scale(bad), ScaleError);
}

TEST_CASE("observations outside a known range abort") {
  const FunctionOracle f("f", ConstraintSet::unconstrained(1), [](const SpinPoint& x) { return x[0] > 0 ? 5.0 : 0.0; },
                         KnownRange{0.0, 4.0});
  const ScaledOracle s(f);
  Rng rng(11);
  CHECK(s.observe(sp({-1}), rng).scaled == -1.0);
  CHECK_THROWS_AS(s.observe(sp({1}), rng), ScaleError);
  CHECK(s.regret_reference() == -1.0);
  CHECK_FALSE(s.reference_is_level());

  const FunctionOracle lvl("lvl", ConstraintSet::unconstrained(1), [](const SpinPoint& x) { return 3.0 * x[0]; },
                           ReferenceLevel{-10.0});
  const ScaledOracle ls(lvl);
  CHECK(ls.reference_is_level());
  CHECK(ls.regret_reference() == -10.0);
  CHECK(ls.observe(sp({1}), rng).scaled == 3.0);
}

TEST_CASE("oracles are deterministic apart from declared noise") {
  Rng a(12), b(12);
  const ContaminationProblem p1 = ContaminationProblem::make(a, ContaminationParams{.d = 8});
  const ContaminationProblem p2 = ContaminationProblem::make(b, ContaminationParams{.d = 8});
  Rng q(13);
  for (int k = 0; k < 50; ++k) {
    const SpinPoint x = sample_uniform(p1.constraint(), q);
    REQUIRE(p1.evaluate(x) == p1.evaluate(x));
    REQUIRE(p1.evaluate(x) == p2.evaluate(x));
  }
}

TEST_CASE("counting wrapper counts evaluations") {
  const NQueensProblem prob(4, 0.0);
  const CountingOracle counted(prob);
  Rng rng(14);
  for (int k = 0; k < 17; ++k) (void)counted.evaluate(sample_uniform(prob.constraint(), rng));
  CHECK(counted.calls() == 17);
}

TEST_CASE("instance files round-trip exactly") {
  const auto dir = std::filesystem::temp_directory_path();
  Rng rng(15);
  const IsingProblem ising = IsingProblem::make(rng, 3, 3, 0.02);
  const ContaminationProblem cont = ContaminationProblem::make(rng, ContaminationParams{.d = 9, .mc_paths = 12});
  const NQueensProblem queens(6, 0.05);
  const std::vector<const Oracle*> all{&ising, &cont, &queens};
  int idx = 0;
  for (const Oracle* o : all) {
    const auto path = (dir / ("comex_instance_" + std::to_string(idx++) + ".txt")).string();
    save_instance_file(*o, path);
    const auto back = load_instance_file(path);
    std::filesystem::remove(path);
    CHECK(back->descriptor() == o->descriptor());
    CHECK(back->constraint() == o->constraint());
    CHECK(back->noise_sigma() == o->noise_sigma());
    Rng q(16);
    for (int k = 0; k < 40; ++k) {
      const SpinPoint x = sample_uniform(o->constraint(), q);
      REQUIRE(back->evaluate(x) == o->evaluate(x));
    }
  }
  std::stringstream unknown("kind = spin-glass\n");
  CHECK_THROWS_AS(read_instance(unknown), std::runtime_error);
  CHECK_THROWS_AS(load_instance_file((dir / "comex_missing_instance.txt").string()), std::runtime_error);
}
