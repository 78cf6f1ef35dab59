#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "comex/boolean_domain.hpp"
#include "comex/oracle.hpp"

namespace comex {

// ---------------------------------------------------------------------------
// Ising sparsification
//
// p(z) is a zero-field Ising model on a grid with couplings J_e; a query keeps
// the edges whose spin is +1 and the objective is KL(p || q_x) + lambda_reg *
// (#kept edges), where q_x uses only the kept couplings. Energies are z^T J z,
// i.e. twice the sum over edges of J_e z_i z_j.
// ---------------------------------------------------------------------------

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
};

// Row-major grid: for each node, its right edge then its down edge.
std::vector<Edge> grid_edges(std::size_t rows, std::size_t cols);

class IsingProblem : public Oracle {
 public:
  static constexpr std::size_t kMaxNodes = 20;

  IsingProblem(std::size_t rows, std::size_t cols, std::vector<double> couplings, double lambda_reg);

  // Couplings drawn from U[0.05, 5].
  static IsingProblem make(Rng& rng, std::size_t rows = 4, std::size_t cols = 4, double lambda_reg = 0.01);

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] std::size_t n_nodes() const { return rows_ * cols_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<double>& couplings() const { return couplings_; }
  [[nodiscard]] double lambda_reg() const { return lambda_reg_; }
  [[nodiscard]] double log_partition() const { return log_zp_; }
  // E_p[z_u z_v] per edge.
  [[nodiscard]] const std::vector<double>& pair_expectations() const { return pair_exp_; }

  // KL(p || q_x) alone.
  [[nodiscard]] double kl_to_sparsified(const SpinPoint& x) const;

  [[nodiscard]] double evaluate(const SpinPoint& x) const override;
  [[nodiscard]] const ConstraintSet& constraint() const override { return constraint_; }
  [[nodiscard]] std::string descriptor() const override;
  [[nodiscard]] ScaleBounds scale_bounds() const override { return bounds_; }
  void write_instance(std::ostream& os) const override;

  // Exact [min, max] over all 2^|E| subsets, when 2^(|E| + n) is small enough.
  [[nodiscard]] bool bounds_are_exact() const { return exact_; }
  // Exhaustive argmin; throws std::domain_error when the instance is too large.
  [[nodiscard]] std::pair<SpinPoint, double> exhaustive_minimum() const;

 private:
  [[nodiscard]] double log_partition_for(const std::vector<double>& edge_weights) const;

  std::size_t rows_;
  std::size_t cols_;
  std::vector<Edge> edges_;
  std::vector<double> couplings_;
  double lambda_reg_;
  ConstraintSet constraint_;
  double log_zp_ = 0.0;
  std::vector<double> pair_exp_;
  ScaleBounds bounds_;
  bool exact_ = false;
};

// ---------------------------------------------------------------------------
// Contamination control
//
// Each stage i either intervenes (x_i = 1, cost c_i) or not. Along every frozen
// Monte-Carlo path the contaminated fraction evolves as
//   z_i = a_i (1 - x_i)(1 - z_{i-1}) + (1 - b_i x_i) z_{i-1}
// and every stage pays rho/T for each path with z_i > u.
// ---------------------------------------------------------------------------

struct ContaminationParams {
  std::size_t d = 21;
  std::size_t mc_paths = 100;
  double upper_limit = 0.1;
  double cost = 1.0;
  double penalty = 1.0;
  double lambda_reg = 0.01;
  // Beta(alpha, beta) shapes.
  double z0_alpha = 1.0, z0_beta = 30.0;
  double rate_alpha = 1.0, rate_beta = 17.0 / 3.0;
  double restore_alpha = 1.0, restore_beta = 3.0 / 7.0;
  // Enumerate all 2^d decisions for exact scaling bounds when d is at most this.
  std::size_t exact_bounds_max_d = 24;
};

double sample_beta(double a, double b, Rng& rng);

class ContaminationProblem : public Oracle {
 public:
  // z0 has one entry per path; rates and restores are stage-major (d x T).
  ContaminationProblem(std::size_t d, std::size_t mc_paths, double upper_limit, double penalty, double lambda_reg,
                       std::vector<double> costs, std::vector<double> z0, std::vector<double> rates,
                       std::vector<double> restores, std::size_t exact_bounds_max_d = 24);

  static ContaminationProblem make(Rng& rng, const ContaminationParams& params = {});

  [[nodiscard]] std::size_t dim() const { return d_; }
  [[nodiscard]] std::size_t mc_paths() const { return paths_; }
  [[nodiscard]] double upper_limit() const { return upper_; }
  [[nodiscard]] double penalty() const { return penalty_; }
  [[nodiscard]] double lambda_reg() const { return lambda_reg_; }
  [[nodiscard]] const std::vector<double>& costs() const { return costs_; }
  [[nodiscard]] const std::vector<double>& initial() const { return z0_; }
  [[nodiscard]] double rate(std::size_t stage, std::size_t path) const { return rates_[stage * paths_ + path]; }
  [[nodiscard]] double restore(std::size_t stage, std::size_t path) const { return restores_[stage * paths_ + path]; }

  [[nodiscard]] double evaluate(const SpinPoint& x) const override;
  [[nodiscard]] const ConstraintSet& constraint() const override { return constraint_; }
  [[nodiscard]] std::string descriptor() const override;
  [[nodiscard]] ScaleBounds scale_bounds() const override { return bounds_; }
  void write_instance(std::ostream& os) const override;
  [[nodiscard]] bool bounds_are_exact() const { return exact_; }

  // Exact min and max over all 2^d decisions (depth-first over stages).
  [[nodiscard]] KnownRange exhaustive_range() const;

 private:
  std::size_t d_;
  std::size_t paths_;
  double upper_;
  double penalty_;
  double lambda_reg_;
  std::vector<double> costs_;
  std::vector<double> z0_;
  std::vector<double> rates_;
  std::vector<double> restores_;
  ConstraintSet constraint_;
  ScaleBounds bounds_;
  bool exact_ = false;
};

// ---------------------------------------------------------------------------
// Noisy n-queens on an n x n board (cell (i, j) is coordinate i*n + j),
// restricted to placements of exactly n queens.
// ---------------------------------------------------------------------------

struct QueensEnergy {
  double rows = 0.0;   // sum_i (queens in row i - 1)^2
  double cols = 0.0;   // sum_j (queens in column j - 1)^2
  double diags = 0.0;  // pairs sharing a diagonal, both directions
  [[nodiscard]] double total() const { return rows + cols + diags; }
};

QueensEnergy nqueens_energy_terms(std::size_t n, const SpinPoint& x);
double nqueens_energy(std::size_t n, const SpinPoint& x);

class NQueensProblem : public Oracle {
 public:
  explicit NQueensProblem(std::size_t n, double noise_sigma = 0.02);

  [[nodiscard]] std::size_t board_size() const { return n_; }
  // Energy of the queens packed into the first n cells; used as the scaling max.
  [[nodiscard]] double scaling_max() const { return max_; }

  [[nodiscard]] double evaluate(const SpinPoint& x) const override { return nqueens_energy(n_, x); }
  [[nodiscard]] const ConstraintSet& constraint() const override { return constraint_; }
  [[nodiscard]] std::string descriptor() const override;
  [[nodiscard]] ScaleBounds scale_bounds() const override { return KnownRange{0.0, max_}; }
  [[nodiscard]] double noise_sigma() const override { return sigma_; }
  void write_instance(std::ostream& os) const override;

 private:
  std::size_t n_;
  double sigma_;
  ConstraintSet constraint_;
  double max_;
};

// Scaled energy plus N(0, sigma^2) noise.
double nqueens_evaluate(const NQueensProblem& prob, const SpinPoint& x, Rng& noise_rng);

// Placement from a row -> column assignment.
SpinPoint queens_from_columns(std::span<const std::size_t> column_of_row);

// All n-queens solutions by backtracking, as row -> column assignments.
std::vector<std::vector<std::size_t>> solve_nqueens(std::size_t n);

// ---------------------------------------------------------------------------
// Instance files: "key = value" text with a `kind` key; reals as hex floats.
// ---------------------------------------------------------------------------

std::unique_ptr<Oracle> read_instance(std::istream& is);
std::unique_ptr<Oracle> load_instance_file(const std::string& path);
void save_instance_file(const Oracle& oracle, const std::string& path);

}  // namespace comex
