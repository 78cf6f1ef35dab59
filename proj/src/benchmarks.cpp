#include "comex/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "comex/kv_text.hpp"

namespace comex {

// ---------------------------------------------------------------------------
// Ising
// ---------------------------------------------------------------------------

std::vector<Edge> grid_edges(std::size_t rows, std::size_t cols) {
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto node = static_cast<std::uint32_t>(r * cols + c);
      if (c + 1 < cols) edges.push_back({node, node + 1});
      if (r + 1 < rows) edges.push_back({node, static_cast<std::uint32_t>(node + cols)});
    }
  }
  return edges;
}

namespace {

// log sum_s exp(2 sum_e w_e z_u z_v) over all 2^n spin states; optionally
// returns the normalized probabilities.
double ising_log_partition(std::size_t n, const std::vector<Edge>& edges, const std::vector<double>& w,
                           std::vector<double>* probs) {
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> energy(count);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < count; ++s) {
    double e = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (w[k] == 0.0) continue;
      const bool differ = ((s >> edges[k].u) ^ (s >> edges[k].v)) & 1U;
      e += differ ? -w[k] : w[k];
    }
    energy[s] = 2.0 * e;
    top = std::max(top, energy[s]);
  }
  double sum = 0.0;
  for (auto& e : energy) {
    e = std::exp(e - top);
    sum += e;
  }
  if (probs) {
    for (auto& e : energy) e /= sum;
    *probs = std::move(energy);
  }
  return top + std::log(sum);
}

}  // namespace

IsingProblem::IsingProblem(std::size_t rows, std::size_t cols, std::vector<double> couplings, double lambda_reg)
    : rows_(rows),
      cols_(cols),
      edges_(grid_edges(rows, cols)),
      couplings_(std::move(couplings)),
      lambda_reg_(lambda_reg),
      constraint_(ConstraintSet::unconstrained(std::max<std::size_t>(1, edges_.size()))) {
  if (rows * cols > kMaxNodes) throw std::invalid_argument("ising: more than 20 nodes cannot be enumerated");
  if (edges_.empty()) throw std::invalid_argument("ising: grid has no edges");
  if (couplings_.size() != edges_.size()) throw std::invalid_argument("ising: one coupling per edge required");
  for (double j : couplings_) {
    if (!std::isfinite(j)) throw std::invalid_argument("ising: non-finite coupling");
  }
  std::vector<double> probs;
  log_zp_ = ising_log_partition(n_nodes(), edges_, couplings_, &probs);
  pair_exp_.assign(edges_.size(), 0.0);
  for (std::uint64_t s = 0; s < probs.size(); ++s) {
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const bool differ = ((s >> edges_[k].u) ^ (s >> edges_[k].v)) & 1U;
      pair_exp_[k] += differ ? -probs[s] : probs[s];
    }
  }

  const std::size_t n_edges = edges_.size();
  if (n_edges + n_nodes() <= 24) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n_edges); ++k) {
      const double v = evaluate(point_from_index(k, n_edges));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    bounds_ = KnownRange{lo, hi};
    exact_ = true;
  } else {
    // 0 <= KL(p || q_x) <= 2 sum |J|: the deleted-edge moment term is at most
    // 2 sum_deleted |J|, log Z_q <= n log 2 + 2 sum_kept |J| and log Z_p >= n log 2.
    double total = 0.0;
    for (double j : couplings_) total += std::fabs(j);
    bounds_ = KnownRange{0.0, 2.0 * total + lambda_reg_ * static_cast<double>(n_edges)};
  }
}

IsingProblem IsingProblem::make(Rng& rng, std::size_t rows, std::size_t cols, double lambda_reg) {
  if (rows * cols > kMaxNodes) throw std::invalid_argument("ising: more than 20 nodes cannot be enumerated");
  std::uniform_real_distribution<double> coupling(0.05, 5.0);
  std::vector<double> j(grid_edges(rows, cols).size());
  for (auto& v : j) v = coupling(rng);
  return IsingProblem(rows, cols, std::move(j), lambda_reg);
}

double IsingProblem::log_partition_for(const std::vector<double>& edge_weights) const {
  return ising_log_partition(n_nodes(), edges_, edge_weights, nullptr);
}

double IsingProblem::kl_to_sparsified(const SpinPoint& x) const {
  if (x.size() != edges_.size()) throw std::invalid_argument("ising: query length must equal the edge count");
  std::vector<double> kept(edges_.size(), 0.0);
  double moment = 0.0;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (x[k] > 0) {
      kept[k] = couplings_[k];
    } else {
      moment += 2.0 * couplings_[k] * pair_exp_[k];
    }
  }
  return moment + log_partition_for(kept) - log_zp_;
}

double IsingProblem::evaluate(const SpinPoint& x) const {
  return kl_to_sparsified(x) + lambda_reg_ * static_cast<double>(x.count_plus());
}

std::string IsingProblem::descriptor() const {
  std::ostringstream os;
  os << "ising(" << rows_ << "x" << cols_ << ",edges=" << edges_.size() << ",lambda_reg=" << lambda_reg_ << ")";
  return os.str();
}

std::pair<SpinPoint, double> IsingProblem::exhaustive_minimum() const {
  const std::size_t n_edges = edges_.size();
  if (n_edges > 24) throw std::domain_error("ising: too many edges for exhaustive search");
  SpinPoint best;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << n_edges); ++k) {
    auto x = point_from_index(k, n_edges);
    const double v = evaluate(x);
    if (v < best_v) {
      best_v = v;
      best = std::move(x);
    }
  }
  return {best, best_v};
}

void IsingProblem::write_instance(std::ostream& os) const {
  kv::Document doc;
  doc.set("kind", "ising");
  doc.set_int("rows", static_cast<long long>(rows_));
  doc.set_int("cols", static_cast<long long>(cols_));
  doc.set_real("lambda_reg", lambda_reg_);
  doc.set_reals("couplings", couplings_);
  doc.write(os);
}

// ---------------------------------------------------------------------------
// Contamination
// ---------------------------------------------------------------------------

double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

ContaminationProblem::ContaminationProblem(std::size_t d, std::size_t mc_paths, double upper_limit, double penalty,
                                           double lambda_reg, std::vector<double> costs, std::vector<double> z0,
                                           std::vector<double> rates, std::vector<double> restores,
                                           std::size_t exact_bounds_max_d)
    : d_(d),
      paths_(mc_paths),
      upper_(upper_limit),
      penalty_(penalty),
      lambda_reg_(lambda_reg),
      costs_(std::move(costs)),
      z0_(std::move(z0)),
      rates_(std::move(rates)),
      restores_(std::move(restores)),
      constraint_(ConstraintSet::unconstrained(std::max<std::size_t>(1, d))) {
  if (d == 0 || mc_paths == 0) throw std::invalid_argument("contamination: d and mc_paths must be positive");
  if (costs_.size() != d || z0_.size() != mc_paths || rates_.size() != d * mc_paths ||
      restores_.size() != d * mc_paths) {
    throw std::invalid_argument("contamination: parameter arrays have the wrong size");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!std::all_of(z0_.begin(), z0_.end(), in_unit) || !std::all_of(rates_.begin(), rates_.end(), in_unit) ||
      !std::all_of(restores_.begin(), restores_.end(), in_unit)) {
    throw std::invalid_argument("contamination: rates must lie in [0, 1]");
  }
  if (d <= exact_bounds_max_d) {
    bounds_ = exhaustive_range();
    exact_ = true;
  } else {
    double total_cost = 0.0;
    for (double c : costs_) total_cost += std::max(c, 0.0);
    bounds_ = KnownRange{0.0, total_cost + (penalty_ + lambda_reg_) * static_cast<double>(d)};
  }
}

ContaminationProblem ContaminationProblem::make(Rng& rng, const ContaminationParams& params) {
  const std::size_t d = params.d;
  const std::size_t t = params.mc_paths;
  std::vector<double> z0(t);
  for (auto& v : z0) v = sample_beta(params.z0_alpha, params.z0_beta, rng);
  std::vector<double> rates(d * t);
  for (auto& v : rates) v = sample_beta(params.rate_alpha, params.rate_beta, rng);
  std::vector<double> restores(d * t);
  for (auto& v : restores) v = sample_beta(params.restore_alpha, params.restore_beta, rng);
  return ContaminationProblem(d, t, params.upper_limit, params.penalty, params.lambda_reg,
                              std::vector<double>(d, params.cost), std::move(z0), std::move(rates),
                              std::move(restores), params.exact_bounds_max_d);
}

double ContaminationProblem::evaluate(const SpinPoint& x) const {
  if (x.size() != d_) throw std::invalid_argument("contamination: dimension mismatch");
  double value = 0.0;
  for (std::size_t i = 0; i < d_; ++i) {
    if (x[i] > 0) value += costs_[i] + lambda_reg_;
  }
  std::size_t violations = 0;
  for (std::size_t path = 0; path < paths_; ++path) {
    double z = z0_[path];
    for (std::size_t i = 0; i < d_; ++i) {
      const double xi = x[i] > 0 ? 1.0 : 0.0;
      z = rate(i, path) * (1.0 - xi) * (1.0 - z) + (1.0 - restore(i, path) * xi) * z;
      violations += z > upper_;
    }
  }
  return value + penalty_ / static_cast<double>(paths_) * static_cast<double>(violations);
}

KnownRange ContaminationProblem::exhaustive_range() const {
  // Stage costs are prefix-additive, so a depth-first walk over the decision
  // tree shares the path states of common prefixes.
  std::vector<double> z((d_ + 1) * paths_);
  std::copy(z0_.begin(), z0_.end(), z.begin());
  KnownRange out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  const double per_violation = penalty_ / static_cast<double>(paths_);

  auto walk = [&](auto&& self, std::size_t stage, double acc) -> void {
    if (stage == d_) {
      out.min = std::min(out.min, acc);
      out.max = std::max(out.max, acc);
      return;
    }
    const double* prev = &z[stage * paths_];
    double* next = &z[(stage + 1) * paths_];
    for (int xi = 0; xi <= 1; ++xi) {
      std::size_t violations = 0;
      for (std::size_t path = 0; path < paths_; ++path) {
        const double zp = prev[path];
        const double zn = xi ? (1.0 - restore(stage, path)) * zp : rate(stage, path) * (1.0 - zp) + zp;
        next[path] = zn;
        violations += zn > upper_;
      }
      const double stage_cost = (xi ? costs_[stage] + lambda_reg_ : 0.0) + per_violation * static_cast<double>(violations);
      self(self, stage + 1, acc + stage_cost);
    }
  };
  walk(walk, 0, 0.0);
  return out;
}

std::string ContaminationProblem::descriptor() const {
  std::ostringstream os;
  os << "contamination(d=" << d_ << ",paths=" << paths_ << ",lambda_reg=" << lambda_reg_ << ")";
  return os.str();
}

void ContaminationProblem::write_instance(std::ostream& os) const {
  kv::Document doc;
  doc.set("kind", "contamination");
  doc.set_int("d", static_cast<long long>(d_));
  doc.set_int("mc_paths", static_cast<long long>(paths_));
  doc.set_real("upper_limit", upper_);
  doc.set_real("penalty", penalty_);
  doc.set_real("lambda_reg", lambda_reg_);
  doc.set_reals("costs", costs_);
  doc.set_reals("z0", z0_);
  doc.set_reals("rates", rates_);
  doc.set_reals("restores", restores_);
  doc.write(os);
}

// ---------------------------------------------------------------------------
// n-queens
// ---------------------------------------------------------------------------

QueensEnergy nqueens_energy_terms(std::size_t n, const SpinPoint& x) {
  if (x.size() != n * n) throw std::invalid_argument("nqueens: point length must be n*n");
  std::vector<int> row(n, 0), col(n, 0), diag(2 * n - 1, 0), anti(2 * n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (x[i * n + j] < 0) continue;
      ++row[i];
      ++col[j];
      ++diag[i + n - 1 - j];
      ++anti[i + j];
    }
  }
  QueensEnergy e;
  for (std::size_t k = 0; k < n; ++k) {
    e.rows += (row[k] - 1.0) * (row[k] - 1.0);
    e.cols += (col[k] - 1.0) * (col[k] - 1.0);
  }
  for (std::size_t k = 0; k < 2 * n - 1; ++k) {
    e.diags += diag[k] * (diag[k] - 1) / 2 + anti[k] * (anti[k] - 1) / 2;
  }
  return e;
}

double nqueens_energy(std::size_t n, const SpinPoint& x) { return nqueens_energy_terms(n, x).total(); }

NQueensProblem::NQueensProblem(std::size_t n, double noise_sigma)
    : n_(n), sigma_(noise_sigma), constraint_(ConstraintSet::sum_constrained(n * n, n)) {
  if (n < 2) throw std::invalid_argument("nqueens: board side must be at least 2");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("nqueens: noise sigma must be nonnegative");
  std::vector<std::int8_t> spins(n * n, -1);
  std::fill(spins.begin(), spins.begin() + static_cast<std::ptrdiff_t>(n), std::int8_t{1});
  max_ = nqueens_energy(n, SpinPoint(std::move(spins)));
}

std::string NQueensProblem::descriptor() const {
  std::ostringstream os;
  os << "nqueens(n=" << n_ << ",sigma=" << sigma_ << ")";
  return os.str();
}

void NQueensProblem::write_instance(std::ostream& os) const {
  kv::Document doc;
  doc.set("kind", "nqueens");
  doc.set_int("n", static_cast<long long>(n_));
  doc.set_real("noise_sigma", sigma_);
  doc.write(os);
}

double nqueens_evaluate(const NQueensProblem& prob, const SpinPoint& x, Rng& noise_rng) {
  return ScaledOracle(prob).observe(x, noise_rng).scaled;
}

SpinPoint queens_from_columns(std::span<const std::size_t> column_of_row) {
  const std::size_t n = column_of_row.size();
  std::vector<std::int8_t> spins(n * n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (column_of_row[i] >= n) throw std::invalid_argument("queens_from_columns: column out of range");
    spins[i * n + column_of_row[i]] = 1;
  }
  return SpinPoint(std::move(spins));
}

std::vector<std::vector<std::size_t>> solve_nqueens(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cols(n);
  std::vector<bool> used_col(n, false), used_diag(2 * n, false), used_anti(2 * n, false);
  auto place = [&](auto&& self, std::size_t r) -> void {
    if (r == n) {
      out.push_back(cols);
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t dg = r + n - c;
      const std::size_t an = r + c;
      if (used_col[c] || used_diag[dg] || used_anti[an]) continue;
      used_col[c] = used_diag[dg] = used_anti[an] = true;
      cols[r] = c;
      self(self, r + 1);
      used_col[c] = used_diag[dg] = used_anti[an] = false;
    }
  };
  place(place, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

std::unique_ptr<Oracle> read_instance(std::istream& is) {
  const auto doc = kv::Document::read(is);
  const auto& kind = doc.get("kind");
  auto count = [&](const char* key) {
    const auto v = doc.get_int(key);
    if (v <= 0) throw std::runtime_error(std::string("instance: '") + key + "' must be positive");
    return static_cast<std::size_t>(v);
  };
  if (kind == "ising") {
    return std::make_unique<IsingProblem>(count("rows"), count("cols"), doc.get_reals("couplings"),
                                          doc.get_real("lambda_reg"));
  }
  if (kind == "contamination") {
    const std::size_t d = count("d");
    return std::make_unique<ContaminationProblem>(d, count("mc_paths"), doc.get_real("upper_limit"),
                                                  doc.get_real("penalty"), doc.get_real("lambda_reg"),
                                                  doc.get_reals("costs"), doc.get_reals("z0"),
                                                  doc.get_reals("rates"), doc.get_reals("restores"));
  }
  if (kind == "nqueens") return std::make_unique<NQueensProblem>(count("n"), doc.get_real("noise_sigma"));
  throw std::runtime_error("instance: unknown kind '" + kind + "'");
}

std::unique_ptr<Oracle> load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file '" + path + "'");
  return read_instance(in);
}

void save_instance_file(const Oracle& oracle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file '" + path + "'");
  out << "# COMEX benchmark instance\n";
  oracle.write_instance(out);
  if (!out) throw std::runtime_error("failed writing instance file '" + path + "'");
}

}  // namespace comex
