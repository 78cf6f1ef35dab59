#include "comex/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "comex/acquisition.hpp"
#include "comex/baselines.hpp"
#include "comex/benchmarks.hpp"
#include "comex/fourier_basis.hpp"

namespace comex {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

RunTrace run_comex(const Oracle& oracle, const ComexOptions& opts, const StopRule& stop, RunStreams& streams,
                   std::uint64_t seed) {
  if (stop.eval_budget < 1) throw std::invalid_argument("evaluation budget must be at least 1");
  if (opts.chains < 1) throw std::invalid_argument("chains must be at least 1");
  if (!(opts.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(opts.omega > 0.0)) throw std::invalid_argument("omega must be positive");

  const ScaledOracle scaled(oracle);
  const ConstraintSet& c = oracle.constraint();
  const std::size_t d = c.dim();
  auto basis = std::make_shared<const MonomialBasis>(d, opts.m);
  SurrogateModel model = init_model(basis, opts.lambda);
  LearningRateState lr;
  lr.mode = opts.eta;
  const AnnealSchedule sched{opts.omega, d};
  const std::size_t n_iters = opts.inner_iters > 0 ? opts.inner_iters : 20 * d;

  TraceRecorder rec("comex", scaled, seed);
  std::set<SpinPoint> seen;

  auto acquire = [&]() {
    const SurrogateScorer scorer(model);
    SpinPoint best;
    double best_score = 0.0;
    for (std::size_t k = 0; k < opts.chains; ++k) {
      const SpinPoint start = opts.warm_start && rec.trace().size() > 0 ? rec.trace().best_point
                                                                         : sample_uniform(c, streams.acquisition);
      AnnealStats st;
      SpinPoint x = simulated_annealing(scorer, c, sched, n_iters, start, streams.acquisition, &st);
      if (k == 0 || st.final_score < best_score) {
        best = std::move(x);
        best_score = st.final_score;
      }
    }
    return best;
  };

  for (std::size_t t = 0; t < stop.eval_budget; ++t) {
    auto t0 = Clock::now();
    SpinPoint x = acquire();
    if (opts.dedup && seen.count(x) != 0) x = acquire();
    const double acq_s = seconds_since(t0);

    t0 = Clock::now();
    Observation obs;
    try {
      obs = scaled.observe(x, streams.noise);
    } catch (const std::exception& e) {
      rec.mutable_trace().error = e.what();
      break;
    }
    const double oracle_s = seconds_since(t0);

    t0 = Clock::now();
    update(model, lr, x, obs.scaled);
    const double upd_s = seconds_since(t0);

    if (opts.dedup) seen.insert(x);
    try {
      rec.record(x, obs, acq_s, upd_s, oracle_s);
    } catch (const std::exception& e) {
      rec.mutable_trace().error = e.what();
      break;
    }
    if (clock_exhausted(stop, rec.trace())) {
      rec.mutable_trace().stopped_by_clock = t + 1 < stop.eval_budget;
      break;
    }
  }
  return rec.take();
}

// --- config ------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (comex.m < 1) throw std::invalid_argument("m must be at least 1");
  if (eval_budget < 1) throw std::invalid_argument("eval_budget must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("seeds must be nonempty");
  if (algorithm != "comex" && algorithm != "rs" && algorithm != "sa") {
    throw std::invalid_argument("unknown algorithm '" + algorithm + "' (expected comex, rs or sa)");
  }
  if (instance_path.empty() && problem != "nqueens" && problem != "contamination" && problem != "ising") {
    throw std::invalid_argument("unknown problem '" + problem + "' (expected nqueens, contamination or ising)");
  }
  if (output_format != "csv" && output_format != "json") {
    throw std::invalid_argument("unknown output format '" + output_format + "'");
  }
  if (wall_clock_seconds && !(*wall_clock_seconds > 0.0)) {
    throw std::invalid_argument("wall clock budget must be positive");
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string part;
  auto to_u64 = [&text](const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("malformed seed list '" + text + "'");
    }
    return static_cast<std::uint64_t>(std::stoull(s));
  };
  while (std::getline(ss, part, ',')) {
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_u64(part));
      continue;
    }
    const std::uint64_t lo = to_u64(part.substr(0, dots));
    const std::uint64_t hi = to_u64(part.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty seed range '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("seed list is empty");
  return out;
}

std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::string budget_clock_name(BudgetClock c) {
  switch (c) {
    case BudgetClock::kAlgorithm: return "algorithm";
    case BudgetClock::kOracle: return "oracle";
    case BudgetClock::kTotal: return "total";
  }
  return "total";
}

BudgetClock parse_budget_clock(const std::string& s) {
  if (s == "algorithm") return BudgetClock::kAlgorithm;
  if (s == "oracle") return BudgetClock::kOracle;
  if (s == "total") return BudgetClock::kTotal;
  throw std::invalid_argument("unknown budget clock '" + s + "' (expected algorithm, oracle or total)");
}

RateMode parse_rate_mode(const std::string& s) {
  if (s == "adaptive") return AdaptiveRate{};
  std::size_t pos = 0;
  double eta = 0.0;
  try {
    eta = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be 'adaptive' or a positive number, got '" + s + "'");
  }
  return FixedRate{eta};
}

std::string rate_mode_name(const RateMode& mode) {
  if (const auto* f = std::get_if<FixedRate>(&mode)) {
    std::ostringstream os;
    os << std::setprecision(17) << f->eta;
    return os.str();
  }
  return "adaptive";
}

std::unique_ptr<Oracle> make_oracle(const ExperimentConfig& config, Rng& instance_rng) {
  if (!config.instance_path.empty()) return load_instance_file(config.instance_path);
  if (config.problem == "nqueens") return std::make_unique<NQueensProblem>(config.n, config.noise_sigma);
  if (config.problem == "contamination") {
    ContaminationParams p;
    p.d = config.d;
    p.mc_paths = config.mc_paths;
    p.lambda_reg = config.lambda_reg;
    return std::make_unique<ContaminationProblem>(ContaminationProblem::make(instance_rng, p));
  }
  if (config.problem == "ising") {
    return std::make_unique<IsingProblem>(
        IsingProblem::make(instance_rng, config.ising_rows, config.ising_cols, config.lambda_reg));
  }
  throw std::invalid_argument("unknown problem '" + config.problem + "'");
}

RunTrace run_single(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  RunStreams streams = RunStreams::derive(seed);
  const auto oracle = make_oracle(config, streams.instance);
  StopRule stop;
  stop.eval_budget = config.eval_budget;
  stop.wall_clock_seconds = config.wall_clock_seconds;
  stop.clock = config.budget_clock;
  if (config.algorithm == "rs") return random_search(*oracle, stop, streams, seed);
  if (config.algorithm == "sa") return simulated_annealing_direct(*oracle, stop, config.comex.omega, streams, seed);
  return run_comex(*oracle, config.comex, stop, streams, seed);
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COMEX_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("COMEX_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::vector<RunTrace> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t jobs = config.seeds.size();
  std::vector<RunTrace> out(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
      try {
        out[i] = run_single(config, config.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(jobs);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// --- aggregation -----------------------------------------------------------------

double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty list");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  const double k = static_cast<double>(v.size());
  return std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
}

Summary summarize(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("summarize: no traces");
  std::size_t len = 0;
  for (const auto& tr : traces) {
    if (tr.rows.empty()) throw std::invalid_argument("summarize: trace for seed " + std::to_string(tr.seed) + " is empty");
    len = std::max(len, tr.rows.size());
  }
  Summary s;
  for (const auto& tr : traces) s.padded.push_back(tr.rows.size() < len);
  std::vector<double> col(traces.size());
  for (std::size_t t = 0; t < len; ++t) {
    double time_sum = 0.0;
    std::size_t time_n = 0;
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const auto& rows = traces[k].rows;
      col[k] = t < rows.size() ? rows[t].regret : rows.back().regret;
      if (t < rows.size()) {
        time_sum += rows[t].algorithm_seconds();
        ++time_n;
      }
    }
    s.steps.push_back(t + 1);
    s.mean_regret.push_back(mean(col));
    s.stderr_regret.push_back(standard_error(col));
    s.mean_step_time.push_back(time_sum / static_cast<double>(time_n));
  }
  double all_time = 0.0;
  std::size_t all_n = 0;
  for (const auto& tr : traces) {
    s.final_regrets.push_back(tr.rows.back().regret);
    for (const auto& r : tr.rows) {
      all_time += r.algorithm_seconds();
      ++all_n;
    }
  }
  s.final_mean = mean(s.final_regrets);
  s.final_stderr = standard_error(s.final_regrets);
  s.final_median = median(s.final_regrets);
  s.mean_algorithm_seconds = all_time / static_cast<double>(all_n);
  return s;
}

void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "step,mean_regret,stderr,mean_step_time_s\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    os << s.steps[i] << ',' << s.mean_regret[i] << ',' << s.stderr_regret[i] << ',' << s.mean_step_time[i] << '\n';
  }
  if (!os) throw std::runtime_error("failed to write summary csv");
}

Summary read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "step,mean_regret,stderr,mean_step_time_s") {
    throw std::runtime_error("summary csv: unexpected header");
  }
  Summary s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("summary csv: short row '" + line + "'");
    }
    s.steps.push_back(static_cast<std::size_t>(std::stoull(f[0])));
    s.mean_regret.push_back(std::stod(f[1]));
    s.stderr_regret.push_back(std::stod(f[2]));
    s.mean_step_time.push_back(std::stod(f[3]));
  }
  return s;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["n"] = c.n;
  j["d"] = c.d;
  j["ising_rows"] = c.ising_rows;
  j["ising_cols"] = c.ising_cols;
  j["lambda_reg"] = c.lambda_reg;
  j["noise_sigma"] = c.noise_sigma;
  j["mc_paths"] = c.mc_paths;
  j["instance"] = c.instance_path;
  j["algorithm"] = c.algorithm;
  j["m"] = c.comex.m;
  j["lambda"] = c.comex.lambda;
  j["omega"] = c.comex.omega;
  j["inner_iters"] = c.comex.inner_iters;
  j["eta"] = rate_mode_name(c.comex.eta);
  j["warm_start"] = c.comex.warm_start;
  j["dedup"] = c.comex.dedup;
  j["chains"] = c.comex.chains;
  j["eval_budget"] = c.eval_budget;
  j["wall_clock_seconds"] = c.wall_clock_seconds ? nlohmann::json(*c.wall_clock_seconds) : nlohmann::json(nullptr);
  j["budget_clock"] = budget_clock_name(c.budget_clock);
  j["seeds"] = c.seeds;
  return j;
}

nlohmann::json trace_json(const RunTrace& tr) {
  nlohmann::json j;
  j["algorithm"] = tr.algorithm;
  j["problem"] = tr.problem;
  j["seed"] = tr.seed;
  j["regret_reference"] = tr.regret_reference;
  j["best_point"] = tr.best_point.to_string();
  j["best_scaled"] = tr.best_scaled;
  j["stopped_by_clock"] = tr.stopped_by_clock;
  j["error"] = tr.error ? nlohmann::json(*tr.error) : nlohmann::json(nullptr);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : tr.rows) {
    rows.push_back({{"step", r.step},
                    {"query", r.query.to_string()},
                    {"raw", r.raw},
                    {"scaled", r.scaled},
                    {"best_scaled", r.best_scaled},
                    {"regret", r.regret},
                    {"update_s", r.update_seconds},
                    {"acquisition_s", r.acquisition_seconds},
                    {"oracle_s", r.oracle_seconds}});
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace

void write_json(std::ostream& os, const ExperimentConfig& config, const Summary& s,
                const std::vector<RunTrace>& traces) {
  nlohmann::json j;
  j["config"] = config_json(config);
  nlohmann::json sum;
  sum["step"] = s.steps;
  sum["mean_regret"] = s.mean_regret;
  sum["stderr"] = s.stderr_regret;
  sum["mean_step_time_s"] = s.mean_step_time;
  sum["padded"] = s.padded;
  sum["final_regrets"] = s.final_regrets;
  sum["final_mean"] = s.final_mean;
  sum["final_stderr"] = s.final_stderr;
  sum["final_median"] = s.final_median;
  sum["mean_algorithm_seconds"] = s.mean_algorithm_seconds;
  j["summary"] = std::move(sum);
  nlohmann::json tj = nlohmann::json::array();
  for (const auto& tr : traces) tj.push_back(trace_json(tr));
  j["traces"] = std::move(tj);
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed to write json");
}

void export_results(const ExperimentConfig& config, const Summary& s, const std::vector<RunTrace>& traces) {
  std::ofstream out(config.output_path);
  if (!out) throw std::runtime_error("cannot open '" + config.output_path + "' for writing");
  if (config.output_format == "json") {
    write_json(out, config, s, traces);
  } else {
    write_summary_csv(out, s);
  }
  out.close();
  if (!out) throw std::runtime_error("failed to write '" + config.output_path + "'");
}

}  // namespace comex
