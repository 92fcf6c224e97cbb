#include "rosb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rosb/agents.hpp"
#include "rosb/checkpoint.hpp"
#include "rosb/estimator.hpp"
#include "rosb/iohelp.hpp"
#include "rosb/nn.hpp"
#include "rosb/parallel.hpp"

namespace rosb {

namespace {

using nlohmann::json;

// One greedy episode; returns per-step errors in meters, padded after early
// termination with the final value.
void rollout_row(Policy& policy, const EnvConfig& cfg, std::uint64_t run_seed,
                 double* row, std::size_t steps) {
  Environment env(cfg);
  Rng rng(run_seed);
  policy.reset();
  Observation obs = env.reset(rng);
  double last = env.true_error() * 1000.0;
  for (std::size_t s = 0; s < steps; ++s) {
    if (!env.done()) {
      const StepResult res = env.step(policy.action(obs), rng);
      obs = res.obs;
      last = res.info.e_q * 1000.0;
    }
    row[s] = last;
  }
}

std::vector<double> column(const RunMatrix& m, std::size_t step) {
  std::vector<double> v(m.n_runs);
  for (std::size_t r = 0; r < m.n_runs; ++r) v[r] = m.at(r, step);
  return v;
}

double window_mean(const RunMatrix& m, std::size_t run, std::size_t first,
                   std::size_t last) {
  // first/last are 1-based step numbers, inclusive; column j holds step j+1.
  double sum = 0.0;
  for (std::size_t s = first - 1; s < last; ++s) sum += m.at(run, s);
  return sum / static_cast<double>(last - first + 1);
}

}  // namespace

RunMatrix evaluate(const PolicyFactory& make_policy, const EnvConfig& cfg,
                   std::size_t n_runs, std::uint64_t seed,
                   const std::string& policy_id) {
  cfg.validate();
  if (n_runs == 0) throw std::invalid_argument("evaluate: n_runs must be positive");
  RunMatrix m;
  m.policy_id = policy_id;
  m.seed = seed;
  m.n_runs = n_runs;
  m.steps = static_cast<std::size_t>(cfg.max_steps);
  m.e_m.assign(n_runs * m.steps, 0.0);
  par::parallel_for(n_runs, [&](std::size_t run) {
    auto policy = make_policy();
    rollout_row(*policy, cfg, derive_seed(seed, {kStreamEval, run}),
                &m.e_m[run * m.steps], m.steps);
  });
  return m;
}

std::vector<TrajectoryRow> episode_trajectory(Policy& policy, const EnvConfig& cfg,
                                              std::uint64_t run_seed) {
  Environment env(cfg);
  Rng rng(run_seed);
  policy.reset();
  Observation obs = env.reset(rng);
  while (!env.done()) {
    obs = env.step(policy.action(obs), rng).obs;
  }
  return env.trajectory();
}

ActorPolicy::ActorPolicy(const std::filesystem::path& checkpoint) {
  CkptReader r(checkpoint);
  if (!r.has_string(kActorKindKey))
    throw CorruptCheckpoint("checkpoint has no actor record");
  const std::string& kind = r.str(kActorKindKey);
  if (kind != kActorKindDeterministic && kind != kActorKindSquashed)
    throw CorruptCheckpoint("unknown actor kind '" + kind + "'");
  squashed_ = kind == kActorKindSquashed;
  auto net = std::make_shared<Mlp>(Mlp::load(r, "actor"));
  if (net->input_size() != 7)
    throw CorruptCheckpoint("actor expects a different observation size");
  net_ = std::move(net);
}

double ActorPolicy::action(const Observation& obs) {
  const auto flat = obs.flat();
  Eigen::VectorXd in(7);
  for (int i = 0; i < 7; ++i) in(i) = flat[static_cast<std::size_t>(i)];
  const Eigen::VectorXd out = net_->forward(in);
  return squashed_ ? std::tanh(out(0)) : out(0);
}

PolicyFactory actor_policy_factory(const std::filesystem::path& checkpoint) {
  // Load eagerly so a bad path fails at configuration time, then share.
  auto proto = std::make_shared<ActorPolicy>(checkpoint);
  return [proto]() { return std::make_unique<ActorPolicy>(*proto); };
}

double iqm(std::vector<double> values) {
  if (values.size() < 4)
    throw std::invalid_argument("iqm needs at least 4 values");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 4;
  double sum = 0.0;
  for (std::size_t i = k; i < values.size() - k; ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - 2 * k);
}

double probability_of_improvement(const std::vector<double>& a,
                                  const std::vector<double>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("probability_of_improvement needs non-empty samples");
  double wins = 0.0;
  for (double x : a)
    for (double y : b) {
      if (x < y)
        wins += 1.0;
      else if (x == y)
        wins += 0.5;
    }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

RollingSeries rolling(const std::vector<double>& values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("rolling: window must be >= 1");
  RollingSeries out;
  out.mean.resize(values.size());
  out.sd.resize(values.size());
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    sumsq += values[i] * values[i];
    if (i >= window) {
      sum -= values[i - window];
      sumsq -= values[i - window] * values[i - window];
    }
    const double n = static_cast<double>(i + 1 < window ? i + 1 : window);
    const double mean = sum / n;
    double var = sumsq / n - mean * mean;
    if (var < 0.0) var = 0.0;  // rounding guard
    out.mean[i] = mean;
    out.sd[i] = std::sqrt(var);
  }
  return out;
}

std::vector<SweepPoint> radius_sweep(double depth_m, const std::vector<double>& radii_m,
                                     int window, std::size_t n_runs, std::uint64_t seed,
                                     const NoiseModel& noise) {
  if (radii_m.empty()) throw std::invalid_argument("radius_sweep: no radii given");
  for (double r : radii_m)
    if (!(r > 0.0)) throw std::invalid_argument("radius_sweep: radii must be positive");
  if (window < 3) throw std::invalid_argument("radius_sweep: window must be >= 3");
  if (n_runs == 0) throw std::invalid_argument("radius_sweep: n_runs must be positive");
  noise.validate();

  const double depth = depth_m / 1000.0;
  const double chord = 0.03;  // v * dt at nominal speed
  const std::size_t cells = radii_m.size() * n_runs;
  std::vector<double> err(cells, -1.0);  // negative = unusable solve

  par::parallel_for(cells, [&](std::size_t cell) {
    const std::size_t ri = cell / n_runs;
    const std::size_t run = cell % n_runs;
    const double radius = radii_m[ri] / 1000.0;
    Rng rng = Rng::child(seed, {kStreamSweep, ri, run});
    const double beta = 2.0 * std::asin(std::min(1.0, chord / (2.0 * radius)));
    const double slant = std::hypot(radius, depth);
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    SlidingLs ls(window);
    for (int k = 0; k < window; ++k) {
      const double th = phase + static_cast<double>(k) * beta;
      const double meas =
          slant + rng.normal(noise.epsilon_frac * slant, noise.sigma);
      if (meas < depth) continue;  // unprojectable draw, drop the point
      const double dp = std::sqrt(meas * meas - depth * depth);
      ls.push({Vec2{radius * std::cos(th), radius * std::sin(th)}, dp, k});
    }
    if (ls.size() < 3) return;
    const Estimate est = ls.solve();
    if (!est.valid) return;
    err[cell] = est.q_hat.norm();  // target sits at the origin
  });

  std::vector<SweepPoint> out(radii_m.size());
  for (std::size_t ri = 0; ri < radii_m.size(); ++ri) {
    double sumsq = 0.0;
    std::size_t used = 0;
    for (std::size_t run = 0; run < n_runs; ++run) {
      const double e = err[ri * n_runs + run];
      if (e < 0.0) continue;
      sumsq += e * e;
      ++used;
    }
    out[ri].radius_m = radii_m[ri];
    out[ri].n_used = used;
    out[ri].rmse_m = used == 0 ? std::numeric_limits<double>::quiet_NaN()
                               : std::sqrt(sumsq / static_cast<double>(used)) * 1000.0;
  }
  return out;
}

Metrics compute_metrics(const RunMatrix& m) {
  if (m.n_runs < 4)
    throw std::invalid_argument("compute_metrics needs at least 4 runs");
  if (m.steps < kSteadyLast)
    throw std::invalid_argument("compute_metrics needs at least " +
                                std::to_string(kSteadyLast) + " steps");
  Metrics out;
  out.policy_id = m.policy_id;
  out.n_runs = m.n_runs;
  out.steps = m.steps;
  out.per_step_iqm.resize(m.steps);
  out.per_step_sd.resize(m.steps);
  out.per_step_rmse.resize(m.steps);
  for (std::size_t s = 0; s < m.steps; ++s) {
    const std::vector<double> col = column(m, s);
    out.per_step_iqm[s] = iqm(col);
    double mean = 0.0, sumsq = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(col.size());
    double var = 0.0;
    for (double v : col) {
      var += (v - mean) * (v - mean);
      sumsq += v * v;
    }
    out.per_step_sd[s] = std::sqrt(var / static_cast<double>(col.size()));
    out.per_step_rmse[s] = std::sqrt(sumsq / static_cast<double>(col.size()));
  }
  out.per_run_transient_mean.resize(m.n_runs);
  out.per_run_steady_mean.resize(m.n_runs);
  for (std::size_t r = 0; r < m.n_runs; ++r) {
    out.per_run_transient_mean[r] = window_mean(m, r, kTransientFirst, kTransientLast);
    out.per_run_steady_mean[r] = window_mean(m, r, kSteadyFirst, kSteadyLast);
  }
  out.transient_iqm = iqm(out.per_run_transient_mean);
  out.steady_iqm = iqm(out.per_run_steady_mean);
  return out;
}

void write_metrics(const std::filesystem::path& path, const Metrics& m) {
  json j;
  j["policy_id"] = m.policy_id;
  j["n_runs"] = m.n_runs;
  j["steps"] = m.steps;
  j["transient_window"] = {kTransientFirst, kTransientLast};
  j["steady_window"] = {kSteadyFirst, kSteadyLast};
  j["per_step_iqm"] = m.per_step_iqm;
  j["per_step_sd"] = m.per_step_sd;
  j["per_step_rmse"] = m.per_step_rmse;
  j["transient_iqm"] = m.transient_iqm;
  j["steady_iqm"] = m.steady_iqm;
  j["per_run_transient_mean"] = m.per_run_transient_mean;
  j["per_run_steady_mean"] = m.per_run_steady_mean;
  j["prob_improvement_vs"] = m.prob_improvement_vs;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

Metrics read_metrics(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read metrics file " + path.string());
  json j;
  try {
    is >> j;
    Metrics m;
    m.policy_id = j.at("policy_id").get<std::string>();
    m.n_runs = j.at("n_runs").get<std::size_t>();
    m.steps = j.at("steps").get<std::size_t>();
    m.per_step_iqm = j.at("per_step_iqm").get<std::vector<double>>();
    m.per_step_sd = j.at("per_step_sd").get<std::vector<double>>();
    m.per_step_rmse = j.at("per_step_rmse").get<std::vector<double>>();
    m.transient_iqm = j.at("transient_iqm").get<double>();
    m.steady_iqm = j.at("steady_iqm").get<double>();
    m.per_run_transient_mean = j.at("per_run_transient_mean").get<std::vector<double>>();
    m.per_run_steady_mean = j.at("per_run_steady_mean").get<std::vector<double>>();
    if (j.contains("prob_improvement_vs"))
      m.prob_improvement_vs =
          j.at("prob_improvement_vs").get<std::map<std::string, double>>();
    return m;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed metrics file " + path.string() + ": " + e.what());
  }
}

void write_run_matrix_csv(std::ostream& os, const RunMatrix& m) {
  os << "run,step,e_q_m\n";
  for (std::size_t r = 0; r < m.n_runs; ++r)
    for (std::size_t s = 0; s < m.steps; ++s)
      os << r << ',' << s + 1 << ',' << fmt_double(m.at(r, s)) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     int window) {
  os << "radius_m,window,rmse_m,n_used\n";
  for (const SweepPoint& p : points)
    os << fmt_double(p.radius_m) << ',' << window << ',' << fmt_double(p.rmse_m) << ','
       << p.n_used << '\n';
}

CompareReport compare(const Metrics& a, const Metrics& b) {
  if (a.n_runs != b.n_runs || a.steps != b.steps)
    throw std::invalid_argument("compare: metrics shapes differ (" +
                                std::to_string(a.n_runs) + "x" + std::to_string(a.steps) +
                                " vs " + std::to_string(b.n_runs) + "x" +
                                std::to_string(b.steps) + ")");
  CompareReport r;
  r.a_transient_iqm = a.transient_iqm;
  r.b_transient_iqm = b.transient_iqm;
  r.a_steady_iqm = a.steady_iqm;
  r.b_steady_iqm = b.steady_iqm;
  r.delta_transient_pct =
      (a.transient_iqm - b.transient_iqm) / b.transient_iqm * 100.0;
  r.delta_steady_pct = (a.steady_iqm - b.steady_iqm) / b.steady_iqm * 100.0;
  r.prob_improvement =
      probability_of_improvement(a.per_run_transient_mean, b.per_run_transient_mean);
  return r;
}

void write_compare_json(const std::filesystem::path& path, const CompareReport& r,
                        const Metrics& a, const Metrics& b) {
  json j;
  j["a"] = a.policy_id;
  j["b"] = b.policy_id;
  j["a_transient_iqm"] = r.a_transient_iqm;
  j["b_transient_iqm"] = r.b_transient_iqm;
  j["a_steady_iqm"] = r.a_steady_iqm;
  j["b_steady_iqm"] = r.b_steady_iqm;
  j["delta_transient_pct"] = r.delta_transient_pct;
  j["delta_steady_pct"] = r.delta_steady_pct;
  j["prob_improvement"] = r.prob_improvement;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

void write_compare_csv(std::ostream& os, const Metrics& a, const Metrics& b) {
  os << "step,a_iqm_m,b_iqm_m\n";
  for (std::size_t s = 0; s < a.steps; ++s)
    os << s + 1 << ',' << fmt_double(a.per_step_iqm[s]) << ','
       << fmt_double(b.per_step_iqm[s]) << '\n';
}

}  // namespace rosb
