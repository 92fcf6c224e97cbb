#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rosb/policy.hpp"

namespace rosb {

// Per-step true estimation error for a batch of independent episodes,
// in meters. Rectangular: episodes that terminate early are padded with
// their final error.
struct RunMatrix {
  std::string policy_id;
  std::uint64_t seed = 0;
  std::size_t n_runs = 0;
  std::size_t steps = 0;
  std::vector<double> e_m;  // row-major [run][step]

  double at(std::size_t run, std::size_t step) const { return e_m[run * steps + step]; }
  double& at(std::size_t run, std::size_t step) { return e_m[run * steps + step]; }
};

// Fresh policy instance per run; instances may share read-only weights.
using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

// Greedy rollouts, one child seed per run index. Runs are independent and
// merged in run order, so the matrix does not depend on the execution mode.
RunMatrix evaluate(const PolicyFactory& make_policy, const EnvConfig& cfg,
                   std::size_t n_runs, std::uint64_t seed, const std::string& policy_id);

// One episode with full state recording; run_seed should be
// derive_seed(seed, {kStreamEval, run}) to reproduce a row of evaluate().
std::vector<TrajectoryRow> episode_trajectory(Policy& policy, const EnvConfig& cfg,
                                              std::uint64_t run_seed);

// Loads an actor snapshot; the greedy action is the network's mean action.
class ActorPolicy final : public Policy {
 public:
  explicit ActorPolicy(const std::filesystem::path& checkpoint);
  double action(const Observation& obs) override;

 private:
  std::shared_ptr<const class Mlp> net_;
  bool squashed_ = false;
};

PolicyFactory actor_policy_factory(const std::filesystem::path& checkpoint);

// Mean of the middle half: floor(n/4) values trimmed from each end.
// Throws std::invalid_argument for fewer than 4 values.
double iqm(std::vector<double> values);

// Fraction of (a_i, b_j) pairs with a_i < b_j, ties counting one half.
// For error metrics this is the probability that a improves on b.
double probability_of_improvement(const std::vector<double>& a,
                                  const std::vector<double>& b);

struct RollingSeries {
  std::vector<double> mean;
  std::vector<double> sd;  // population SD over the same trailing window
};

// Trailing window; the first window-1 entries average what is available.
RollingSeries rolling(const std::vector<double>& values, std::size_t window);

struct SweepPoint {
  double radius_m = 0.0;
  double rmse_m = 0.0;
  std::size_t n_used = 0;  // runs with a usable solve
};

// Circle survey study: the agent moves on an ideal circle of each radius
// around the target, takes `window` noisy range measurements one chord
// apart, and solves for the target once per run.
std::vector<SweepPoint> radius_sweep(double depth_m, const std::vector<double>& radii_m,
                                     int window, std::size_t n_runs, std::uint64_t seed,
                                     const NoiseModel& noise = NoiseModel{});

// The reported windows: transient covers steps 1-50, steady state 150-200
// (1-based, inclusive).
inline constexpr std::size_t kTransientFirst = 1;
inline constexpr std::size_t kTransientLast = 50;
inline constexpr std::size_t kSteadyFirst = 150;
inline constexpr std::size_t kSteadyLast = 200;

struct Metrics {
  std::string policy_id;
  std::size_t n_runs = 0;
  std::size_t steps = 0;
  std::vector<double> per_step_iqm;   // IQM across runs, per step (meters)
  std::vector<double> per_step_sd;    // population SD across runs
  std::vector<double> per_step_rmse;  // sqrt(mean of squares) across runs
  double transient_iqm = 0.0;         // IQM of per-run transient means
  double steady_iqm = 0.0;
  std::vector<double> per_run_transient_mean;
  std::vector<double> per_run_steady_mean;
  std::map<std::string, double> prob_improvement_vs;
};

Metrics compute_metrics(const RunMatrix& m);  // needs n_runs >= 4

void write_metrics(const std::filesystem::path& path, const Metrics& m);
Metrics read_metrics(const std::filesystem::path& path);  // throws on missing or malformed input

// Long format: run,step,e_q_m with steps numbered from 1.
void write_run_matrix_csv(std::ostream& os, const RunMatrix& m);

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points, int window);

struct CompareReport {
  double a_transient_iqm = 0.0, b_transient_iqm = 0.0;
  double a_steady_iqm = 0.0, b_steady_iqm = 0.0;
  double delta_transient_pct = 0.0;  // (a - b) / b * 100, negative = a better
  double delta_steady_pct = 0.0;
  double prob_improvement = 0.0;  // P(a's transient mean < b's), ties half
};

// Throws std::invalid_argument when run counts or step counts differ.
CompareReport compare(const Metrics& a, const Metrics& b);

void write_compare_json(const std::filesystem::path& path, const CompareReport& r,
                        const Metrics& a, const Metrics& b);
// Side-by-side per-step IQM curves: step,a_iqm_m,b_iqm_m.
void write_compare_csv(std::ostream& os, const Metrics& a, const Metrics& b);

}  // namespace rosb
