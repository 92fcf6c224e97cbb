// Times the three parallel kernels in both execution modes and checks that
// the OpenMP path reproduces the serial reference bit for bit.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rosb/agents.hpp"
#include "rosb/baseline.hpp"
#include "rosb/eval.hpp"
#include "rosb/parallel.hpp"
#include "rosb/replay.hpp"

namespace fs = std::filesystem;
using namespace rosb;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct BenchRow {
  const char* name;
  double serial_s = 0;
  double omp_s = 0;
  bool identical = false;
};

BenchRow bench_rollouts() {
  EnvConfig ec;
  ec.depth_m = 15.0;
  ec.max_steps = 200;
  BaselineConfig bc;
  bc.radius_m = default_baseline_radius_m(ec.depth_m);
  const PolicyFactory factory = [bc]() -> std::unique_ptr<Policy> {
    return std::make_unique<BaselinePolicy>(bc);
  };
  const std::size_t runs = 64;

  BenchRow row{"episode rollouts"};
  par::set_exec(par::Exec::serial);
  auto t0 = Clock::now();
  const RunMatrix serial = evaluate(factory, ec, runs, 11, "bench");
  row.serial_s = seconds_since(t0);

  par::set_exec(par::Exec::openmp);
  t0 = Clock::now();
  const RunMatrix parallel = evaluate(factory, ec, runs, 11, "bench");
  row.omp_s = seconds_since(t0);

  row.identical = same_bits(serial.e_m, parallel.e_m);
  return row;
}

BenchRow bench_updates() {
  TrainConfig tc;
  tc.algo = Algo::td3;
  const std::size_t batch = 2048;
  const int n_updates = 30;

  // Synthetic but plausible transitions; contents only need to be fixed.
  ReplayBuffer buffer(8192);
  Rng fill(derive_seed(5, {kStreamInit}));
  for (std::size_t i = 0; i < buffer.capacity(); ++i) {
    Transition t;
    for (double& x : t.obs) x = fill.uniform(-1.0, 1.0);
    for (double& x : t.next_obs) x = fill.uniform(-1.0, 1.0);
    t.action = fill.uniform(-1.0, 1.0);
    t.reward = fill.uniform(-1.0, 1.0);
    t.done = fill.uniform() < 0.01;
    buffer.push(t);
  }

  auto run = [&](par::Exec mode, const fs::path& ckpt, double& elapsed) {
    par::set_exec(mode);
    auto agent = make_agent(tc, 5);
    Rng learner(derive_seed(5, {kStreamLearner}));
    const auto t0 = Clock::now();
    for (int k = 0; k < n_updates; ++k) {
      const auto b = buffer.sample(batch, learner);
      agent->update(b, learner);
    }
    elapsed = seconds_since(t0);
    agent->save(ckpt);
  };

  BenchRow row{"agent update (td3, batch 2048)"};
  const fs::path dir = fs::temp_directory_path();
  const fs::path ck_serial = dir / "rosb_bench_serial.ckpt";
  const fs::path ck_omp = dir / "rosb_bench_omp.ckpt";
  run(par::Exec::serial, ck_serial, row.serial_s);
  run(par::Exec::openmp, ck_omp, row.omp_s);
  row.identical = slurp(ck_serial) == slurp(ck_omp);
  fs::remove(ck_serial);
  fs::remove(ck_omp);
  return row;
}

BenchRow bench_sweep() {
  std::vector<double> radii;
  for (double r = 100.0; r <= 500.0; r += 50.0) radii.push_back(r);
  const NoiseModel noise;
  auto run = [&](par::Exec mode, double& elapsed) {
    par::set_exec(mode);
    const auto t0 = Clock::now();
    auto points = radius_sweep(200.0, radii, 30, 200, 11, noise);
    elapsed = seconds_since(t0);
    std::vector<double> flat;
    for (const SweepPoint& p : points) flat.push_back(p.rmse_m);
    return flat;
  };

  BenchRow row{"radius sweep (9 x 200 cells)"};
  const auto serial = run(par::Exec::serial, row.serial_s);
  const auto parallel = run(par::Exec::openmp, row.omp_s);
  row.identical = same_bits(serial, parallel);
  return row;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both modes run serially\n");
#endif
  std::printf("%-32s %10s %10s %8s %10s\n", "kernel", "serial(s)", "openmp(s)",
              "speedup", "identical");

  int mismatches = 0;
  for (const BenchRow& row : {bench_rollouts(), bench_updates(), bench_sweep()}) {
    const double speedup = row.omp_s > 0 ? row.serial_s / row.omp_s : 0.0;
    std::printf("%-32s %10.3f %10.3f %7.2fx %10s\n", row.name, row.serial_s,
                row.omp_s, speedup, row.identical ? "yes" : "NO");
    if (!row.identical) ++mismatches;
  }
  par::set_exec(par::Exec::openmp);
  return mismatches == 0 ? 0 : 1;
}
