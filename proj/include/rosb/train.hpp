#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rosb/agents.hpp"
#include "rosb/env.hpp"

namespace rosb {

struct EpisodeRecord {
  std::size_t episode = 0;  // completion index, dense and 0-based
  int env_id = 0;
  double episode_return = 0.0;
  double final_e_q_m = 0.0;
  int steps = 0;
  double noise_scale = 0.0;
  std::size_t batch_size = 0;
};

struct TrainResult {
  std::vector<EpisodeRecord> records;
  std::filesystem::path actor_checkpoint;
  std::filesystem::path state_checkpoint;
  std::filesystem::path curve_csv;
  long updates = 0;
};

// Smoothing windows for the post-run curve summaries.
inline constexpr std::size_t kRollingReturnWindow = 100000;
inline constexpr std::size_t kRollingErrorWindow = 10000;

// Runs parallel environments in lockstep sweeps with a single learner.
// Transitions are merged into the replay buffer in worker order each sweep
// and updates happen between sweeps, so a (config, seed) pair fully
// determines every output file.
//
// Writes into out_dir: learning_curve.csv, rolling_return.csv,
// rolling_error.csv, actor.ckpt, train_state.ckpt and, when
// checkpoint_every is set, periodic snapshots of both.
TrainResult train(const EnvConfig& env_cfg, const TrainConfig& train_cfg,
                  std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace rosb
