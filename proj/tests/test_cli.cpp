#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "rosb_cli_scratch";

struct Scratch {
  Scratch() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Scratch() { fs::remove_all(kWork); }
} scratch;

// Exit status of the tool; stdout and stderr go to a per-call log.
int run_cli(const std::string& args) {
  static int call = 0;
  const fs::path log = kWork / ("call_" + std::to_string(call++) + ".log");
  const std::string cmd =
      std::string("\"") + ROSB_CLI_BIN + "\" " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const std::string kTinyEval =
    " --runs 4 --seed 3 --set env.depth_m=15 --set env.arena_half_width_m=500";

}  // namespace

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("eval --help") == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("") == 2);                 // missing subcommand
  CHECK(run_cli("frobnicate") == 2);       // unknown subcommand
  CHECK(run_cli("eval --no-such-flag") == 2);
  CHECK(run_cli("train --algo juggling") == 2);  // outside the allowed set
}

TEST_CASE("config errors exit with 2") {
  CHECK(run_cli("eval --set no.such.key=1") == 2);
  CHECK(run_cli("eval --set env.depth_m") == 2);  // missing '='
  CHECK(run_cli("eval --set env.depth_m=-5") == 2);
  CHECK(run_cli("eval --config " + (kWork / "absent.cfg").string()) == 2);
  CHECK(run_cli("sweep --out " + (kWork / "s0").string()) == 2);  // no radii given
  CHECK(run_cli("compare --out " + (kWork / "c0").string()) == 2);  // no inputs
}

TEST_CASE("artifact errors exit with 3") {
  const fs::path junk = kWork / "junk.ckpt";
  {
    std::ofstream os(junk, std::ios::binary);
    os << "not a checkpoint";
  }
  CHECK(run_cli("eval --policy " + junk.string() + kTinyEval + " --out " +
                (kWork / "e_junk").string()) == 3);
  CHECK(run_cli("eval --policy " + (kWork / "absent.ckpt").string() + kTinyEval +
                " --out " + (kWork / "e_absent").string()) == 3);
  CHECK(run_cli("compare --a " + (kWork / "absent.json").string() + " --b " +
                (kWork / "absent.json").string() + " --out " +
                (kWork / "c_absent").string()) == 3);
}

TEST_CASE("eval produces its artifacts and reruns are byte-identical") {
  const fs::path a = kWork / "eval_a";
  const fs::path b = kWork / "eval_b";
  REQUIRE(run_cli("eval" + kTinyEval + " --out " + a.string()) == 0);
  REQUIRE(run_cli("eval" + kTinyEval + " --out " + b.string()) == 0);
  for (const char* name : {"run_matrix.csv", "trajectory.csv", "metrics.json",
                           "manifest.json"}) {
    CHECK(fs::exists(a / name));
  }
  CHECK(slurp(a / "run_matrix.csv") == slurp(b / "run_matrix.csv"));
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));
}

TEST_CASE("a manifest replays its run exactly") {
  const fs::path a = kWork / "eval_a";  // produced above
  const fs::path c = kWork / "eval_replay";
  REQUIRE(fs::exists(a / "manifest.json"));
  REQUIRE(run_cli("eval --from-manifest " + (a / "manifest.json").string() + " --out " +
                  c.string()) == 0);
  CHECK(slurp(a / "run_matrix.csv") == slurp(c / "run_matrix.csv"));
  CHECK(slurp(a / "metrics.json") == slurp(c / "metrics.json"));
}

TEST_CASE("eval honors a flat config file") {
  const fs::path cfg = kWork / "eval.cfg";
  {
    std::ofstream os(cfg);
    os << "# tiny scene\n"
       << "env.depth_m = 15\n"
       << "env.arena_half_width_m = 500\n"
       << "eval.runs = 4\n";
  }
  const fs::path d = kWork / "eval_cfgfile";
  REQUIRE(run_cli("eval --config " + cfg.string() + " --seed 3 --out " + d.string()) ==
          0);
  CHECK(slurp(d / "metrics.json") == slurp((kWork / "eval_a") / "metrics.json"));
}

TEST_CASE("train writes curves plus checkpoints and its actor is evaluable") {
  const fs::path t = kWork / "train_a";
  const std::string train_cmd =
      "train --algo ddpg --episodes 6 --seed 2 --out " + t.string() +
      " --set train.parallel_envs=2 --set train.warmup_episodes=100"
      " --set env.max_steps=20 --set env.depth_m=15";
  REQUIRE(run_cli(train_cmd) == 0);
  for (const char* name : {"learning_curve.csv", "rolling_return.csv",
                           "rolling_error.csv", "actor.ckpt", "train_state.ckpt",
                           "manifest.json"}) {
    CHECK(fs::exists(t / name));
  }
  const std::string curve = slurp(t / "learning_curve.csv");
  CHECK(curve.rfind("episode,", 0) == 0);

  const fs::path t2 = kWork / "train_replay";
  REQUIRE(run_cli("train --from-manifest " + (t / "manifest.json").string() + " --out " +
                  t2.string()) == 0);
  CHECK(slurp(t / "learning_curve.csv") == slurp(t2 / "learning_curve.csv"));
  CHECK(slurp(t / "actor.ckpt") == slurp(t2 / "actor.ckpt"));
  CHECK(slurp(t / "train_state.ckpt") == slurp(t2 / "train_state.ckpt"));

  const fs::path e = kWork / "eval_actor";
  REQUIRE(run_cli("eval --policy " + (t / "actor.ckpt").string() +
                  " --runs 2 --seed 3 --set env.max_steps=20 --set env.depth_m=15"
                  " --out " + e.string()) == 0);
  CHECK(fs::exists(e / "run_matrix.csv"));
  CHECK(!fs::exists(e / "metrics.json"));  // too short for summary windows
}

TEST_CASE("sweep emits one row per radius and replays exactly") {
  const fs::path s = kWork / "sweep_a";
  const std::string cmd = "sweep --depth 100 --radii 150,300 --window 30 --runs 8"
                          " --seed 4 --out " + s.string();
  REQUIRE(run_cli(cmd) == 0);
  const std::string csv = slurp(s / "sweep.csv");
  CHECK(csv.rfind("radius_m,window,rmse_m,n_used\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const fs::path s2 = kWork / "sweep_replay";
  REQUIRE(run_cli("sweep --from-manifest " + (s / "manifest.json").string() + " --out " +
                  s2.string()) == 0);
  CHECK(slurp(s2 / "sweep.csv") == csv);
}

TEST_CASE("compare of a run against itself reports no difference") {
  const fs::path a = kWork / "eval_a";  // produced above
  const fs::path c = kWork / "cmp_self";
  REQUIRE(run_cli("compare --a " + (a / "metrics.json").string() + " --b " +
                  (a / "metrics.json").string() + " --out " + c.string()) == 0);
  REQUIRE(fs::exists(c / "compare.json"));
  REQUIRE(fs::exists(c / "compare.csv"));

  const nlohmann::json j = nlohmann::json::parse(slurp(c / "compare.json"));
  CHECK(j.at("delta_transient_pct").get<double>() == 0.0);
  CHECK(j.at("delta_steady_pct").get<double>() == 0.0);
  CHECK(j.at("prob_improvement").get<double>() == 0.5);
}

TEST_CASE("explicit seed beats the manifest seed") {
  const fs::path a = kWork / "eval_a";
  const fs::path d = kWork / "eval_reseeded";
  REQUIRE(run_cli("eval --from-manifest " + (a / "manifest.json").string() +
                  " --seed 99 --out " + d.string()) == 0);
  CHECK(slurp(d / "run_matrix.csv") != slurp(a / "run_matrix.csv"));
}
