#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace rosb {

// Fixed stream tags for hierarchical seed derivation. Every consumer of
// randomness gets its own stream so results never depend on which thread
// touched the generator first.
enum Stream : std::uint64_t {
  kStreamEnv = 1,
  kStreamExplore = 2,
  kStreamLearner = 3,
  kStreamInit = 4,
  kStreamEval = 5,
  kStreamSweep = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive a child seed from a root seed and a path of stream/indices.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(root);
  for (std::uint64_t id : path) s = splitmix64(s ^ splitmix64(id));
  return s;
}

// Deterministic random stream. The distributions are spelled out here rather
// than taken from <random> because std::normal_distribution and friends are
// implementation-defined; this generator produces the same values on every
// platform, which the reproducibility contract requires.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng child(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(root, path));
  }

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform integer in [0, n), rejection sampled so there is no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  // Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rosb
