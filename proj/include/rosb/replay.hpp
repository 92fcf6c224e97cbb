#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "rosb/rng.hpp"

namespace rosb {

struct Transition {
  std::array<double, 7> obs{};
  double action = 0.0;
  double reward = 0.0;
  std::array<double, 7> next_obs{};
  bool done = false;
};

// Fixed-capacity ring with uniform sampling without replacement per batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
    storage_.reserve(capacity < 4096 ? capacity : 4096);
  }

  void push(const Transition& t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(t);
    } else {
      storage_[head_] = t;
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const {
    return storage_[(head_ + i) % storage_.size()];
  }

  // Floyd's algorithm: O(batch) distinct indices, deterministic per rng.
  std::vector<Transition> sample(std::size_t batch, Rng& rng) const {
    if (batch > storage_.size())
      throw std::logic_error("ReplayBuffer::sample: batch larger than buffer");
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(batch * 2);
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t j = storage_.size() - batch; j < storage_.size(); ++j) {
      const std::size_t t = static_cast<std::size_t>(rng.uniform_int(j + 1));
      const std::size_t pick = chosen.insert(t).second ? t : j;
      if (pick != t) chosen.insert(pick);
      out.push_back(at(pick));
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest element once full
  std::vector<Transition> storage_;
};

}  // namespace rosb
