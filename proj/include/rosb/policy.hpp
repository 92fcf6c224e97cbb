#pragma once

#include "rosb/env.hpp"

namespace rosb {

// Action source driven by the evaluation loop. reset() is called at episode
// start; action() must return a value in [-1, 1].
struct Policy {
  virtual ~Policy() = default;
  virtual void reset() {}
  virtual double action(const Observation& obs) = 0;
};

}  // namespace rosb
