#pragma once

#include <cstddef>
#include <string>

#include "qhdyn/errors.hpp"

namespace qhdyn {

/// Uniform grid t_k = t0 + k (t1 - t0) / steps, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t steps = 1000;

  double dt() const { return (t1 - t0) / static_cast<double>(steps); }

  double time(std::size_t k) const {
    if (k == steps) return t1;
    return t0 + static_cast<double>(k) * (t1 - t0) / static_cast<double>(steps);
  }

  std::size_t size() const { return steps + 1; }

  void validate() const {
    if (!(t1 > t0) || steps < 1 || !(dt() > 0.0))
      throw Error(ErrorKind::InvalidArgument,
                  "time grid needs t1 > t0 and steps >= 1 (got t0=" + std::to_string(t0) +
                      ", t1=" + std::to_string(t1) + ", steps=" + std::to_string(steps) + ")");
  }

  bool operator==(const TimeGrid&) const = default;
};

}  // namespace qhdyn
