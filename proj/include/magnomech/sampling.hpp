#pragma once

#include <cstdint>
#include <vector>

#include "magnomech/nonholonomic.hpp"

namespace magnomech {

// Axis-aligned box: one (lo, hi) row per coordinate.
struct Box {
  Mat bounds;

  Index dim() const { return bounds.rows(); }
  static Box uniform(Index n, double lo, double hi);
};

// Sobol points mapped into the box. The all-zero first point is skipped and
// `seed` advances the sequence by that many points.
std::vector<Vec> sobol_points(const Box& box, int count, std::uint64_t seed);

std::vector<ConfigPoint> config_samples(const Box& q_box, int count, std::uint64_t seed);

// Joint (q, p) Sobol points, each projected onto M.
std::vector<PhasePoint> phase_samples(const NonholonomicSystem& sys, const Box& q_box,
                                      const Box& p_box, int count, std::uint64_t seed);

}  // namespace magnomech
