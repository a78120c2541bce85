#pragma once

#include <cstdint>
#include <vector>

#include "magnomech/report.hpp"
#include "magnomech/scenario.hpp"

namespace magnomech {

struct SuiteOptions {
  std::uint64_t seed = 0;
  int samples = 0;  // 0: use the scenario's count
  double t_end = 10.0;
  double dt = 1e-3;
};

// Closedness of B, compatibility and dimension sweep, symplecticity of epsilon,
// invariance of the declared symmetry.
CheckReport check_geometry(const ScenarioModel& m, const SuiteOptions& opts = {});

// Coordinate formula against the linear solve, restricted solve against the
// multiplier form, and energy conservation by the field.
CheckReport check_fields(const ScenarioModel& m, const SuiteOptions& opts = {});

// Type I / Type II checks dispatched on the scenario contents.
CheckReport check_hj1(const ScenarioModel& m, bool reduced, const SuiteOptions& opts = {});
CheckReport check_hj2(const ScenarioModel& m, bool reduced, const SuiteOptions& opts = {});

// Lift independence, relatedness and non-degeneracy of the reduced form.
CheckReport check_reduction(const ScenarioModel& m, const SuiteOptions& opts = {});

// Sample-wise Type II status equality between the full and reduced systems.
CheckReport check_reduction_equivalence(const ScenarioModel& m, const SuiteOptions& opts = {});

// Integrated energy and constraint drift.
CheckReport check_conservation(const ScenarioModel& m, const SuiteOptions& opts = {});

// Every applicable check for one scenario.
std::vector<CheckReport> run_suite(const ScenarioModel& m, const SuiteOptions& opts = {});

}  // namespace magnomech
