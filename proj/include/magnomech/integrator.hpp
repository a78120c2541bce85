#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "magnomech/nonholonomic.hpp"

namespace magnomech {

enum class FieldKind { kMagnetic, kDistributional };

FieldKind parse_field_kind(const std::string& s);

struct IntegrationOptions {
  double t_end = 1.0;
  double dt = 1e-3;
  bool project = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<double> energy;
  std::vector<double> constraint_residual;
  // ||c|| after the raw step and before projection; 0 at t = 0.
  std::vector<double> drift;
  // Set when integration stopped early on a non-finite state.
  std::string aborted;

  std::size_t size() const { return times.size(); }
  double max_energy_error() const;
  double max_constraint_residual() const;
  double max_drift() const;
  void write_csv(std::ostream& os) const;
};

// Classical fourth-order Runge-Kutta with fixed step. In distributional mode
// the state is re-projected onto M after every step unless disabled.
Trajectory integrate(FieldKind kind, const NonholonomicSystem& sys, const PhasePoint& z0,
                     const IntegrationOptions& opts);

// Self-convergence ratio |x_h - x_{h/2}| / |x_{h/2} - x_{h/4}| of the end state.
double step_halving_ratio(FieldKind kind, const NonholonomicSystem& sys, const PhasePoint& z0,
                          double t_end, double dt, bool project = true);

}  // namespace magnomech
