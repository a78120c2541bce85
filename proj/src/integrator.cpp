#include "magnomech/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "magnomech/errors.hpp"

namespace magnomech {

FieldKind parse_field_kind(const std::string& s) {
  if (s == "magnetic") return FieldKind::kMagnetic;
  if (s == "distributional") return FieldKind::kDistributional;
  throw InvalidArgument("field must be 'magnetic' or 'distributional', got '" + s + "'");
}

double Trajectory::max_energy_error() const {
  double worst = 0.0;
  for (double e : energy) worst = std::max(worst, std::abs(e - energy.front()));
  return worst;
}

double Trajectory::max_constraint_residual() const {
  double worst = 0.0;
  for (double c : constraint_residual) worst = std::max(worst, c);
  return worst;
}

double Trajectory::max_drift() const {
  double worst = 0.0;
  for (double d : drift) worst = std::max(worst, d);
  return worst;
}

void Trajectory::write_csv(std::ostream& os) const {
  const Index n = states.empty() ? 0 : states.front().dim();
  os << "t";
  for (Index i = 1; i <= n; ++i) os << ",q" << i;
  for (Index i = 1; i <= n; ++i) os << ",p" << i;
  os << ",H,constraint_res,drift\n";
  os << std::setprecision(17);
  for (std::size_t s = 0; s < size(); ++s) {
    os << times[s];
    for (Index i = 0; i < n; ++i) os << ',' << states[s].q(i);
    for (Index i = 0; i < n; ++i) os << ',' << states[s].p(i);
    os << ',' << energy[s] << ',' << constraint_residual[s] << ',' << drift[s] << '\n';
  }
}

namespace {

Vec field(FieldKind kind, const NonholonomicSystem& sys, const Vec& z) {
  const PhasePoint p = PhasePoint::from_stacked(z);
  if (kind == FieldKind::kMagnetic || sys.constraint_count() == 0) {
    return magnetic_vector_field(sys.h, sys.w, p).stacked();
  }
  return distributional_field_unchecked(sys, p).stacked();
}

Vec rk4_step(FieldKind kind, const NonholonomicSystem& sys, const Vec& z, double dt) {
  const Vec k1 = field(kind, sys, z);
  const Vec k2 = field(kind, sys, z + 0.5 * dt * k1);
  const Vec k3 = field(kind, sys, z + 0.5 * dt * k2);
  const Vec k4 = field(kind, sys, z + dt * k3);
  return z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory integrate(FieldKind kind, const NonholonomicSystem& sys, const PhasePoint& z0,
                     const IntegrationOptions& opts) {
  if (!(opts.dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(opts.t_end >= 0.0)) throw InvalidArgument("t_end must be non-negative");
  const bool constrained = kind == FieldKind::kDistributional && sys.constraint_count() > 0;
  if (constrained && sys.m.residual(z0).norm() > 1e-8) {
    throw NotOnManifoldError("initial state is off the constraint manifold");
  }
  Trajectory tr;
  auto record = [&](double t, const PhasePoint& z, double drift) {
    tr.times.push_back(t);
    tr.states.push_back(z);
    tr.energy.push_back(sys.h(z));
    tr.constraint_residual.push_back(sys.constraint_count() > 0 ? sys.m.residual(z).norm() : 0.0);
    tr.drift.push_back(drift);
  };
  record(0.0, z0, 0.0);
  const auto steps = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
  Vec z = z0.stacked();
  for (long s = 1; s <= steps; ++s) {
    const double t_prev = static_cast<double>(s - 1) * opts.dt;
    const double h = std::min(opts.dt, opts.t_end - t_prev);
    Vec next;
    try {
      next = rk4_step(kind, sys, z, h);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateForm) throw;
      tr.aborted = e.what();
      return tr;
    }
    if (!next.allFinite()) {
      tr.aborted = "non-finite state at t = " + std::to_string(t_prev + h);
      return tr;
    }
    PhasePoint zp = PhasePoint::from_stacked(next);
    double drift = 0.0;
    if (constrained) {
      drift = sys.m.residual(zp).norm();
      if (opts.project) zp = project_to_M(sys, zp);
    }
    z = zp.stacked();
    record(s == steps ? opts.t_end : static_cast<double>(s) * opts.dt, zp, drift);
  }
  return tr;
}

double step_halving_ratio(FieldKind kind, const NonholonomicSystem& sys, const PhasePoint& z0,
                          double t_end, double dt, bool project) {
  auto end_state = [&](double h) {
    return integrate(kind, sys, z0, {t_end, h, project}).states.back().stacked();
  };
  const Vec a = end_state(dt);
  const Vec b = end_state(dt / 2.0);
  const Vec c = end_state(dt / 4.0);
  return (a - b).norm() / (b - c).norm();
}

}  // namespace magnomech
