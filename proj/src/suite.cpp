#include "magnomech/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "magnomech/errors.hpp"
#include "magnomech/hj.hpp"
#include "magnomech/integrator.hpp"
#include "magnomech/reduction.hpp"
#include "magnomech/sampling.hpp"

namespace magnomech {

namespace {

int sample_count(const ScenarioModel& m, const SuiteOptions& opts) {
  return opts.samples > 0 ? opts.samples : m.spec.samples;
}

std::vector<ConfigPoint> configs(const ScenarioModel& m, const SuiteOptions& opts) {
  return config_samples(m.q_box, sample_count(m, opts), opts.seed);
}

std::vector<PhasePoint> phases(const ScenarioModel& m, const SuiteOptions& opts) {
  return phase_samples(m.system, m.q_box, m.p_box, sample_count(m, opts), opts.seed);
}

CheckReport vacuous(const ScenarioModel& m, const std::string& check, const std::string& why) {
  CheckReport r;
  r.scenario = m.spec.name;
  r.check = check;
  r.verdict = Verdict::kVacuous;
  r.failed_hypothesis = why;
  return r;
}

template <typename F>
CheckReport timed(const ScenarioModel& m, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckReport r = body();
  r.scenario = m.spec.name;
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& w : m.warnings) r.notes.push_back(w);
  return r;
}

void fail_if(CheckReport& r, bool bad, const std::string& what) {
  if (!bad) return;
  r.verdict = Verdict::kFail;
  r.notes.push_back(what);
}

// Section-image errors become a VACUOUS report naming the defect.
template <typename F>
CheckReport guard_images(const ScenarioModel& m, const std::string& check, F&& body) {
  try {
    return body();
  } catch (const ImageNotInM& e) {
    auto r = vacuous(m, check, std::string("image of gamma not in M: ") + e.what());
    r.notes.push_back(std::string(code_name(e.code())));
    return r;
  } catch (const ImageNotInK& e) {
    auto r = vacuous(m, check, std::string("image of Tgamma not in K: ") + e.what());
    r.notes.push_back(std::string(code_name(e.code())));
    return r;
  }
}

}  // namespace

CheckReport check_geometry(const ScenarioModel& m, const SuiteOptions& opts) {
  return timed(m, [&] {
    CheckReport r;
    r.check = "geometry";
    const auto& sys = m.system;
    const auto qs = configs(m, opts);
    double closed = 0.0;
    for (const ConfigPoint& q : qs) {
      closed = std::max(closed, check_closed_two_form(sys.w.b_field(), q, m.tol.fd_step));
    }
    r.equation_residuals["closedness"] = closed;
    fail_if(r, closed > m.tol.equation, "B is not closed");

    r.columns = coordinate_columns(m.dim(), true);
    r.columns.insert(r.columns.end(), {"dim_k", "dim_tm_cap_f_perp", "sigma_min"});
    const auto zs = phases(m, opts);
    double sigma = std::numeric_limits<double>::infinity();
    Index kmin = 2 * m.dim();
    Index kmax = 0;
    bool compatible = true;
    for (const PhasePoint& z : zs) {
      const CompatibilityReport c = check_compatibility(sys, z, m.tol);
      if (!c.pass && compatible) r.notes.push_back("compatibility fails: " + c.reason);
      compatible = compatible && c.pass;
      sigma = std::min(sigma, c.sigma_min);
      kmin = std::min(kmin, c.dim_k);
      kmax = std::max(kmax, c.dim_k);
      const Vec zv = z.stacked();
      std::vector<double> row(zv.data(), zv.data() + zv.size());
      row.insert(row.end(), {static_cast<double>(c.dim_k), static_cast<double>(c.dim_tm_cap_f_perp),
                             c.sigma_min});
      r.rows.push_back(std::move(row));
    }
    r.diagnostics["sigma_min"] = sigma;
    r.diagnostics["dim_k_min"] = static_cast<double>(kmin);
    r.diagnostics["dim_k_max"] = static_cast<double>(kmax);
    r.diagnostics["constraints"] = static_cast<double>(m.constraint_count());
    fail_if(r, !compatible, "TM and the omega-orthogonal of F intersect");

    if (m.epsilon) {
      double symp = 0.0;
      for (const PhasePoint& z : zs) symp = std::max(symp, check_symplectic_map(*m.epsilon, sys.w, z));
      r.diagnostics["epsilon_symplectic"] = symp;
    }
    if (!m.symmetry.empty()) {
      const InvarianceReport inv = verify_invariance(m.symmetry, sys, zs, m.tol);
      r.diagnostics["invariance"] = inv.max_derivative;
    }
    return r;
  });
}

CheckReport check_fields(const ScenarioModel& m, const SuiteOptions& opts) {
  return timed(m, [&] {
    CheckReport r;
    r.check = "fields";
    const auto& sys = m.system;
    const auto zs = phases(m, opts);
    double formula = 0.0;
    double energy = 0.0;
    double oracle = 0.0;
    double k_energy = 0.0;
    for (const PhasePoint& z : zs) {
      const Vec solved = magnetic_vector_field(sys.h, sys.w, z).stacked();
      const Vec coord = coordinate_formula_field(sys.h, sys.w.b_field(), z).stacked();
      formula = std::max(formula, (solved - coord).norm());
      energy = std::max(energy, std::abs(energy_derivative(sys.h, sys.w, z)));
      const DistributionalField restricted = distributional_field_restricted(sys, z, m.tol);
      const DistributionalField multiplier = distributional_field_multiplier(sys, z, m.tol);
      oracle = std::max(oracle, (restricted.x.stacked() - multiplier.x.stacked()).norm());
      k_energy = std::max(k_energy, std::abs(sys.h.gradient(z).dot(restricted.x.stacked())));
    }
    r.equation_residuals["formula_vs_solve"] = formula;
    r.equation_residuals["restricted_vs_multiplier"] = oracle;
    r.diagnostics["energy_derivative"] = energy;
    r.diagnostics["energy_derivative_K"] = k_energy;
    fail_if(r, formula > m.tol.agreement, "coordinate formula disagrees with the linear solve");
    fail_if(r, oracle > m.tol.agreement, "restricted solve disagrees with the multiplier form");
    return r;
  });
}

CheckReport check_hj1(const ScenarioModel& m, bool reduced, const SuiteOptions& opts) {
  const std::string name = reduced ? "hj1-reduced" : "hj1";
  if (!m.gamma) return vacuous(m, name, "scenario has no gamma");
  if (reduced && m.symmetry.empty()) return vacuous(m, name, "scenario declares no symmetry");
  return timed(m, [&] {
    return guard_images(m, name, [&] {
      const auto qs = configs(m, opts);
      const auto& sys = m.system;
      if (reduced) return hj_type1_reduced(*m.gamma, m.symmetry, sys, qs, m.invariance_ok, m.tol);
      if (sys.constraint_count() == 0) return hj_type1_magnetic(*m.gamma, sys.h, sys.w, qs, m.tol);
      return hj_type1_distributional(*m.gamma, sys, qs, m.tol);
    });
  });
}

CheckReport check_hj2(const ScenarioModel& m, bool reduced, const SuiteOptions& opts) {
  const std::string name = reduced ? "hj2-reduced" : "hj2";
  if (!m.gamma) return vacuous(m, name, "scenario has no gamma");
  if (!m.epsilon) return vacuous(m, name, "scenario has no epsilon");
  if (reduced && m.symmetry.empty()) return vacuous(m, name, "scenario declares no symmetry");
  return timed(m, [&] {
    return guard_images(m, name, [&] {
      const auto& sys = m.system;
      const auto zs = section_phase_samples(*m.gamma, sys, configs(m, opts), opts.seed);
      if (reduced) {
        return hj_type2_reduced(*m.gamma, *m.epsilon, m.symmetry, sys, zs, m.invariance_ok, m.tol);
      }
      if (sys.constraint_count() == 0) return hj_type2_magnetic(*m.gamma, *m.epsilon, sys.h, sys.w, zs, m.tol);
      return hj_type2_distributional(*m.gamma, *m.epsilon, sys, zs, m.tol);
    });
  });
}

CheckReport check_reduction(const ScenarioModel& m, const SuiteOptions& opts) {
  if (m.symmetry.empty()) return vacuous(m, "reduction", "scenario declares no symmetry");
  if (!m.invariance_ok) {
    return vacuous(m, "reduction", "system is not invariant under the declared translations");
  }
  return timed(m, [&] {
    CheckReport r;
    r.check = "reduction";
    const auto& sys = m.system;
    const auto zs = phases(m, opts);
    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    LiftReport worst;
    double sigma = std::numeric_limits<double>::infinity();
    Index vmin = 2 * m.dim(), vmax = 0, umin = 2 * m.dim(), umax = 0;
    for (const PhasePoint& z : zs) {
      Vec shift(m.symmetry.group_dim());
      for (Index c = 0; c < shift.size(); ++c) shift(c) = unit(rng);
      const LiftReport l = check_lift_independence(m.symmetry, sys, z, shift, m.tol);
      worst.field = std::max(worst.field, l.field);
      worst.form = std::max(worst.form, l.form);
      worst.energy = std::max(worst.energy, l.energy);
      worst.energy_derivative = std::max(worst.energy_derivative, l.energy_derivative);
      const ReducedStructure rs = reduced_structure(m.symmetry, sys, z, m.tol);
      sigma = std::min(sigma, rs.sigma_min);
      vmin = std::min(vmin, rs.dim_v);
      vmax = std::max(vmax, rs.dim_v);
      umin = std::min(umin, rs.dim_u);
      umax = std::max(umax, rs.dim_u);
    }
    const double related = check_related(m.symmetry, sys, zs, opts.seed, m.tol);
    r.equation_residuals["lift_field"] = worst.field;
    r.equation_residuals["lift_form"] = worst.form;
    r.equation_residuals["lift_energy"] = worst.energy;
    r.equation_residuals["reduced_energy_derivative"] = worst.energy_derivative;
    r.equation_residuals["relatedness"] = related;
    r.diagnostics["sigma_min"] = sigma;
    r.diagnostics["dim_v_cap_k_min"] = static_cast<double>(vmin);
    r.diagnostics["dim_v_cap_k_max"] = static_cast<double>(vmax);
    r.diagnostics["dim_u_min"] = static_cast<double>(umin);
    r.diagnostics["dim_u_max"] = static_cast<double>(umax);
    const double lift_tol = m.tol.invariance;
    fail_if(r, worst.field > lift_tol || worst.form > lift_tol || worst.energy > lift_tol,
            "reduced quantities depend on the lift");
    fail_if(r, worst.energy_derivative > lift_tol, "reduced field does not conserve h");
    fail_if(r, related > m.tol.equation / 10.0, "full and reduced fields are not related");
    fail_if(r, sigma < m.tol.sigma_min, "reduced form is degenerate");
    return r;
  });
}

CheckReport check_reduction_equivalence(const ScenarioModel& m, const SuiteOptions& opts) {
  const std::string name = "reduction-equivalence";
  if (!m.gamma || !m.epsilon) return vacuous(m, name, "scenario has no gamma/epsilon pair");
  if (m.symmetry.empty()) return vacuous(m, name, "scenario declares no symmetry");
  return timed(m, [&] {
    const CheckReport full = check_hj2(m, false, opts);
    const CheckReport red = check_hj2(m, true, opts);
    return type2_reduction_equivalence(full, red, m.tol);
  });
}

CheckReport check_conservation(const ScenarioModel& m, const SuiteOptions& opts) {
  return timed(m, [&] {
    CheckReport r;
    r.check = "conservation";
    const auto& sys = m.system;
    const PhasePoint z0 = m.initial ? *m.initial : phases(m, {opts.seed, 1})[0];
    const FieldKind kind = sys.constraint_count() > 0 ? FieldKind::kDistributional : FieldKind::kMagnetic;
    const Trajectory tr = integrate(kind, sys, z0, {opts.t_end, opts.dt, true});
    r.equation_residuals["energy_drift"] = tr.max_energy_error();
    r.equation_residuals["constraint_residual"] = tr.max_constraint_residual();
    r.diagnostics["pre_projection_drift"] = tr.max_drift();
    r.diagnostics["steps"] = static_cast<double>(tr.size() - 1);
    if (!tr.aborted.empty()) fail_if(r, true, "integration aborted: " + tr.aborted);
    fail_if(r, tr.max_energy_error() > 10.0 * m.tol.equation, "energy drift too large");
    fail_if(r, tr.max_constraint_residual() > m.tol.on_manifold, "constraint drift too large");
    return r;
  });
}

std::vector<CheckReport> run_suite(const ScenarioModel& m, const SuiteOptions& opts) {
  std::vector<CheckReport> out;
  out.push_back(check_geometry(m, opts));
  out.push_back(check_fields(m, opts));
  if (m.gamma) {
    out.push_back(check_hj1(m, false, opts));
    if (m.epsilon) out.push_back(check_hj2(m, false, opts));
  }
  if (!m.symmetry.empty()) {
    out.push_back(check_reduction(m, opts));
    if (m.gamma) out.push_back(check_hj1(m, true, opts));
    if (m.gamma && m.epsilon) {
      out.push_back(check_hj2(m, true, opts));
      out.push_back(check_reduction_equivalence(m, opts));
    }
  }
  out.push_back(check_conservation(m, opts));
  return out;
}

}  // namespace magnomech
