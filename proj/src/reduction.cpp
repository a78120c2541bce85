#include "magnomech/reduction.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "magnomech/errors.hpp"

namespace magnomech {

Mat TranslationSymmetry::generators() const {
  Mat g = Mat::Zero(2 * n, group_dim());
  for (Index c = 0; c < group_dim(); ++c) g(cyclic[static_cast<std::size_t>(c)], c) = 1.0;
  return g;
}

Mat TranslationSymmetry::quotient_map() const {
  Mat pi = Mat::Zero(2 * n - group_dim(), 2 * n);
  Index row = 0;
  for (Index i = 0; i < 2 * n; ++i) {
    if (i < n && std::find(cyclic.begin(), cyclic.end(), i) != cyclic.end()) continue;
    pi(row++, i) = 1.0;
  }
  return pi;
}

Vec TranslationSymmetry::reduce(const PhasePoint& z) const { return quotient_map() * z.stacked(); }

PhasePoint TranslationSymmetry::translate(const PhasePoint& z, const Vec& shift) const {
  PhasePoint out = z;
  for (Index c = 0; c < group_dim(); ++c) out.q(cyclic[static_cast<std::size_t>(c)]) += shift(c);
  return out;
}

// ---------------------------------------------------------------------------

InvarianceReport verify_invariance(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const std::vector<PhasePoint>& samples, const Tolerances& tol) {
  InvarianceReport rep;
  const double h = tol.fd_step;
  auto note = [&](double v, const std::string& what, Index i) {
    if (v > rep.max_derivative) {
      rep.max_derivative = v;
      if (v > tol.invariance) rep.detail = what + " depends on q" + std::to_string(i + 1);
    }
  };
  for (const PhasePoint& z : samples) {
    const Vec grad = sys.h.gradient(z);
    for (Index i : sym.cyclic) {
      note(std::abs(grad(i)), "H", i);
      if (sys.constraint_count() > 0) note(max_abs(sys.d.partial(z.base(), i)), "constraint", i);
      Vec qp = z.q;
      qp(i) += h;
      Vec qm = z.q;
      qm(i) -= h;
      const Mat db = (sys.w.b_field()(ConfigPoint(qp)) - sys.w.b_field()(ConfigPoint(qm))) / (2 * h);
      note(max_abs(db), "B", i);
      if (sys.constraint_count() > 0) {
        PhasePoint zp = z;
        zp.q = qp;
        PhasePoint zm = z;
        zm.q = qm;
        note((sys.m.residual(zp) - sys.m.residual(zm)).norm() / (2 * h), "constraint manifold", i);
      }
    }
  }
  rep.ok = rep.max_derivative <= tol.invariance;
  if (rep.ok) rep.detail.clear();
  return rep;
}

double section_invariance_residual(const TranslationSymmetry& sym, const OneFormSection& gamma,
                                   const ConfigPoint& q) {
  const Mat j = gamma.jacobian(q);
  double worst = 0.0;
  for (Index i : sym.cyclic) worst = std::max(worst, j.col(i).cwiseAbs().maxCoeff());
  return worst;
}

double map_invariance_residual(const TranslationSymmetry& sym, const PhaseMap& eps,
                               const PhasePoint& z) {
  if (sym.empty()) return 0.0;
  const Mat g = sym.generators();
  return max_abs(eps.jacobian(z) * g - g);
}

Mat build_vertical_V(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                     const PhasePoint& z, const Tolerances& tol) {
  const Index n = z.dim();
  if (sym.empty()) return Mat(2 * n, 0);
  const Mat g = sym.generators();
  if (sys.constraint_count() == 0) return column_basis(g);
  (void)k_basis_at(sys, z, tol.on_manifold);
  Mat c(2 * sys.constraint_count(), 2 * n);
  c << f_condition(sys, z), sys.m.jacobian(z);
  const Mat coeff = null_space(c * g);
  if (coeff.cols() == 0) return Mat(2 * n, 0);
  return column_basis(g * coeff);
}

Mat build_U(const TranslationSymmetry& sym, const NonholonomicSystem& sys, const PhasePoint& z,
            const Tolerances& tol) {
  const Mat kb = k_basis_at(sys, z, tol.on_manifold);
  const Mat vk = build_vertical_V(sym, sys, z, tol);
  if (vk.cols() == 0) return kb;
  const Mat w = sys.w.interior_matrix(z);
  // omega(u, v) = v^T W u
  const Mat coeff = null_space(vk.transpose() * w * kb);
  return kb * coeff;
}

ReducedStructure reduced_structure(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const PhasePoint& z, const Tolerances& tol) {
  ReducedStructure rs;
  const Mat kb = k_basis_at(sys, z, tol.on_manifold);
  const Mat vk = build_vertical_V(sym, sys, z, tol);
  const Mat ub = build_U(sym, sys, z, tol);
  rs.dim_k = kb.cols();
  rs.dim_v = vk.cols();
  rs.dim_u = ub.cols();
  const Mat pi = sym.quotient_map();
  const Mat pu = pi * ub;
  rs.kbar = column_basis(pu);
  const Eigen::CompleteOrthogonalDecomposition<Mat> cod(pu);
  rs.lifts = ub * (cod.pseudoInverse() * rs.kbar);
  const Mat w = sys.w.interior_matrix(z);
  rs.omega_bar = rs.lifts.transpose() * w * rs.lifts;
  rs.sigma_min = rs.omega_bar.size() == 0 ? 0.0 : smallest_singular_value(rs.omega_bar);
  return rs;
}

Vec reduced_field(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                  const PhasePoint& z, const Tolerances& tol) {
  const ReducedStructure rs = reduced_structure(sym, sys, z, tol);
  if (!(rs.sigma_min > tol.sigma_min)) {
    throw DegenerateFormError("reduced form is singular (sigma_min " + std::to_string(rs.sigma_min) +
                              ")");
  }
  const Vec dh = rs.lifts.transpose() * sys.h.gradient(z);
  return rs.kbar * rs.omega_bar.fullPivLu().solve(dh);
}

LiftReport check_lift_independence(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const PhasePoint& z, const Vec& shift, const Tolerances& tol) {
  const PhasePoint z2 = sym.translate(z, shift);
  LiftReport rep;
  rep.field = (reduced_field(sym, sys, z, tol) - reduced_field(sym, sys, z2, tol)).norm();
  rep.form = max_abs(reduced_structure(sym, sys, z, tol).operator_form() -
                     reduced_structure(sym, sys, z2, tol).operator_form());
  rep.energy = std::abs(sys.h(z) - sys.h(z2));
  const ReducedStructure rs = reduced_structure(sym, sys, z, tol);
  const Vec xbar = reduced_field(sym, sys, z, tol);
  // dh on the reduced space, read through the lifts.
  const Vec dh_bar = rs.kbar * rs.lifts.transpose() * sys.h.gradient(z);
  rep.energy_derivative = std::abs(dh_bar.dot(xbar));
  return rep;
}

double check_related(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                     const std::vector<PhasePoint>& samples, std::uint64_t seed,
                     const Tolerances& tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Mat pi = sym.quotient_map();
  double worst = 0.0;
  for (const PhasePoint& z : samples) {
    Vec shift(sym.group_dim());
    for (Index c = 0; c < shift.size(); ++c) shift(c) = unit(rng);
    const Vec pushed = pi * distributional_field_restricted(sys, z, tol).x.stacked();
    const Vec reduced = reduced_field(sym, sys, sym.translate(z, shift), tol);
    worst = std::max(worst, (pushed - reduced).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

void mark_vacuous(HJReport& rep, const std::string& why) {
  if (rep.verdict == Verdict::kVacuous) {
    rep.failed_hypothesis += "; " + why;
  } else {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = why;
  }
}

}  // namespace

HJReport hj_type1_reduced(const OneFormSection& gamma, const TranslationSymmetry& sym,
                          const NonholonomicSystem& sys, const std::vector<ConfigPoint>& samples,
                          bool invariance_ok, const Tolerances& tol) {
  HJReport rep;
  rep.check = "hj1-reduced";
  rep.columns = coordinate_columns(gamma.dim(), false);
  rep.columns.insert(rep.columns.end(), {"hypothesis", "equation", "level_set"});
  if (!invariance_ok) {
    mark_vacuous(rep, "system is not invariant under the declared translations");
    return rep;
  }
  double g_inv = 0.0;
  for (const ConfigPoint& q : samples) g_inv = std::max(g_inv, section_invariance_residual(sym, gamma, q));
  rep.hypothesis_residuals["gamma_invariance"] = g_inv;
  if (g_inv > tol.invariance) {
    mark_vacuous(rep, "gamma is not invariant under the declared translations");
    return rep;
  }
  try {
    rep.hypothesis_residuals["image_in_K"] = check_section_images(gamma, sys, samples, tol);
  } catch (const ImageNotInM& e) {
    mark_vacuous(rep, std::string("image of gamma not in M: ") + e.what());
    return rep;
  } catch (const ImageNotInK& e) {
    mark_vacuous(rep, std::string("image of Tgamma not in K: ") + e.what());
    return rep;
  }
  const Mat pi = sym.quotient_map();
  double hyp = 0.0;
  double eq = 0.0;
  double level = 0.0;
  for (const ConfigPoint& q : samples) {
    const Mat db = sys.d.basis(q);
    const double hq = gamma_condition_on_subspace(gamma, sys.w.b_field(), db, q);
    const PhasePoint z = gamma.lift(q);
    const Vec xgamma = magnetic_vector_field(sys.h, sys.w, z).dq;
    const Vec lhs = pi * section_push(gamma, q, xgamma);
    const double eq_q = (lhs - reduced_field(sym, sys, z, tol)).norm();
    const double lv = level_set_residual(sys.h, gamma, q, db);
    hyp = std::max(hyp, hq);
    eq = std::max(eq, eq_q);
    level = std::max(level, lv);
    std::vector<double> row;
    for (Index i = 0; i < q.dim(); ++i) row.push_back(q.q(i));
    row.insert(row.end(), {hq, eq_q, lv});
    rep.rows.push_back(std::move(row));
  }
  rep.hypothesis_residuals["gamma_condition_on_D"] = hyp;
  rep.equation_residuals["type1"] = eq;
  rep.diagnostics["level_set_residual"] = level;
  if (hyp > tol.hypothesis) {
    mark_vacuous(rep, "d(gamma) + B does not vanish on D");
  } else {
    rep.verdict = eq < tol.equation ? Verdict::kPass : Verdict::kFail;
  }
  return rep;
}

HJReport hj_type2_reduced(const OneFormSection& gamma, const PhaseMap& eps,
                          const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                          const std::vector<PhasePoint>& samples, bool invariance_ok,
                          const Tolerances& tol) {
  HJReport rep;
  rep.check = "hj2-reduced";
  rep.columns = type2_columns(gamma.dim());
  if (!invariance_ok) {
    mark_vacuous(rep, "system is not invariant under the declared translations");
    return rep;
  }
  std::vector<double> symp;
  double worst = 0.0;
  double off_m = 0.0;
  double e_inv = 0.0;
  for (const PhasePoint& z : samples) {
    symp.push_back(check_symplectic_map(eps, sys.w, z));
    worst = std::max(worst, symp.back());
    off_m = std::max(off_m, sys.m.residual(eps(z)).norm());
    e_inv = std::max(e_inv, map_invariance_residual(sym, eps, z));
  }
  rep.hypothesis_residuals["symplectic"] = worst;
  rep.hypothesis_residuals["eps_into_M"] = off_m;
  rep.hypothesis_residuals["eps_invariance"] = e_inv;
  if (worst > tol.symplectic) mark_vacuous(rep, "eps is not symplectic for omega^B");
  if (e_inv > tol.invariance) mark_vacuous(rep, "eps does not commute with the translations");
  if (off_m > tol.on_manifold) {
    mark_vacuous(rep, "eps moves samples off the constraint manifold");
    return rep;
  }
  const Mat pi = sym.quotient_map();
  const double fine = tol.fd_step / 10.0;
  const OneFormSection gamma_fine = gamma.with_fd_jacobian(fine);
  const PhaseMap eps_fine = eps.with_fd_jacobian(fine);
  auto eval = [&](const PhasePoint& z, bool refined) {
    const OneFormSection& g = refined ? gamma_fine : gamma;
    const PhaseMap& e = refined ? eps_fine : eps;
    const PhasePoint ez = e(z);
    const ConfigPoint base = ez.base();
    const Vec xh = magnetic_vector_field(sys.h, sys.w, ez).stacked();
    const Vec xc = composed_field(sys.h, e, sys.w, z).stacked();
    const Vec lam = lifted_section_tangent(g, base) * xh;
    PairResidual r;
    r.a = (pi * (tau_K(sys, ez, e.jacobian(z) * xc, tol) - lam)).norm();
    r.b = (pi * section_push(g, base, xh.head(z.dim())) - reduced_field(sym, sys, ez, tol)).norm();
    return r;
  };
  run_status_agreement(rep, samples, eval, symp, tol);
  return rep;
}

CheckReport type2_reduction_equivalence(const HJReport& full, const HJReport& reduced,
                                        const Tolerances& tol) {
  CheckReport rep;
  rep.check = "reduction-equivalence";
  rep.columns = {"sample", "full_status", "reduced_status"};
  if (full.verdict == Verdict::kVacuous || reduced.verdict == Verdict::kVacuous) {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = "a Type II check was vacuous";
    return rep;
  }
  if (full.rows.size() != reduced.rows.size()) {
    throw InvalidArgument("full and reduced reports cover different samples");
  }
  const auto col_b = static_cast<std::size_t>(
      std::find(full.columns.begin(), full.columns.end(), "residual_b") - full.columns.begin());
  int mismatches = 0;
  for (std::size_t s = 0; s < full.rows.size(); ++s) {
    const Status sf = residual_status(full.rows[s][col_b], tol);
    const Status sr = residual_status(reduced.rows[s][col_b], tol);
    if (sf != sr || sf == Status::kBand) ++mismatches;
    rep.rows.push_back({static_cast<double>(s), static_cast<double>(sf), static_cast<double>(sr)});
  }
  rep.equation_residuals["status_mismatches"] = mismatches;
  rep.diagnostics["samples"] = static_cast<double>(full.rows.size());
  rep.verdict = mismatches == 0 ? Verdict::kPass : Verdict::kFail;
  return rep;
}

}  // namespace magnomech
