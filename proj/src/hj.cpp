#include "magnomech/hj.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "magnomech/errors.hpp"

namespace magnomech {

Status residual_status(double r, const Tolerances& tol) {
  if (r < tol.equation) return Status::kZero;
  if (r > tol.band_factor * tol.equation) return Status::kNonzero;
  return Status::kBand;
}

namespace {

void append_point(std::vector<double>& row, const Vec& v) {
  for (Index i = 0; i < v.size(); ++i) row.push_back(v(i));
}

}  // namespace

std::vector<std::string> coordinate_columns(Index n, bool with_momenta) {
  std::vector<std::string> cols;
  for (Index i = 1; i <= n; ++i) cols.push_back("q" + std::to_string(i));
  if (with_momenta) {
    for (Index i = 1; i <= n; ++i) cols.push_back("p" + std::to_string(i));
  }
  return cols;
}

// d(H o gamma) restricted to the columns of `subspace`.
double level_set_residual(const HamiltonianSpec& h, const OneFormSection& gamma,
                          const ConfigPoint& q, const Mat& subspace) {
  const Index n = q.dim();
  const Vec grad = h.gradient(gamma.lift(q));
  const Vec dh = grad.head(n) + gamma.jacobian(q).transpose() * grad.tail(n);
  return (subspace.transpose() * dh).norm();
}

// Tgamma X^gamma with X^gamma the base part of X^B_H at gamma(q).
Vec section_push(const OneFormSection& gamma, const ConfigPoint& q, const Vec& base_velocity) {
  const Index n = q.dim();
  Vec out(2 * n);
  out << base_velocity, gamma.jacobian(q) * base_velocity;
  return out;
}

namespace {

Verdict type1_verdict(const HJReport& r, const Tolerances& tol) {
  return r.equation_residual() < tol.equation ? Verdict::kPass : Verdict::kFail;
}

}  // namespace

void run_status_agreement(HJReport& rep, const std::vector<PhasePoint>& samples,
                          const PairEvaluator& eval, const std::vector<double>& hypothesis,
                          const Tolerances& tol) {
  double max_a = 0.0;
  double max_b = 0.0;
  int counts[4] = {0, 0, 0, 0};
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const PhasePoint& z = samples[s];
    PairResidual r = eval(z, false);
    Status sa = residual_status(r.a, tol);
    Status sb = residual_status(r.b, tol);
    if (sa == Status::kBand || sb == Status::kBand) {
      r = eval(z, true);
      sa = residual_status(r.a, tol);
      sb = residual_status(r.b, tol);
    }
    Agreement agree;
    if (sa == Status::kBand || sb == Status::kBand) {
      agree = Agreement::kIndeterminate;
    } else if (sa != sb) {
      agree = Agreement::kDisagree;
    } else {
      agree = sa == Status::kZero ? Agreement::kBothZero : Agreement::kBothNonzero;
    }
    ++counts[static_cast<int>(agree)];
    max_a = std::max(max_a, r.a);
    max_b = std::max(max_b, r.b);
    std::vector<double> row;
    append_point(row, z.stacked());
    row.push_back(hypothesis[s]);
    row.push_back(r.a);
    row.push_back(r.b);
    row.push_back(static_cast<double>(agree));
    rep.rows.push_back(std::move(row));
  }
  rep.equation_residuals["residual_a"] = max_a;
  rep.equation_residuals["residual_b"] = max_b;
  rep.diagnostics["both_zero"] = counts[0];
  rep.diagnostics["both_nonzero"] = counts[1];
  rep.diagnostics["disagree"] = counts[2];
  rep.diagnostics["indeterminate"] = counts[3];
  rep.diagnostics["samples"] = static_cast<double>(samples.size());
  if (rep.verdict != Verdict::kVacuous) {
    rep.verdict = counts[2] + counts[3] == 0 ? Verdict::kPass : Verdict::kFail;
  }
}

std::vector<std::string> type2_columns(Index n) {
  auto cols = coordinate_columns(n, true);
  cols.insert(cols.end(), {"symplectic", "residual_a", "residual_b", "agreement"});
  return cols;
}

// ---------------------------------------------------------------------------

HJReport hj_type1_magnetic(const OneFormSection& gamma, const HamiltonianSpec& h,
                           const MagneticStructure& w, const std::vector<ConfigPoint>& samples,
                           const Tolerances& tol) {
  HJReport rep;
  rep.check = "hj1";
  rep.columns = coordinate_columns(gamma.dim(), false);
  rep.columns.insert(rep.columns.end(), {"hypothesis", "equation", "level_set"});
  const Mat full = Mat::Identity(gamma.dim(), gamma.dim());
  double hyp = 0.0;
  double eq = 0.0;
  double level = 0.0;
  for (const ConfigPoint& q : samples) {
    const double hq = gamma_condition_on_subspace(gamma, w.b_field(), full, q);
    const PhasePoint z = gamma.lift(q);
    const TangentPhaseVector x = magnetic_vector_field(h, w, z);
    const double eq_q = (section_push(gamma, q, x.dq) - x.stacked()).norm();
    const double lv = level_set_residual(h, gamma, q, full);
    hyp = std::max(hyp, hq);
    eq = std::max(eq, eq_q);
    level = std::max(level, lv);
    std::vector<double> row;
    append_point(row, q.q);
    row.insert(row.end(), {hq, eq_q, lv});
    rep.rows.push_back(std::move(row));
  }
  rep.hypothesis_residuals["gamma_condition"] = hyp;
  rep.equation_residuals["type1"] = eq;
  rep.diagnostics["level_set_residual"] = level;
  if (hyp > tol.hypothesis) {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = "d(gamma) + B does not vanish on TQ";
  } else {
    rep.verdict = type1_verdict(rep, tol);
  }
  return rep;
}

HJReport hj_type2_magnetic(const OneFormSection& gamma, const PhaseMap& eps,
                           const HamiltonianSpec& h, const MagneticStructure& w,
                           const std::vector<PhasePoint>& samples, const Tolerances& tol) {
  HJReport rep;
  rep.check = "hj2";
  rep.columns = type2_columns(gamma.dim());
  std::vector<double> symp;
  double worst = 0.0;
  for (const PhasePoint& z : samples) {
    symp.push_back(check_symplectic_map(eps, w, z));
    worst = std::max(worst, symp.back());
  }
  rep.hypothesis_residuals["symplectic"] = worst;
  if (worst > tol.symplectic) {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = "eps is not symplectic for omega^B";
  }
  const double fine = tol.fd_step / 10.0;
  const OneFormSection gamma_fine = gamma.with_fd_jacobian(fine);
  const PhaseMap eps_fine = eps.with_fd_jacobian(fine);
  auto eval = [&](const PhasePoint& z, bool refined) {
    const OneFormSection& g = refined ? gamma_fine : gamma;
    const PhaseMap& e = refined ? eps_fine : eps;
    const PhasePoint ez = e(z);
    const ConfigPoint base = ez.base();
    const Vec xh = magnetic_vector_field(h, w, ez).stacked();
    const Vec xc = composed_field(h, e, w, z).stacked();
    const Vec lam = lifted_section_tangent(g, base) * xh;
    PairResidual r;
    r.a = (e.jacobian(z) * xc - lam).norm();
    r.b = (section_push(g, base, xh.head(z.dim())) - xh).norm();
    return r;
  };
  run_status_agreement(rep, samples, eval, symp, tol);
  return rep;
}

double check_section_images(const OneFormSection& gamma, const NonholonomicSystem& sys,
                            const std::vector<ConfigPoint>& samples, const Tolerances& tol) {
  double worst = 0.0;
  for (const ConfigPoint& q : samples) {
    const PhasePoint z = gamma.lift(q);
    const double rm = sys.m.residual(z).norm();
    if (rm > tol.on_manifold) {
      throw ImageNotInM("gamma(q) leaves the constraint manifold (residual " + std::to_string(rm) +
                        ")");
    }
    const Mat kb = k_basis_at(sys, z, tol.on_manifold);
    const Mat db = sys.d.basis(q);
    const Mat j = gamma.jacobian(q);
    for (Index c = 0; c < db.cols(); ++c) {
      Vec u(2 * q.dim());
      u << db.col(c), j * db.col(c);
      const double r = membership_residual(kb, u);
      if (r > tol.membership) {
        throw ImageNotInK("Tgamma maps D outside K (residual " + std::to_string(r) + ")");
      }
      worst = std::max(worst, r);
    }
  }
  return worst;
}

HJReport hj_type1_distributional(const OneFormSection& gamma, const NonholonomicSystem& sys,
                                 const std::vector<ConfigPoint>& samples, const Tolerances& tol) {
  const double k_membership = check_section_images(gamma, sys, samples, tol);
  HJReport rep;
  rep.check = "hj1";
  rep.columns = coordinate_columns(gamma.dim(), false);
  rep.columns.insert(rep.columns.end(), {"hypothesis", "equation", "level_set"});
  double hyp = 0.0;
  double eq = 0.0;
  double level = 0.0;
  for (const ConfigPoint& q : samples) {
    const Mat db = sys.d.basis(q);
    const double hq = gamma_condition_on_subspace(gamma, sys.w.b_field(), db, q);
    const PhasePoint z = gamma.lift(q);
    const Vec xgamma = magnetic_vector_field(sys.h, sys.w, z).dq;
    const Vec xk = distributional_field_restricted(sys, z, tol).x.stacked();
    const double eq_q = (section_push(gamma, q, xgamma) - xk).norm();
    const double lv = level_set_residual(sys.h, gamma, q, db);
    hyp = std::max(hyp, hq);
    eq = std::max(eq, eq_q);
    level = std::max(level, lv);
    std::vector<double> row;
    append_point(row, q.q);
    row.insert(row.end(), {hq, eq_q, lv});
    rep.rows.push_back(std::move(row));
  }
  rep.hypothesis_residuals["gamma_condition_on_D"] = hyp;
  rep.hypothesis_residuals["image_in_K"] = k_membership;
  rep.equation_residuals["type1"] = eq;
  rep.diagnostics["level_set_residual"] = level;
  if (hyp > tol.hypothesis) {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = "d(gamma) + B does not vanish on D";
  } else {
    rep.verdict = type1_verdict(rep, tol);
  }
  return rep;
}

HJReport hj_type2_distributional(const OneFormSection& gamma, const PhaseMap& eps,
                                 const NonholonomicSystem& sys,
                                 const std::vector<PhasePoint>& samples, const Tolerances& tol) {
  std::vector<ConfigPoint> bases;
  for (const PhasePoint& z : samples) bases.push_back(z.base());
  const double k_membership = check_section_images(gamma, sys, bases, tol);
  HJReport rep;
  rep.check = "hj2";
  rep.columns = type2_columns(gamma.dim());
  std::vector<double> symp;
  double worst = 0.0;
  double off_m = 0.0;
  for (const PhasePoint& z : samples) {
    symp.push_back(check_symplectic_map(eps, sys.w, z));
    worst = std::max(worst, symp.back());
    off_m = std::max(off_m, sys.m.residual(eps(z)).norm());
  }
  rep.hypothesis_residuals["symplectic"] = worst;
  rep.hypothesis_residuals["eps_into_M"] = off_m;
  rep.hypothesis_residuals["image_in_K"] = k_membership;
  if (worst > tol.symplectic) {
    rep.verdict = Verdict::kVacuous;
    rep.failed_hypothesis = "eps is not symplectic for omega^B";
  }
  if (off_m > tol.on_manifold) {
    rep.verdict = Verdict::kVacuous;
    if (!rep.failed_hypothesis.empty()) rep.failed_hypothesis += "; ";
    rep.failed_hypothesis += "eps moves samples off the constraint manifold";
    return rep;
  }
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
    const Vec xk = distributional_field_restricted(sys, ez, tol).x.stacked();
    const Vec lam = lifted_section_tangent(g, base) * xh;
    PairResidual r;
    r.a = (tau_K(sys, ez, e.jacobian(z) * xc, tol) - lam).norm();
    r.b = (section_push(g, base, xh.head(z.dim())) - xk).norm();
    return r;
  };
  run_status_agreement(rep, samples, eval, symp, tol);
  return rep;
}

TwoFormField build_magnetic_from_gamma(const OneFormSection& gamma) {
  // -(J^T - J) = J - J^T
  return TwoFormField::from_matrix(gamma.dim(), [gamma](const Vec& q) {
    const Mat j = gamma.jacobian(ConfigPoint(q));
    return Mat(j - j.transpose());
  });
}

std::vector<PhasePoint> section_phase_samples(const OneFormSection& gamma,
                                              const NonholonomicSystem& sys,
                                              const std::vector<ConfigPoint>& samples,
                                              std::uint64_t seed, double perturbation) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<PhasePoint> out;
  out.reserve(2 * samples.size());
  for (const ConfigPoint& q : samples) {
    const PhasePoint on = gamma.lift(q);
    out.push_back(on);
    PhasePoint off = on;
    for (Index i = 0; i < off.p.size(); ++i) off.p(i) += perturbation * unit(rng);
    out.push_back(project_to_M(sys, off));
  }
  return out;
}

}  // namespace magnomech
