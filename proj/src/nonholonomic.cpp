#include "magnomech/nonholonomic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magnomech/errors.hpp"

namespace magnomech {

ConstraintManifold ConstraintManifold::from_legendre(const ConstraintDistribution& d,
                                                     const HamiltonianSpec& h) {
  ConstraintManifold m;
  m.n_ = d.dim();
  m.k_ = d.count();
  m.legendre_ = true;
  const Index n = m.n_;
  m.c_ = [d, h, n](const Vec& z) -> Vec {
    const ConfigPoint q(z.head(n));
    return d.forms(q) * h.mass(q).llt().solve(z.tail(n));
  };
  m.jac_ = [d, h, n](const Vec& z) -> Mat {
    const ConfigPoint q(z.head(n));
    const Mat a = d.forms(q);
    const Mat g = h.mass(q);
    const Eigen::LLT<Mat> llt(g);
    const Vec v = llt.solve(z.tail(n));
    Mat jac(a.rows(), 2 * n);
    for (Index j = 0; j < n; ++j) {
      const Vec dgv = h.mass_field().partial(q.q, j) * v;
      jac.col(j) = d.partial(q, j) * v - a * llt.solve(dgv);
    }
    jac.rightCols(n) = llt.solve(a.transpose()).transpose();
    return jac;
  };
  return m;
}

ConstraintManifold ConstraintManifold::explicit_residual(Index n, Index k, Residual c, Jacobian jac,
                                                         double fd_step) {
  ConstraintManifold m;
  m.n_ = n;
  m.k_ = k;
  m.c_ = std::move(c);
  m.jac_ = std::move(jac);
  m.fd_step_ = fd_step;
  return m;
}

Vec ConstraintManifold::residual(const PhasePoint& z) const {
  if (k_ == 0) return Vec(0);
  Vec r = c_(z.stacked());
  if (!r.allFinite()) throw NumericalDomainError("constraint residual is not finite");
  return r;
}

Mat ConstraintManifold::jacobian(const PhasePoint& z) const {
  if (k_ == 0) return Mat(0, 2 * n_);
  Mat j = jac_ ? jac_(z.stacked()) : central_difference_jacobian(c_, z.stacked(), fd_step_);
  if (!j.allFinite()) throw NumericalDomainError("constraint Jacobian is not finite");
  return j;
}

NonholonomicSystem::NonholonomicSystem(HamiltonianSpec h_, MagneticStructure w_,
                                       ConstraintDistribution d_)
    : h(std::move(h_)), w(std::move(w_)), d(std::move(d_)) {
  if (d.count() > 0 && !h.is_quadratic()) {
    throw InvalidArgument("a general Hamiltonian with constraints needs an explicit manifold residual");
  }
  m = ConstraintManifold::from_legendre(d, h);
}

NonholonomicSystem::NonholonomicSystem(HamiltonianSpec h_, MagneticStructure w_,
                                       ConstraintDistribution d_, ConstraintManifold m_)
    : h(std::move(h_)), w(std::move(w_)), d(std::move(d_)), m(std::move(m_)) {}

// ---------------------------------------------------------------------------

PhasePoint project_to_M(const NonholonomicSystem& sys, const PhasePoint& z) {
  if (sys.constraint_count() == 0) return z;
  const ConfigPoint q = z.base();
  const Mat a = sys.d.forms(q);
  const Index k = sys.constraint_count();
  if (numerical_rank(a) < k) {
    throw DegenerateConstraintError("constraint matrix is rank deficient at projection point");
  }
  PhasePoint out = z;
  if (sys.m.is_legendre()) {
    const Mat ginv = sys.h.inverse_mass(q);
    const Mat s = a * ginv * a.transpose();
    const Vec c = a * ginv * z.p;
    out.p = z.p - a.transpose() * s.ldlt().solve(c);
  }
  // Newton polish; the only step for explicit residuals.
  for (int it = 0; it < 50; ++it) {
    const Vec c = sys.m.residual(out);
    if (c.norm() <= 1e-14 * (1.0 + out.p.norm())) break;
    const Mat jp = sys.m.jacobian(out).rightCols(z.dim());
    if (numerical_rank(jp) < k) {
      throw DegenerateConstraintError("constraint residual is degenerate in p");
    }
    out.p -= jp.transpose() * (jp * jp.transpose()).ldlt().solve(c);
  }
  if (sys.m.residual(out).norm() > 1e-12 * (1.0 + out.p.norm())) {
    throw NotOnManifoldError("projection onto the constraint manifold did not converge");
  }
  return out;
}

Mat f_condition(const NonholonomicSystem& sys, const PhasePoint& z) {
  const Index n = z.dim();
  Mat fc = Mat::Zero(sys.constraint_count(), 2 * n);
  fc.leftCols(n) = sys.d.forms(z.base());
  return fc;
}

Mat k_basis_unchecked(const NonholonomicSystem& sys, const PhasePoint& z) {
  const Index n = z.dim();
  const Index k = sys.constraint_count();
  if (k == 0) return Mat::Identity(2 * n, 2 * n);
  Mat stacked(2 * k, 2 * n);
  stacked << f_condition(sys, z), sys.m.jacobian(z);
  return null_space(stacked);
}

Mat k_basis_at(const NonholonomicSystem& sys, const PhasePoint& z, double on_manifold) {
  if (sys.constraint_count() > 0) {
    const double r = sys.m.residual(z).norm();
    if (r > on_manifold) {
      throw NotOnManifoldError("phase point is off the constraint manifold (residual " +
                               std::to_string(r) + ")");
    }
  }
  return k_basis_unchecked(sys, z);
}

double membership_residual(const Mat& basis, const Vec& u) {
  const double norm = u.norm();
  if (norm == 0.0) return 0.0;
  const Vec off = u - basis * (basis.transpose() * u);
  return off.norm() / norm;
}

CompatibilityReport check_compatibility(const NonholonomicSystem& sys, const PhasePoint& z,
                                        const Tolerances& tol) {
  CompatibilityReport rep;
  const Index n = z.dim();
  const Index k = sys.constraint_count();
  const Mat w = sys.w.interior_matrix(z);
  const Mat fc = f_condition(sys, z);
  const Mat dc = sys.m.jacobian(z);
  rep.rank_a = numerical_rank(fc);
  rep.rank_dc = numerical_rank(dc);
  const Mat fb = null_space(fc);
  rep.dim_f = fb.cols();
  rep.dim_tm = 2 * n - rep.rank_dc;
  // F-perp = {u : omega(u, f) = 0 for f in F} = ker(F^T W).
  Mat tm_cap(fb.cols() + dc.rows(), 2 * n);
  tm_cap << fb.transpose() * w, dc;
  rep.dim_tm_cap_f_perp = null_space(tm_cap).cols();
  const Mat kb = k_basis_unchecked(sys, z);
  rep.dim_k = kb.cols();
  rep.sigma_min = kb.cols() == 0 ? 0.0 : smallest_singular_value(kb.transpose() * w * kb);
  if (rep.rank_a < k) {
    rep.reason = "constraint forms have rank " + std::to_string(rep.rank_a) + " < k = " +
                 std::to_string(k);
  } else if (rep.rank_dc < k) {
    rep.reason = "constraint residual has rank " + std::to_string(rep.rank_dc) + " < k = " +
                 std::to_string(k);
  } else if (rep.dim_tm_cap_f_perp != 0) {
    rep.reason = "TM meets the omega-orthogonal of F in dimension " +
                 std::to_string(rep.dim_tm_cap_f_perp);
  } else if (!(rep.sigma_min > tol.sigma_min)) {
    rep.reason = "restricted form is degenerate";
  }
  rep.pass = rep.reason.empty();
  return rep;
}

namespace {

Vec restricted_solve(const Mat& kb, const Mat& w, const Vec& rhs_cov, double sigma_floor) {
  const Mat wk = kb.transpose() * w * kb;
  if (!(smallest_singular_value(wk) > sigma_floor)) {
    throw DegenerateFormError("restricted magnetic form is singular on K");
  }
  return kb * wk.fullPivLu().solve(kb.transpose() * rhs_cov);
}

}  // namespace

DistributionalField distributional_field_restricted(const NonholonomicSystem& sys,
                                                    const PhasePoint& z, const Tolerances& tol) {
  const Mat kb = k_basis_at(sys, z, tol.on_manifold);
  const Mat w = sys.w.interior_matrix(z);
  const Vec grad = sys.h.gradient(z);
  const Vec x = restricted_solve(kb, w, grad, tol.sigma_min);
  DistributionalField out;
  out.x = TangentPhaseVector::from_stacked(x);
  const Mat fct = f_condition(sys, z).transpose();
  out.multipliers = fct.size() == 0 ? Vec(0) : Vec(fct.colPivHouseholderQr().solve(w * x - grad));
  return out;
}

DistributionalField distributional_field_multiplier(const NonholonomicSystem& sys,
                                                    const PhasePoint& z, const Tolerances& tol) {
  const Index k = sys.constraint_count();
  if (k > 0 && sys.m.residual(z).norm() > tol.on_manifold) {
    throw NotOnManifoldError("phase point is off the constraint manifold");
  }
  const Mat w = sys.w.interior_matrix(z);
  const Vec grad = sys.h.gradient(z);
  Eigen::FullPivLU<Mat> lu(w);
  if (!lu.isInvertible()) throw DegenerateFormError("magnetic symplectic matrix is singular");
  const Vec xh = lu.solve(grad);
  DistributionalField out;
  if (k == 0) {
    out.x = TangentPhaseVector::from_stacked(xh);
    out.multipliers = Vec(0);
    return out;
  }
  const Mat zdirs = lu.solve(f_condition(sys, z).transpose());
  const Mat dc = sys.m.jacobian(z);
  const Mat mult = dc * zdirs;
  if (!(smallest_singular_value(mult) > tol.sigma_min)) {
    throw CompatibilityError("multiplier matrix is singular");
  }
  const Vec lambda = mult.fullPivLu().solve(-dc * xh);
  out.x = TangentPhaseVector::from_stacked(xh + zdirs * lambda);
  out.multipliers = lambda;
  return out;
}

TangentPhaseVector distributional_field_unchecked(const NonholonomicSystem& sys,
                                                  const PhasePoint& z) {
  const Mat kb = k_basis_unchecked(sys, z);
  return TangentPhaseVector::from_stacked(
      restricted_solve(kb, sys.w.interior_matrix(z), sys.h.gradient(z), 0.0));
}

Vec tau_K(const NonholonomicSystem& sys, const PhasePoint& z, const Vec& v, const Tolerances& tol) {
  const Mat kb = k_basis_at(sys, z, tol.on_manifold);
  const Mat w = sys.w.interior_matrix(z);
  return restricted_solve(kb, w, w * v, tol.sigma_min);
}

double check_field_in_F_along_gamma(const OneFormSection& gamma, const NonholonomicSystem& sys,
                                    const std::vector<ConfigPoint>& samples, const Tolerances& tol) {
  double worst = 0.0;
  for (const ConfigPoint& q : samples) {
    const PhasePoint z = gamma.lift(q);
    const double r = sys.m.residual(z).norm();
    if (r > tol.on_manifold) {
      throw ImageNotInM("gamma(q) is off the constraint manifold (residual " + std::to_string(r) +
                        ")");
    }
    const TangentPhaseVector x = magnetic_vector_field(sys.h, sys.w, z);
    const Mat a = sys.d.forms(q);
    if (a.rows() > 0) worst = std::max(worst, (a * x.dq).norm());
  }
  return worst;
}

}  // namespace magnomech
