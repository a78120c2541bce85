#include "magnomech/magnetic.hpp"

#include <cmath>

#include "magnomech/errors.hpp"

namespace magnomech {

HamiltonianSpec HamiltonianSpec::quadratic(Index n, MatrixField mass, ScalarField potential) {
  HamiltonianSpec h;
  h.n_ = n;
  h.mass_ = std::move(mass);
  h.potential_ = std::move(potential);
  return h;
}

HamiltonianSpec HamiltonianSpec::general(Index n, ScalarField fn) {
  HamiltonianSpec h;
  h.n_ = n;
  h.general_ = std::move(fn);
  return h;
}

HamiltonianSpec HamiltonianSpec::with_potential(ScalarField potential) const {
  HamiltonianSpec h = *this;
  h.potential_ = std::move(potential);
  return h;
}

Mat HamiltonianSpec::mass(const ConfigPoint& q) const {
  Mat g = mass_(q.q);
  if (g.rows() != n_ || g.cols() != n_) throw DimensionMismatch("mass matrix must be n x n");
  if (!g.allFinite()) throw NumericalDomainError("mass matrix is not finite");
  if (max_abs(g - g.transpose()) > 1e-12 * (1.0 + max_abs(g))) {
    throw NumericalDomainError("mass matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalDomainError("mass matrix is not positive definite");
  return g;
}

Mat HamiltonianSpec::inverse_mass(const ConfigPoint& q) const {
  const Mat g = mass(q);
  return g.llt().solve(Mat::Identity(n_, n_));
}

double HamiltonianSpec::operator()(const PhasePoint& z) const {
  if (general_) return (*general_)(z.stacked());
  const Mat g = mass(z.base());
  const Vec v = g.llt().solve(z.p);
  return 0.5 * z.p.dot(v) + potential_(z.q);
}

Vec HamiltonianSpec::gradient(const PhasePoint& z) const {
  Vec grad(2 * n_);
  if (general_) {
    grad = general_->gradient(z.stacked());
  } else {
    const Mat g = mass(z.base());
    const Vec v = g.llt().solve(z.p);
    const Vec dv = potential_.gradient(z.q);
    for (Index j = 0; j < n_; ++j) {
      grad(j) = -0.5 * v.dot(mass_.partial(z.q, j) * v) + dv(j);
    }
    grad.tail(n_) = v;
  }
  if (!grad.allFinite()) throw NumericalDomainError("Hamiltonian gradient is not finite");
  return grad;
}

// ---------------------------------------------------------------------------

Mat MagneticStructure::interior_matrix(const ConfigPoint& q) const {
  const Index n = b_.dim();
  Mat w = Mat::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = b_(q);
  w.topRightCorner(n, n) = -Mat::Identity(n, n);
  w.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return w;
}

double MagneticStructure::pair(const PhasePoint& z, const Vec& u, const Vec& v) const {
  return (interior_matrix(z) * u).dot(v);
}

// ---------------------------------------------------------------------------

PhaseMap::PhaseMap(Index n, Eval eval, Jacobian jacobian, double fd_step)
    : n_(n), eval_(std::move(eval)), jacobian_(std::move(jacobian)), fd_step_(fd_step) {}

PhaseMap PhaseMap::identity(Index n) {
  return {n, [](const Vec& z) { return z; },
          [n](const Vec&) { return Mat::Identity(2 * n, 2 * n).eval(); }};
}

PhasePoint PhaseMap::operator()(const PhasePoint& z) const {
  const Vec out = eval_(z.stacked());
  if (!out.allFinite()) throw NumericalDomainError("phase map produced a non-finite point");
  return PhasePoint::from_stacked(out);
}

Mat PhaseMap::jacobian(const PhasePoint& z) const {
  if (jacobian_) {
    Mat j = jacobian_(z.stacked());
    if (!j.allFinite()) throw NumericalDomainError("phase map Jacobian is not finite");
    return j;
  }
  return fd_jacobian(z, fd_step_);
}

Mat PhaseMap::fd_jacobian(const PhasePoint& z, double h) const {
  Mat j = central_difference_jacobian(eval_, z.stacked(), h);
  if (!j.allFinite()) throw NumericalDomainError("phase map Jacobian is not finite");
  return j;
}

PhaseMap PhaseMap::with_fd_jacobian(double h) const { return {n_, eval_, {}, h}; }

// ---------------------------------------------------------------------------

TangentPhaseVector field_from_differential(const MagneticStructure& w, const PhasePoint& z,
                                           const Vec& dh) {
  const Mat m = w.interior_matrix(z);
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw DegenerateFormError("magnetic symplectic matrix is singular");
  const Vec x = lu.solve(dh);
  if (!x.allFinite() || (m * x - dh).norm() > 1e-10 * (1.0 + dh.norm())) {
    throw DegenerateFormError("magnetic symplectic solve did not converge");
  }
  return TangentPhaseVector::from_stacked(x);
}

TangentPhaseVector magnetic_vector_field(const HamiltonianSpec& h, const MagneticStructure& w,
                                         const PhasePoint& z) {
  return field_from_differential(w, z, h.gradient(z));
}

TangentPhaseVector coordinate_formula_field(const HamiltonianSpec& h, const TwoFormField& b,
                                            const PhasePoint& z) {
  const Index n = z.dim();
  const Vec grad = h.gradient(z);
  const Vec hq = grad.head(n);
  const Vec hp = grad.tail(n);
  const Mat coeff = kCoordinateFormulaScale * b(z.base());
  return {hp, -hq - coeff * hp};
}

double check_symplectic_map(const PhaseMap& eps, const MagneticStructure& w, const PhasePoint& z) {
  const Mat j = eps.jacobian(z);
  const Mat pulled = j.transpose() * w.interior_matrix(eps(z)) * j;
  return (pulled - w.interior_matrix(z)).norm();
}

double energy_derivative(const HamiltonianSpec& h, const MagneticStructure& w, const PhasePoint& z) {
  return h.gradient(z).dot(magnetic_vector_field(h, w, z).stacked());
}

Vec composed_gradient(const HamiltonianSpec& h, const PhaseMap& eps, const PhasePoint& z) {
  return eps.jacobian(z).transpose() * h.gradient(eps(z));
}

TangentPhaseVector composed_field(const HamiltonianSpec& h, const PhaseMap& eps,
                                  const MagneticStructure& w, const PhasePoint& z) {
  return field_from_differential(w, z, composed_gradient(h, eps, z));
}

Mat lifted_section_tangent(const OneFormSection& gamma, const ConfigPoint& q) {
  const Index n = q.dim();
  Mat t = Mat::Zero(2 * n, 2 * n);
  t.topLeftCorner(n, n) = Mat::Identity(n, n);
  t.bottomLeftCorner(n, n) = gamma.jacobian(q);
  return t;
}

namespace {

double combined_form(const OneFormSection& gamma, const MagneticStructure& w, const ConfigPoint& q,
                     const Vec& x, const Vec& y) {
  return x.dot((exterior_derivative_one_form(gamma, q) + w.b_field()(q)) * y);
}

}  // namespace

double pullback_identity_residual(const OneFormSection& gamma, const MagneticStructure& w,
                                  const PhasePoint& z, const Vec& v, const Vec& u) {
  const Index n = z.dim();
  const ConfigPoint q = z.base();
  const Mat tl = lifted_section_tangent(gamma, q);
  const PhasePoint image = gamma.lift(q);
  return w.pair(image, tl * v, tl * u) + combined_form(gamma, w, q, v.head(n), u.head(n));
}

double splitting_identity_residual(const OneFormSection& gamma, const MagneticStructure& w,
                                   const PhasePoint& z, const Vec& v, const Vec& u) {
  const Index n = z.dim();
  const ConfigPoint q = z.base();
  const Mat tl = lifted_section_tangent(gamma, q);
  return w.pair(z, tl * v, u) - w.pair(z, v, u - tl * u) +
         combined_form(gamma, w, q, v.head(n), u.head(n));
}

}  // namespace magnomech
