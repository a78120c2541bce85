#pragma once

#include <functional>
#include <optional>

#include "magnomech/geometry.hpp"

namespace magnomech {

// H(q, p) = 1/2 p^T G(q)^{-1} p + V(q), or an arbitrary phase-space function
// when `general` is set. Gradients are stacked (dH/dq, dH/dp).
class HamiltonianSpec {
 public:
  HamiltonianSpec() = default;

  static HamiltonianSpec quadratic(Index n, MatrixField mass, ScalarField potential);
  // h takes the stacked phase vector (q, p).
  static HamiltonianSpec general(Index n, ScalarField h);

  Index dim() const { return n_; }
  bool is_quadratic() const { return !general_.has_value(); }

  // G(q); throws NumericalDomainError unless symmetric positive definite.
  Mat mass(const ConfigPoint& q) const;
  Mat inverse_mass(const ConfigPoint& q) const;
  const MatrixField& mass_field() const { return mass_; }
  const ScalarField& potential() const { return potential_; }

  double operator()(const PhasePoint& z) const;
  Vec gradient(const PhasePoint& z) const;

  // Same kinetic part with the potential replaced.
  HamiltonianSpec with_potential(ScalarField potential) const;

 private:
  Index n_ = 0;
  MatrixField mass_;
  ScalarField potential_;
  std::optional<ScalarField> general_;
};

// Point-wise evaluator for omega^B = omega - pi^* B.
class MagneticStructure {
 public:
  MagneticStructure() = default;
  explicit MagneticStructure(TwoFormField b) : b_(std::move(b)) {}

  Index dim() const { return b_.dim(); }
  const TwoFormField& b_field() const { return b_; }

  // 2n x 2n matrix W with (W u) . v = omega^B(u, v); W = [[B, -I], [I, 0]].
  Mat interior_matrix(const ConfigPoint& q) const;
  Mat interior_matrix(const PhasePoint& z) const { return interior_matrix(z.base()); }
  double pair(const PhasePoint& z, const Vec& u, const Vec& v) const;

 private:
  TwoFormField b_;
};

// A map eps: T*Q -> T*Q acting on stacked phase vectors.
class PhaseMap {
 public:
  using Eval = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  PhaseMap() = default;
  PhaseMap(Index n, Eval eval, Jacobian jacobian = {}, double fd_step = kDefaultFdStep);

  static PhaseMap identity(Index n);

  Index dim() const { return n_; }
  PhasePoint operator()(const PhasePoint& z) const;
  Mat jacobian(const PhasePoint& z) const;
  Mat fd_jacobian(const PhasePoint& z, double h) const;
  PhaseMap with_fd_jacobian(double h) const;

 private:
  Index n_ = 0;
  Eval eval_;
  Jacobian jacobian_;
  double fd_step_ = kDefaultFdStep;
};

// X^B_H at z by dense solve of W X = grad H.
TangentPhaseVector magnetic_vector_field(const HamiltonianSpec& h, const MagneticStructure& w,
                                         const PhasePoint& z);

// Field of a given covector `dh` at z: W X = dh.
TangentPhaseVector field_from_differential(const MagneticStructure& w, const PhasePoint& z,
                                           const Vec& dh);

// Scaling between the stored evaluation matrix and the coefficient matrix in
// X = (H_p, -H_q - kappa B H_p).
inline constexpr double kCoordinateFormulaScale = -1.0;

TangentPhaseVector coordinate_formula_field(const HamiltonianSpec& h, const TwoFormField& b,
                                            const PhasePoint& z);

// ||J^T W(eps z) J - W(z)||_F with J the Jacobian of eps at z.
double check_symplectic_map(const PhaseMap& eps, const MagneticStructure& w, const PhasePoint& z);

// dH(X^B_H) at z.
double energy_derivative(const HamiltonianSpec& h, const MagneticStructure& w, const PhasePoint& z);

// grad(H o eps)(z) by the chain rule.
Vec composed_gradient(const HamiltonianSpec& h, const PhaseMap& eps, const PhasePoint& z);

// X^B_{H o eps} at z.
TangentPhaseVector composed_field(const HamiltonianSpec& h, const PhaseMap& eps,
                                  const MagneticStructure& w, const PhasePoint& z);

// T(lambda) at a point over q, lambda = gamma o pi: (dq, dp) -> (dq, J dq).
Mat lifted_section_tangent(const OneFormSection& gamma, const ConfigPoint& q);

// lambda^* omega^B(v, w) + (d gamma + B)(v_q, w_q).
double pullback_identity_residual(const OneFormSection& gamma, const MagneticStructure& w,
                                  const PhasePoint& z, const Vec& v, const Vec& u);

// omega^B(T lambda v, u) - omega^B(v, u - T lambda u) + (d gamma + B)(v_q, u_q).
double splitting_identity_residual(const OneFormSection& gamma, const MagneticStructure& w,
                                   const PhasePoint& z, const Vec& v, const Vec& u);

}  // namespace magnomech
