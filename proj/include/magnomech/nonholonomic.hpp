#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magnomech/magnetic.hpp"
#include "magnomech/tolerances.hpp"

namespace magnomech {

// The constraint submanifold M of T*Q as the zero set of k residuals c(q, p).
class ConstraintManifold {
 public:
  using Residual = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  ConstraintManifold() = default;

  // c = A(q) G(q)^{-1} p.
  static ConstraintManifold from_legendre(const ConstraintDistribution& d, const HamiltonianSpec& h);
  // Explicit c on stacked (q, p); Jacobian by central differences when absent.
  static ConstraintManifold explicit_residual(Index n, Index k, Residual c, Jacobian jac = {},
                                              double fd_step = kDefaultFdStep);

  Index count() const { return k_; }
  bool is_legendre() const { return legendre_; }
  Vec residual(const PhasePoint& z) const;
  // k x 2n.
  Mat jacobian(const PhasePoint& z) const;

 private:
  Index n_ = 0;
  Index k_ = 0;
  bool legendre_ = false;
  Residual c_;
  Jacobian jac_;
  double fd_step_ = kDefaultFdStep;
};

struct NonholonomicSystem {
  HamiltonianSpec h;
  MagneticStructure w;
  ConstraintDistribution d;
  ConstraintManifold m;

  NonholonomicSystem() = default;
  // Uses the Legendre residual for M; requires a quadratic H when k > 0.
  NonholonomicSystem(HamiltonianSpec h_, MagneticStructure w_, ConstraintDistribution d_);
  NonholonomicSystem(HamiltonianSpec h_, MagneticStructure w_, ConstraintDistribution d_,
                     ConstraintManifold m_);

  Index dim() const { return h.dim(); }
  Index constraint_count() const { return d.count(); }
};

// Moves p (q fixed) onto M; for Legendre constraints this is the closed-form
// minimal change in the G^{-1} metric.
PhasePoint project_to_M(const NonholonomicSystem& sys, const PhasePoint& z);

// [A, 0]: vectors u with A u_q = 0 form F.
Mat f_condition(const NonholonomicSystem& sys, const PhasePoint& z);

// Orthonormal K-basis; NotOnManifoldError if z is further than `on_manifold` from M.
Mat k_basis_at(const NonholonomicSystem& sys, const PhasePoint& z, double on_manifold = 1e-8);
// Same without the membership guard (used at intermediate integrator stages).
Mat k_basis_unchecked(const NonholonomicSystem& sys, const PhasePoint& z);

// Relative distance of u from span(basis); 0 for the zero vector.
double membership_residual(const Mat& basis, const Vec& u);

struct CompatibilityReport {
  Index rank_a = 0;
  Index rank_dc = 0;
  Index dim_f = 0;
  Index dim_tm = 0;
  Index dim_k = 0;
  Index dim_tm_cap_f_perp = 0;
  double sigma_min = 0.0;
  bool pass = false;
  std::string reason;
};

CompatibilityReport check_compatibility(const NonholonomicSystem& sys, const PhasePoint& z,
                                        const Tolerances& tol = default_tolerances());

struct DistributionalField {
  TangentPhaseVector x;
  Vec multipliers;
};

// Restricted solve (K^T W K) xi = K^T grad H, X = K xi.
DistributionalField distributional_field_restricted(const NonholonomicSystem& sys,
                                                    const PhasePoint& z,
                                                    const Tolerances& tol = default_tolerances());
// X = X^B_H + W^{-1} [A, 0]^T lambda with Dc X = 0.
DistributionalField distributional_field_multiplier(const NonholonomicSystem& sys,
                                                    const PhasePoint& z,
                                                    const Tolerances& tol = default_tolerances());
// Restricted solve without the on-M guard.
TangentPhaseVector distributional_field_unchecked(const NonholonomicSystem& sys, const PhasePoint& z);

// omega^B-projection of v onto K along its omega^B-orthogonal.
Vec tau_K(const NonholonomicSystem& sys, const PhasePoint& z, const Vec& v,
          const Tolerances& tol = default_tolerances());

// max over samples of |A(q) (X^B_H o gamma)_q|; ImageNotInM when gamma(q) leaves M.
double check_field_in_F_along_gamma(const OneFormSection& gamma, const NonholonomicSystem& sys,
                                    const std::vector<ConfigPoint>& samples,
                                    const Tolerances& tol = default_tolerances());

}  // namespace magnomech
