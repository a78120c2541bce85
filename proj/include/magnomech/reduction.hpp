#pragma once

#include <string>
#include <vector>

#include "magnomech/hj.hpp"

namespace magnomech {

// Translations along the listed (0-based) coordinates.
struct TranslationSymmetry {
  Index n = 0;
  std::vector<Index> cyclic;

  Index group_dim() const { return static_cast<Index>(cyclic.size()); }
  bool empty() const { return cyclic.empty(); }
  // 2n x m matrix of infinitesimal generators (e_i, 0).
  Mat generators() const;
  // (2n - m) x 2n selection that drops the cyclic q rows.
  Mat quotient_map() const;
  // (q without cyclic entries, p).
  Vec reduce(const PhasePoint& z) const;
  // z moved by `shift` along the cyclic coordinates.
  PhasePoint translate(const PhasePoint& z, const Vec& shift) const;
};

struct InvarianceReport {
  double max_derivative = 0.0;
  bool ok = true;
  std::string detail;
};

// Derivatives of H, A and B along the cyclic directions at each sample.
InvarianceReport verify_invariance(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const std::vector<PhasePoint>& samples,
                                   const Tolerances& tol = default_tolerances());

// Columns of d gamma / d q^i for cyclic i.
double section_invariance_residual(const TranslationSymmetry& sym, const OneFormSection& gamma,
                                   const ConfigPoint& q);
// ||J_eps g - g|| over generators g.
double map_invariance_residual(const TranslationSymmetry& sym, const PhaseMap& eps,
                               const PhasePoint& z);

// Basis of V cap K at z (possibly empty).
Mat build_vertical_V(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                     const PhasePoint& z, const Tolerances& tol = default_tolerances());

// Basis of U = {u in K : omega^B(u, v) = 0 for v in V cap K}.
Mat build_U(const TranslationSymmetry& sym, const NonholonomicSystem& sys, const PhasePoint& z,
            const Tolerances& tol = default_tolerances());

struct ReducedStructure {
  Mat kbar;        // (2n - m) x r orthonormal basis of the reduced distribution
  Mat lifts;       // 2n x r lifts of the kbar columns into U
  Mat omega_bar;   // r x r
  Index dim_v = 0;  // dim (V cap K)
  Index dim_u = 0;
  Index dim_k = 0;
  double sigma_min = 0.0;
  // Basis-free form of omega_bar: kbar omega_bar kbar^T.
  Mat operator_form() const { return kbar * omega_bar * kbar.transpose(); }
};

ReducedStructure reduced_structure(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const PhasePoint& z, const Tolerances& tol = default_tolerances());

// Reduced field at the image of z, in reduced coordinates (2n - m entries).
Vec reduced_field(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                  const PhasePoint& z, const Tolerances& tol = default_tolerances());

struct LiftReport {
  double field = 0.0;
  double form = 0.0;
  double energy = 0.0;
  double energy_derivative = 0.0;
};

// Discrepancies between z and a lift shifted along the cyclic coordinates.
LiftReport check_lift_independence(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                                   const PhasePoint& z, const Vec& shift,
                                   const Tolerances& tol = default_tolerances());

// max ||X_Kbar(pi z) - T pi X_K(z)|| with the reduced field computed from a shifted lift.
double check_related(const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                     const std::vector<PhasePoint>& samples, std::uint64_t seed,
                     const Tolerances& tol = default_tolerances());

HJReport hj_type1_reduced(const OneFormSection& gamma, const TranslationSymmetry& sym,
                          const NonholonomicSystem& sys, const std::vector<ConfigPoint>& samples,
                          bool invariance_ok, const Tolerances& tol = default_tolerances());

HJReport hj_type2_reduced(const OneFormSection& gamma, const PhaseMap& eps,
                          const TranslationSymmetry& sym, const NonholonomicSystem& sys,
                          const std::vector<PhasePoint>& samples, bool invariance_ok,
                          const Tolerances& tol = default_tolerances());

// Sample-wise comparison of the Type II statuses before and after reduction.
CheckReport type2_reduction_equivalence(const HJReport& full, const HJReport& reduced,
                                        const Tolerances& tol = default_tolerances());

}  // namespace magnomech
