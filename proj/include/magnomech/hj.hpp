#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "magnomech/nonholonomic.hpp"
#include "magnomech/report.hpp"
#include "magnomech/tolerances.hpp"

namespace magnomech {

using HJReport = CheckReport;

enum class Status { kZero, kNonzero, kBand };

Status residual_status(double r, const Tolerances& tol);

// Sample-wise status agreement code stored in report tables.
enum class Agreement { kBothZero = 0, kBothNonzero = 1, kDisagree = 2, kIndeterminate = 3 };

// Tgamma X^gamma = X^B_H o gamma, hypothesis d gamma + B = 0 on all of TQ.
HJReport hj_type1_magnetic(const OneFormSection& gamma, const HamiltonianSpec& h,
                           const MagneticStructure& w, const std::vector<ConfigPoint>& samples,
                           const Tolerances& tol = default_tolerances());

// Status agreement of T eps X_{H o eps} - T lambda X_H o eps and Tgamma X^eps - X_H o eps.
HJReport hj_type2_magnetic(const OneFormSection& gamma, const PhaseMap& eps,
                           const HamiltonianSpec& h, const MagneticStructure& w,
                           const std::vector<PhasePoint>& samples,
                           const Tolerances& tol = default_tolerances());

// Tgamma X^gamma = X^B_K o gamma with hypotheses Im gamma in M, Tgamma(D) in K,
// d gamma + B = 0 on D. Throws ImageNotInM / ImageNotInK.
HJReport hj_type1_distributional(const OneFormSection& gamma, const NonholonomicSystem& sys,
                                 const std::vector<ConfigPoint>& samples,
                                 const Tolerances& tol = default_tolerances());

HJReport hj_type2_distributional(const OneFormSection& gamma, const PhaseMap& eps,
                                 const NonholonomicSystem& sys,
                                 const std::vector<PhasePoint>& samples,
                                 const Tolerances& tol = default_tolerances());

// B := -d gamma, as a field whose entries follow gamma's Jacobian.
TwoFormField build_magnetic_from_gamma(const OneFormSection& gamma);

// Guard used by the distributional checks; throws ImageNotInM / ImageNotInK.
// Returns the largest K-membership residual of Tgamma(D).
double check_section_images(const OneFormSection& gamma, const NonholonomicSystem& sys,
                            const std::vector<ConfigPoint>& samples, const Tolerances& tol);

// Two phase points per configuration sample: gamma(q) and a perturbed
// momentum projected back onto M.
std::vector<PhasePoint> section_phase_samples(const OneFormSection& gamma,
                                              const NonholonomicSystem& sys,
                                              const std::vector<ConfigPoint>& samples,
                                              std::uint64_t seed, double perturbation = 0.3);

// Building blocks shared with the reduced checks.

std::vector<std::string> coordinate_columns(Index n, bool with_momenta);
std::vector<std::string> type2_columns(Index n);

// d(H o gamma)(q) restricted to the columns of `subspace`.
double level_set_residual(const HamiltonianSpec& h, const OneFormSection& gamma,
                          const ConfigPoint& q, const Mat& subspace);

// (v, J(q) v): Tgamma applied to a base velocity.
Vec section_push(const OneFormSection& gamma, const ConfigPoint& q, const Vec& base_velocity);

struct PairResidual {
  double a = 0.0;
  double b = 0.0;
};

using PairEvaluator = std::function<PairResidual(const PhasePoint&, bool refined)>;

// Evaluates both residuals per sample (re-running band cases with refined=true),
// fills the agreement table and sets PASS/FAIL unless already VACUOUS.
void run_status_agreement(HJReport& rep, const std::vector<PhasePoint>& samples,
                          const PairEvaluator& eval, const std::vector<double>& hypothesis,
                          const Tolerances& tol);

}  // namespace magnomech
