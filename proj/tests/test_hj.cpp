#include <gtest/gtest.h>

#include "helpers.hpp"
#include "magnomech/errors.hpp"
#include "magnomech/hj.hpp"
#include "magnomech/sampling.hpp"
#include "magnomech/scenario.hpp"

using namespace mmtest;

namespace {

std::vector<ConfigPoint> box_samples(Index n, int count = 50) {
  return config_samples(Box::uniform(n, -1, 1), count, 0);
}

OneFormSection linear_section(const Mat& m) {
  return OneFormSection(m.rows(), [m](const Vec& q) { return Vec(m * q); }, [m](const Vec&) { return m; });
}

// H = 1/2 |p|^2 - 1/2 |L q|^2, constant along gamma = L q.
HamiltonianSpec level_hamiltonian(const Mat& l) {
  const Index n = l.rows();
  return HamiltonianSpec::quadratic(
      n, MatrixField::constant(Mat::Identity(n, n)),
      ScalarField([l](const Vec& q) { return -0.5 * (l * q).squaredNorm(); },
                  [l](const Vec& q) { return Vec(-l.transpose() * (l * q)); }));
}

NonholonomicSystem unconstrained(const HamiltonianSpec& h, const Mat& b) {
  return {h, MagneticStructure(TwoFormField::constant(b)), ConstraintDistribution::unconstrained(h.dim())};
}

ScenarioModel shipped_model(const std::string& name) { return build_model(load_scenario_file(scenario_path(name))); }

}  // namespace

TEST(ResidualStatus, ThresholdsAndBand) {
  const Tolerances tol;
  EXPECT_EQ(residual_status(5e-8, tol), Status::kZero);
  EXPECT_EQ(residual_status(5e-7, tol), Status::kBand);
  EXPECT_EQ(residual_status(5e-6, tol), Status::kNonzero);
}

TEST(TypeOneMagnetic, ClassicalExactSection) {
  // gamma = d(q1 q2), H = 1/2 |p|^2 - 1/2 |q|^2 keeps H o gamma constant.
  Mat l(2, 2);
  l << 0, 1, 1, 0;
  const auto rep = hj_type1_magnetic(linear_section(l), level_hamiltonian(l),
                                     MagneticStructure(TwoFormField::zero(2)), box_samples(2));
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_LT(rep.equation_residual(), 1e-8);
}

TEST(TypeOneMagnetic, LinearSectionMatchedToConstantField) {
  const Mat b = b3_12(1.5) + Mat((Mat(3, 3) << 0, 0, -0.4, 0, 0, 0.7, 0.4, -0.7, 0).finished());
  const Mat l = 0.5 * b;  // d(Lq) = L^T - L = -B
  const auto g = linear_section(l);
  const MagneticStructure w(TwoFormField::constant(b));
  const auto rep = hj_type1_magnetic(g, level_hamiltonian(l), w, box_samples(3));
  EXPECT_LT(rep.hypothesis_residual(), 1e-12);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_LT(rep.equation_residual(), 1e-8);
}

TEST(TypeOneMagnetic, EquationDefectEqualsEnergyGradientAlongSection) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const OneFormSection g = random_quadratic_section(3, rng).section();
    const MagneticStructure w(build_magnetic_from_gamma(g));
    const auto rep = hj_type1_magnetic(g, free_hamiltonian(3), w, box_samples(3, 20));
    EXPECT_LT(rep.hypothesis_residual(), 1e-12);
    EXPECT_NEAR(rep.equation_residual(), rep.diagnostics.at("level_set_residual"), 1e-12);
  }
}

TEST(TypeOneMagnetic, ViolatedHypothesisIsVacuous) {
  std::mt19937_64 rng(2);
  const Mat l = random_vec(4, rng).reshaped(2, 2);
  const auto rep = hj_type1_magnetic(linear_section(l), free_hamiltonian(2),
                                     MagneticStructure(TwoFormField::constant(planar_b(1.0))), box_samples(2));
  EXPECT_EQ(rep.verdict, Verdict::kVacuous);
  EXPECT_FALSE(rep.failed_hypothesis.empty());
  EXPECT_GT(rep.equation_residual(), 1e-7);
}

TEST(BuildMagnetic, ClosedSectionGivesZeroField) {
  Mat l(2, 2);
  l << 1, 2, 2, -3;
  const TwoFormField b = build_magnetic_from_gamma(linear_section(l));
  EXPECT_EQ(b(ConfigPoint(vec({0.5, 0.5}))).norm(), 0.0);
}

TEST(BuildMagnetic, ShearSectionGivesNegatedDifferential) {
  Mat l(2, 2);
  l << 0, 0, 1, 0;  // gamma = (0, q1)
  const auto g = linear_section(l);
  const ConfigPoint q(vec({0.2, 0.3}));
  EXPECT_EQ(build_magnetic_from_gamma(g)(q), Mat(-exterior_derivative_one_form(g, q)));
  EXPECT_EQ(build_magnetic_from_gamma(g)(q), planar_b(-1.0));
}

TEST(TypeTwoMagnetic, IdentityMapReducesToTypeOne) {
  const auto m = shipped_model("charged-particle");
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(2, 20), 0);
  const auto rep = hj_type2_magnetic(*m.gamma, PhaseMap::identity(2), m.system.h, m.system.w, zs);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_EQ(rep.diagnostics.at("both_zero"), 20.0);
  EXPECT_EQ(rep.diagnostics.at("both_nonzero"), 20.0);
  // section points are the even rows
  for (std::size_t r = 0; r < rep.rows.size(); r += 2) {
    EXPECT_LT(rep.rows[r][rep.rows[r].size() - 2], 1e-7);
  }
}

TEST(TypeTwoMagnetic, TranslationWithGenericSectionIsNonzeroTogether) {
  std::mt19937_64 rng(5);
  const OneFormSection g = random_quadratic_section(2, rng).section();
  const auto h = free_hamiltonian(2);
  const MagneticStructure w(TwoFormField::constant(planar_b(1.0)));
  const PhaseMap shift(2, [](const Vec& s) { Vec o = s; o(0) += 0.4; return o; });
  std::vector<PhasePoint> zs;
  for (const auto& q : box_samples(2, 30)) zs.push_back(g.lift(q));
  const auto rep = hj_type2_magnetic(g, shift, h, w, zs);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_EQ(rep.diagnostics.at("both_nonzero"), 30.0);
}

TEST(TypeTwoMagnetic, ZeroFieldCanonicalEquivalence) {
  Mat l(2, 2);
  l << 0, 1, 1, 0;
  const auto h = level_hamiltonian(l);
  const MagneticStructure w(TwoFormField::zero(2));
  const auto sys = unconstrained(h, Mat::Zero(2, 2));
  const auto zs = section_phase_samples(linear_section(l), sys, box_samples(2, 20), 1);
  const auto rep = hj_type2_magnetic(linear_section(l), PhaseMap::identity(2), h, w, zs);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_EQ(rep.diagnostics.at("both_zero"), 20.0);
}

TEST(TypeTwoMagnetic, NonSymplecticMapIsVacuous) {
  const auto m = shipped_model("charged-particle");
  const PhaseMap scale(2, [](const Vec& s) { Vec o = s; o.tail(2) *= 2.0; return o; });
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(2, 5), 0);
  const auto rep = hj_type2_magnetic(*m.gamma, scale, m.system.h, m.system.w, zs);
  EXPECT_EQ(rep.verdict, Verdict::kVacuous);
  EXPECT_GT(rep.hypothesis_residuals.at("symplectic"), 1.0);
}

TEST(TypeTwoMagnetic, ResidualsCoincide) {
  // Both residuals measure the same defect; they agree sample by sample.
  const auto m = shipped_model("magnetic-bottle");
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(3, 20), 4);
  const auto rep = hj_type2_magnetic(*m.gamma, *m.epsilon, m.system.h, m.system.w, zs);
  for (const auto& row : rep.rows) EXPECT_NEAR(row[row.size() - 3], row[row.size() - 2], 1e-8);
}

TEST(TypeOneDistributional, UnconstrainedMatchesMagnetic) {
  const auto m = shipped_model("charged-particle");
  const auto qs = box_samples(2);
  const auto a = hj_type1_magnetic(*m.gamma, m.system.h, m.system.w, qs);
  const auto b = hj_type1_distributional(*m.gamma, m.system, qs);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_NEAR(a.equation_residual(), b.equation_residual(), 1e-12);
}

TEST(TypeOneDistributional, ZeroSectionOfFreeParticle) {
  const OneFormSection zero(3, [](const Vec&) { return Vec(Vec::Zero(3)); },
                            [](const Vec&) { return Mat(Mat::Zero(3, 3)); });
  const auto rep = hj_type1_distributional(zero, twisted_particle(), box_samples(3));
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_EQ(rep.equation_residual(), 0.0);
  EXPECT_EQ(rep.hypothesis_residuals.at("gamma_condition_on_D"), 0.0);
  EXPECT_LT(rep.hypothesis_residual(), 1e-14);
}

TEST(TypeOneDistributional, ShippedMagneticParticlePasses) {
  const auto m = shipped_model("nh-magnetic-particle");
  const auto rep = hj_type1_distributional(*m.gamma, m.system, box_samples(3));
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_LT(rep.hypothesis_residual(), 1e-10);
  EXPECT_LT(rep.equation_residual(), 1e-7);
  // independent look at the hypothesis through difference quotients
  const auto fd = hj_type1_distributional(m.gamma->with_fd_jacobian(1e-5), m.system, box_samples(3));
  EXPECT_LT(fd.hypothesis_residuals.at("gamma_condition_on_D"), 1e-8);
}

TEST(TypeOneDistributional, ImageGuardsAreDistinct) {
  const auto sys = twisted_particle();
  const OneFormSection off(3, [](const Vec&) { return vec({0, 0, 1}); });
  EXPECT_THROW(hj_type1_distributional(off, sys, box_samples(3, 5)), ImageNotInM);
  // within the M tolerance pointwise, but its tangent leaves TM
  const OneFormSection wiggle(3, [](const Vec& q) { return vec({0, 0, 1e-9 * std::sin(1e4 * q(0))}); });
  EXPECT_THROW(hj_type1_distributional(wiggle, sys, box_samples(3, 5)), ImageNotInK);
}

TEST(TypeTwoDistributional, UnconstrainedMatchesMagnetic) {
  const auto m = shipped_model("charged-particle");
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(2, 20), 0);
  const auto a = hj_type2_magnetic(*m.gamma, *m.epsilon, m.system.h, m.system.w, zs);
  const auto b = hj_type2_distributional(*m.gamma, *m.epsilon, m.system, zs);
  EXPECT_EQ(a.verdict, b.verdict);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) EXPECT_EQ(a.rows[r].back(), b.rows[r].back());
}

TEST(TypeTwoDistributional, IdentityAndTranslationAgree) {
  const auto m = shipped_model("nh-magnetic-particle");
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(3, 25), 3);
  for (const PhaseMap& eps : {PhaseMap::identity(3), *m.epsilon}) {
    const auto rep = hj_type2_distributional(*m.gamma, eps, m.system, zs);
    EXPECT_EQ(rep.verdict, Verdict::kPass);
    EXPECT_EQ(rep.diagnostics.at("disagree"), 0.0);
    EXPECT_GT(rep.diagnostics.at("both_zero"), 0.0);
    EXPECT_GT(rep.diagnostics.at("both_nonzero"), 0.0);
  }
}

TEST(TypeTwoDistributional, MapLeavingManifoldIsVacuous) {
  const auto m = shipped_model("nh-magnetic-particle");
  const PhaseMap kick(3, [](const Vec& s) { Vec o = s; o(5) += 0.3; return o; });
  const auto zs = section_phase_samples(*m.gamma, m.system, box_samples(3, 5), 0);
  const auto rep = hj_type2_distributional(*m.gamma, kick, m.system, zs);
  EXPECT_EQ(rep.verdict, Verdict::kVacuous);
  EXPECT_GT(rep.hypothesis_residuals.at("eps_into_M"), 0.1);
}

TEST(SectionSamples, AlternateOnAndOffSection) {
  const auto m = shipped_model("nh-free-particle");
  const auto qs = box_samples(3, 10);
  const auto zs = section_phase_samples(*m.gamma, m.system, qs, 0);
  ASSERT_EQ(zs.size(), 20u);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_LT(m.system.m.residual(zs[i]).norm(), 1e-12);
    if (i % 2 == 0) EXPECT_EQ(zs[i].p, (*m.gamma)(qs[i / 2]));
  }
  const auto again = section_phase_samples(*m.gamma, m.system, qs, 0);
  for (std::size_t i = 0; i < zs.size(); ++i) EXPECT_EQ(zs[i].p, again[i].p);
}
