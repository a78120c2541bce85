#include <gtest/gtest.h>

#include "helpers.hpp"
#include "magnomech/reduction.hpp"
#include "magnomech/sampling.hpp"
#include "magnomech/scenario.hpp"
#include "magnomech/suite.hpp"

using namespace mmtest;

namespace {

ScenarioModel shipped_model(const std::string& name) { return build_model(load_scenario_file(scenario_path(name))); }

NonholonomicSystem canonical(Index n, const ScalarField& v, const Mat& b) {
  return {HamiltonianSpec::quadratic(n, MatrixField::constant(Mat::Identity(n, n)), v),
          MagneticStructure(TwoFormField::constant(b)), ConstraintDistribution::unconstrained(n)};
}

// dim(V cap K) = m - rank([[A, 0]; Dc] G) by a direct rank computation.
Index vertical_dim_oracle(const TranslationSymmetry& sym, const NonholonomicSystem& sys, const PhasePoint& z) {
  const Mat g = sym.generators();
  if (sys.constraint_count() == 0) return g.cols();
  Mat cond(2 * sys.constraint_count(), 2 * z.dim());
  cond << f_condition(sys, z), sys.m.jacobian(z);
  return g.cols() - Eigen::FullPivLU<Mat>(cond * g).rank();
}

}  // namespace

TEST(TranslationSymmetry, GeneratorsAndQuotient) {
  const TranslationSymmetry sym{3, {1, 2}};
  const Mat g = sym.generators();
  EXPECT_EQ(g.rows(), 6);
  EXPECT_EQ(g.cols(), 2);
  EXPECT_EQ(g(1, 0), 1.0);
  EXPECT_EQ(g(2, 1), 1.0);
  const Mat pi = sym.quotient_map();
  EXPECT_EQ(pi.rows(), 4);
  EXPECT_EQ((pi * g).norm(), 0.0);
  const PhasePoint z = phase({1, 2, 3}, {4, 5, 6});
  EXPECT_EQ(sym.reduce(z), vec({1, 4, 5, 6}));
  EXPECT_EQ(sym.reduce(sym.translate(z, vec({9, -9}))), sym.reduce(z));
}

TEST(VerticalV, UnconstrainedOneCyclicIsOneDimensional) {
  const auto sys = canonical(2, ScalarField::constant(0), Mat::Zero(2, 2));
  const TranslationSymmetry sym{2, {0}};
  EXPECT_EQ(build_vertical_V(sym, sys, phase({0, 0}, {1, 1})).cols(), 1);
}

TEST(VerticalV, NoCyclicIndicesGivesEmptyBasis) {
  const auto sys = twisted_particle();
  const PhasePoint z = phase({0, 0, 0}, {1, 0, 0});
  const TranslationSymmetry sym{3, {}};
  EXPECT_EQ(build_vertical_V(sym, sys, z).cols(), 0);
  EXPECT_EQ(build_U(sym, sys, z).cols(), k_basis_at(sys, z).cols());
}

TEST(VerticalV, TwistedParticleMatchesRankOracle) {
  const auto sys = twisted_particle();
  const TranslationSymmetry sym{3, {1, 2}};
  for (const PhasePoint& z : phase_samples(sys, Box::uniform(3, -1, 1), Box::uniform(3, -1, 1), 30, 0)) {
    const Mat v = build_vertical_V(sym, sys, z);
    EXPECT_EQ(v.cols(), vertical_dim_oracle(sym, sys, z));
    const Mat kb = k_basis_at(sys, z);
    for (Index c = 0; c < v.cols(); ++c) {
      EXPECT_LT(membership_residual(kb, v.col(c)), 1e-10);
      EXPECT_LT(membership_residual(column_basis(sym.generators()), v.col(c)), 1e-10);
    }
  }
}

TEST(BuildU, OrthogonalityAndDimension) {
  const auto sys = twisted_particle(1.0);
  const TranslationSymmetry sym{3, {1, 2}};
  for (const PhasePoint& z : phase_samples(sys, Box::uniform(3, -1, 1), Box::uniform(3, -1, 1), 30, 1)) {
    const Mat u = build_U(sym, sys, z);
    const Mat v = build_vertical_V(sym, sys, z);
    EXPECT_EQ(u.cols(), k_basis_at(sys, z).cols() - v.cols());
    EXPECT_LT(max_abs(v.transpose() * sys.w.interior_matrix(z).transpose() * u), 1e-10);
  }
}

TEST(BuildU, UnconstrainedCanonicalOneCyclic) {
  const auto sys = canonical(2, ScalarField::constant(0), Mat::Zero(2, 2));
  const TranslationSymmetry sym{2, {0}};
  const PhasePoint z = phase({0.1, 0.2}, {0.3, 0.4});
  const Mat u = build_U(sym, sys, z);
  // oracle: kernel of g^T W^T, the omega-orthogonal of the generator
  const Mat oracle = null_space(sym.generators().transpose() * sys.w.interior_matrix(z).transpose());
  EXPECT_EQ(u.cols(), 3);
  EXPECT_EQ(oracle.cols(), 3);
  for (Index c = 0; c < u.cols(); ++c) EXPECT_LT(membership_residual(oracle, u.col(c)), 1e-12);
}

TEST(ReducedField, CyclicEliminationWithoutConstraints) {
  const ScalarField v([](const Vec& q) { return std::cos(q(1)); },
                      [](const Vec& q) { return vec({0, -std::sin(q(1))}); });
  const auto sys = canonical(2, v, Mat::Zero(2, 2));
  const TranslationSymmetry sym{2, {0}};
  const PhasePoint z = phase({5, 0.7}, {0.3, -0.4});
  // (q2dot, p1dot, p2dot) = (p2, 0, sin q2)
  EXPECT_LT((reduced_field(sym, sys, z) - vec({-0.4, 0, std::sin(0.7)})).norm(), 1e-12);
}

TEST(ReducedField, RelatedToFullFieldOnTwistedParticle) {
  const auto sys = twisted_particle();
  const TranslationSymmetry sym{3, {1, 2}};
  const auto zs = phase_samples(sys, Box::uniform(3, -1, 1), Box::uniform(3, -1, 1), 50, 2);
  EXPECT_LT(check_related(sym, sys, zs, 7), 1e-8);
  const auto free = canonical(2, ScalarField::constant(0), planar_b(0.0));
  EXPECT_LT(check_related(TranslationSymmetry{2, {1}}, free,
                          phase_samples(free, Box::uniform(2, -1, 1), Box::uniform(2, -1, 1), 20, 0), 1),
            1e-10);
}

TEST(ReducedField, MagneticVariantIsLiftIndependent) {
  const auto sys = twisted_particle(1.0);
  const TranslationSymmetry sym{3, {1, 2}};
  std::mt19937_64 rng(4);
  for (const PhasePoint& z : phase_samples(sys, Box::uniform(3, -1, 1), Box::uniform(3, -1, 1), 30, 3)) {
    const LiftReport l = check_lift_independence(sym, sys, z, random_vec(2, rng, 3.0));
    EXPECT_LT(l.field, 1e-10);
    EXPECT_LT(l.form, 1e-10);
    EXPECT_LT(l.energy, 1e-10);
    EXPECT_LT(l.energy_derivative, 1e-10);
    const ReducedStructure rs = reduced_structure(sym, sys, z);
    EXPECT_GT(rs.sigma_min, 1e-8);
    // pulling the reduced form back through the lifts reproduces omega on U
    EXPECT_LT(max_abs(rs.lifts.transpose() * sys.w.interior_matrix(z) * rs.lifts - rs.omega_bar), 1e-9);
  }
}

TEST(Invariance, BrokenSymmetryIsDetected) {
  const ScalarField v([](const Vec& q) { return q(0) * q(0); });
  const auto sys = canonical(2, v, Mat::Zero(2, 2));
  const auto zs = phase_samples(sys, Box::uniform(2, -1, 1), Box::uniform(2, -1, 1), 10, 0);
  EXPECT_FALSE(verify_invariance(TranslationSymmetry{2, {0}}, sys, zs).ok);
  EXPECT_TRUE(verify_invariance(TranslationSymmetry{2, {1}}, sys, zs).ok);
}

TEST(TypeOneReduced, ClassicalCyclicSection) {
  // gamma = d(0.5 q1 - cos q2), V = -1/2 sin^2 q2 keeps H o gamma constant.
  const ScalarField v([](const Vec& q) { return -0.5 * std::sin(q(1)) * std::sin(q(1)); });
  const auto sys = canonical(2, v, Mat::Zero(2, 2));
  const OneFormSection g(2, [](const Vec& q) { return vec({0.5, std::sin(q(1))}); },
                         [](const Vec& q) { return Mat((Mat(2, 2) << 0, 0, 0, std::cos(q(1))).finished()); });
  const auto rep = hj_type1_reduced(g, TranslationSymmetry{2, {0}}, sys,
                                    config_samples(Box::uniform(2, -1, 1), 30, 0), true);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  EXPECT_LT(rep.equation_residual(), 1e-8);
}

TEST(TypeOneReduced, ShippedReducedScenarioPasses) {
  const auto m = shipped_model("nh-magnetic-reduced");
  EXPECT_EQ(check_hj1(m, true).verdict, Verdict::kPass);
}

TEST(TypeOneReduced, NonInvariantSectionIsVacuous) {
  const auto sys = canonical(2, ScalarField::constant(0), Mat::Zero(2, 2));
  const OneFormSection g(2, [](const Vec& q) { return vec({0, q(0)}); });
  const auto rep = hj_type1_reduced(g, TranslationSymmetry{2, {0}}, sys,
                                    config_samples(Box::uniform(2, -1, 1), 10, 0), true);
  EXPECT_EQ(rep.verdict, Verdict::kVacuous);
  EXPECT_NE(rep.failed_hypothesis.find("gamma"), std::string::npos);
}

TEST(TypeTwoReduced, IdentityReducesToTypeOne) {
  const auto m = shipped_model("nh-magnetic-reduced");
  const auto zs = section_phase_samples(*m.gamma, m.system, config_samples(m.q_box, 20, 0), 0);
  const auto rep = hj_type2_reduced(*m.gamma, PhaseMap::identity(3), m.symmetry, m.system, zs, true);
  EXPECT_EQ(rep.verdict, Verdict::kPass);
  for (std::size_t r = 0; r < rep.rows.size(); r += 2) EXPECT_LT(rep.rows[r][rep.rows[r].size() - 2], 1e-7);
}

TEST(TypeTwoReduced, NonCyclicTranslationWithConstantField) {
  // charged particle reduced by q2; eps translates q1
  const auto m = shipped_model("charged-particle");
  const PhaseMap shift(2, [](const Vec& s) { Vec o = s; o(0) += 0.2; return o; });
  const auto zs = section_phase_samples(*m.gamma, m.system, config_samples(Box::uniform(2, -0.8, 0.8), 20, 0), 0);
  const TranslationSymmetry sym{2, {1}};
  const auto full = hj_type2_magnetic(*m.gamma, shift, m.system.h, m.system.w, zs);
  const auto red = hj_type2_reduced(*m.gamma, shift, sym, m.system, zs, true);
  EXPECT_EQ(red.verdict, Verdict::kPass);
  EXPECT_EQ(type2_reduction_equivalence(full, red).verdict, Verdict::kPass);
}

TEST(TypeTwoReduced, StatusEquivalenceOnShippedReducedScenarios) {
  for (const char* name : {"nh-free-particle", "nh-magnetic-reduced"}) {
    const auto m = shipped_model(name);
    const auto rep = check_reduction_equivalence(m);
    EXPECT_EQ(rep.verdict, Verdict::kPass) << name;
    EXPECT_EQ(check_reduction(m).verdict, Verdict::kPass) << name;
  }
}
