#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "magnomech/errors.hpp"
#include "magnomech/report.hpp"
#include "magnomech/scenario.hpp"
#include "magnomech/suite.hpp"

using namespace mmtest;

namespace {

const char* kMinimal = R"({"name": "t", "n": 2, "b_field": [["0", "q1"], ["-q1", "0"]]})";

template <typename E>
E expect_error(const std::string& text) {
  try {
    build_model(parse_scenario(text));
  } catch (const E& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  throw std::runtime_error("expected error was not raised");
}

std::vector<std::string> shipped() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(MAGNOMECH_SCENARIO_DIR)) {
    out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ScenarioIo, ChargedParticleLoads) {
  const ScenarioSpec s = load_scenario_file(scenario_path("charged-particle"));
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.constraint_count(), 0);
  const ScenarioModel m = build_model(s);
  EXPECT_EQ(m.system.w.b_field()(ConfigPoint(vec({0, 0}))), planar_b(1.0));
  EXPECT_TRUE(m.gamma.has_value());
}

TEST(ScenarioIo, NonAntisymmetricFieldNamesEntries) {
  const auto e = expect_error<AntisymmetryViolation>(
      R"({"name": "t", "n": 2, "b_field": [["0", "1"], ["1", "0"]]})");
  EXPECT_NE(std::string(e.what()).find("(1,2) and (2,1)"), std::string::npos);
  EXPECT_EQ(e.path(), "/b_field/0/1");
  expect_error<AntisymmetryViolation>(R"({"name": "t", "n": 2, "b_field": [["0", "q1"], ["q1", "0"]]})");
  expect_error<AntisymmetryViolation>(R"({"name": "t", "n": 2, "b_field": [["1", "0"], ["0", "0"]]})");
}

TEST(ScenarioIo, ConstraintArityMismatchHasPath) {
  const auto e = expect_error<DimensionMismatch>(
      R"({"name": "t", "n": 3, "constraints": [["0", "-q1"]]})");
  EXPECT_EQ(e.path(), "/constraints/0");
}

TEST(ScenarioIo, StructuralErrorsCarryPaths) {
  EXPECT_EQ(expect_error<SchemaError>(R"({"name": "t", "n": 2, "colour": 1})").path(), "/colour");
  EXPECT_EQ(expect_error<SchemaError>(R"({"name": "t", "n": 0})").path(), "/n");
  EXPECT_EQ(expect_error<SchemaError>(R"({"n": 2})").path(), "/name");
  EXPECT_EQ(expect_error<DimensionMismatch>(R"({"name": "t", "n": 2, "gamma": ["q1"]})").path(), "/gamma");
  EXPECT_EQ(expect_error<DimensionMismatch>(R"({"name": "t", "n": 2, "epsilon": ["q1", "q2"]})").path(), "/epsilon");
  EXPECT_EQ(expect_error<SchemaError>(R"({"name": "t", "n": 2, "symmetry": [3]})").path(), "/symmetry/0");
  EXPECT_EQ(expect_error<SchemaError>(R"({"name": "t", "n": 1, "sample_box": [[1, 0]]})").path(), "/sample_box/0");
  EXPECT_EQ(expect_error<SchemaError>(R"({"name": "t", "n": 1, "tolerances": {"foo": 1}})").path(), "/tolerances/foo");
}

TEST(ScenarioIo, ExpressionErrorsCarryPaths) {
  const auto p = expect_error<ParseError>(R"({"name": "t", "n": 2, "gamma": ["q1", "q1 +"]})");
  EXPECT_EQ(p.path(), "/gamma/1");
  EXPECT_EQ(p.position(), 4u);
  EXPECT_EQ(expect_error<UnknownIdentifier>(R"({"name": "t", "n": 2, "potential": "q3"})").path(), "/potential");
  EXPECT_EQ(expect_error<UnknownIdentifier>(R"({"name": "t", "n": 2, "potential": "p1"})").path(), "/potential");
}

TEST(ScenarioIo, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_scenario("{\"name\": "), ParseError);
  EXPECT_THROW(load_scenario_file("/nonexistent/file.json"), IoError);
}

TEST(ScenarioIo, RoundTripIsIdentityOnShippedCorpus) {
  const auto files = shipped();
  ASSERT_GE(files.size(), 7u);
  for (const auto& f : files) {
    const ScenarioSpec s = load_scenario_file(f);
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s) << f;
    EXPECT_EQ(serialize_scenario(parse_scenario(serialize_scenario(s))), serialize_scenario(s));
  }
}

TEST(ScenarioIo, NumbersBecomeExpressions) {
  const auto s = parse_scenario(R"({"name": "t", "n": 2, "b_field": [[0, 0.25], [-0.25, 0]]})");
  EXPECT_EQ(s.b_field[0][1], "0.25");
  EXPECT_EQ(build_model(s).system.w.b_field()(ConfigPoint(vec({0, 0})))(1, 0), -0.25);
}

TEST(ScenarioIo, VariableFieldAssemblesAntisymmetric) {
  const ScenarioModel m = build_model(parse_scenario(kMinimal));
  EXPECT_EQ(m.system.w.b_field()(ConfigPoint(vec({2, 0}))), planar_b(2.0));
}

TEST(ScenarioIo, BrokenSymmetryWarnsAndReductionIsVacuous) {
  const auto m = build_model(parse_scenario(
      R"({"name": "t", "n": 2, "potential": "q1^2", "symmetry": [1], "gamma": ["0", "0"]})"));
  EXPECT_FALSE(m.invariance_ok);
  ASSERT_FALSE(m.warnings.empty());
  EXPECT_EQ(check_reduction(m).verdict, Verdict::kVacuous);
  EXPECT_EQ(check_hj1(m, true).verdict, Verdict::kVacuous);
}

TEST(ScenarioIo, InitialStateMustLieOnM) {
  const auto e = expect_error<NotOnManifoldError>(
      R"({"name": "t", "n": 3, "constraints": [["0", "-q1", "1"]], "initial": {"q": [0, 0, 0], "p": [0, 0, 1]}})");
  EXPECT_EQ(e.path(), "/initial");
}

TEST(ScenarioIo, GeneralHamiltonianNeedsManifold) {
  expect_error<SchemaError>(R"({"name": "t", "n": 2, "hamiltonian": "p1^2", "constraints": [["1", "0"]]})");
  const auto m = build_model(parse_scenario(
      R"({"name": "t", "n": 2, "hamiltonian": "0.5*(p1^2 + p2^2) + q1", "constraints": [["1", "0"]], "constraint_manifold": ["p1"]})"));
  EXPECT_FALSE(m.system.m.is_legendre());
  EXPECT_NEAR(m.system.h(phase({2, 0}, {1, 1})), 3.0, 1e-15);
}

TEST(ScenarioIo, ToleranceOverridesApply) {
  const auto m = build_model(parse_scenario(R"({"name": "t", "n": 1, "tolerances": {"equation": 1e-5}})"));
  EXPECT_EQ(m.tol.equation, 1e-5);
  EXPECT_EQ(m.tol.hypothesis, Tolerances{}.hypothesis);
}

TEST(ConstructB, ConstantFieldFromLinearSection) {
  auto s = parse_scenario(R"({"name": "t", "n": 2, "gamma": ["0", "q1"]})");
  const ScenarioSpec c = construct_b(s);
  EXPECT_EQ(c.name, "t-constructed");
  const ScenarioModel m = build_model(c);
  const Mat b = m.system.w.b_field()(ConfigPoint(vec({0.3, 0.9})));
  const Mat dg = exterior_derivative_one_form(*m.gamma, ConfigPoint(vec({0.3, 0.9})));
  EXPECT_EQ(b, planar_b(-1.0));
  EXPECT_EQ(b, Mat(-dg));
}

TEST(ConstructB, TypeOneOutcomeFollowsEnergyAlongSection) {
  // The constructed field always satisfies the hypothesis; the equation then
  // fails by exactly the gradient of H o gamma, which is q1 here.
  const ScenarioModel m = build_model(construct_b(parse_scenario(R"({"name": "t", "n": 2, "gamma": ["0", "q1"]})")));
  const CheckReport r = check_hj1(m, false);
  EXPECT_LT(r.hypothesis_residual(), 1e-12);
  EXPECT_EQ(r.verdict, Verdict::kFail);
  EXPECT_NEAR(r.equation_residual(), r.diagnostics.at("level_set_residual"), 1e-12);
  const ScenarioModel level = build_model(construct_b(
      parse_scenario(R"({"name": "t", "n": 2, "potential": "-0.5*q1^2", "gamma": ["0", "q1"]})")));
  EXPECT_EQ(check_hj1(level, false).verdict, Verdict::kPass);
}

TEST(ConstructB, ClosedSectionGivesZeroField) {
  const ScenarioSpec c = construct_b(parse_scenario(R"({"name": "t", "n": 2, "gamma": ["q2", "q1"]})"));
  EXPECT_EQ(build_model(c).system.w.b_field()(ConfigPoint(vec({1, 2}))).norm(), 0.0);
}

TEST(ConstructB, RequiresGamma) {
  EXPECT_THROW(construct_b(parse_scenario(R"({"name": "t", "n": 2})")), SchemaError);
}

TEST(Report, JsonRoundTripIsLossless) {
  CheckReport r;
  r.scenario = "s";
  r.check = "hj2";
  r.verdict = Verdict::kVacuous;
  r.failed_hypothesis = "why";
  r.hypothesis_residuals = {{"a", 1e-300}, {"b", 0.1 + 0.2}};
  r.equation_residuals = {{"e", 3.0}};
  r.diagnostics = {{"d", -1.0}};
  r.notes = {"n1"};
  r.columns = {"x", "y"};
  r.rows = {{1.0 / 3.0, 2.0}, {5.0, 6.0}};
  r.wall_time_s = 0.125;
  EXPECT_EQ(report_from_json(report_to_json(r)), r);
  EXPECT_EQ(report_from_json(nlohmann::json::parse(report_to_json(r).dump())), r);
}

TEST(Report, NonFiniteValuesBecomeNull) {
  CheckReport r;
  r.equation_residuals["x"] = std::nan("");
  const auto j = report_to_json(r);
  EXPECT_TRUE(j["equation_residuals"]["x"].is_null());
  EXPECT_TRUE(std::isnan(report_from_json(j).equation_residuals.at("x")));
}

TEST(Report, VerdictCombination) {
  EXPECT_EQ(combine({Verdict::kPass, Verdict::kVacuous}), Verdict::kPass);
  EXPECT_EQ(combine({Verdict::kVacuous}), Verdict::kVacuous);
  EXPECT_EQ(combine({Verdict::kPass, Verdict::kFail, Verdict::kVacuous}), Verdict::kFail);
  EXPECT_EQ(parse_verdict("VACUOUS"), Verdict::kVacuous);
  EXPECT_THROW(parse_verdict("MAYBE"), SchemaError);
}

TEST(ScenarioIo, PublishedSchemaListsEveryAcceptedKey) {
  std::ifstream f(MAGNOMECH_SCHEMA_PATH);
  ASSERT_TRUE(f.good());
  const auto schema = nlohmann::json::parse(f);
  const auto spec = scenario_to_json(load_scenario_file(scenario_path("nh-magnetic-reduced")));
  for (const auto& [key, value] : spec.items()) EXPECT_TRUE(schema["properties"].contains(key)) << key;
  for (const auto& [key, value] : schema["properties"].items()) {
    if (key == "name" || key == "n") continue;
    // every schema key is accepted by the loader
    nlohmann::json j = {{"name", "t"}, {"n", 1}};
    j[key] = value.contains("type") && value["type"] == "string" ? nlohmann::json("x") : nlohmann::json(nullptr);
    try {
      parse_scenario(j.dump());
    } catch (const SchemaError& e) {
      EXPECT_EQ(std::string(e.what()).find("unknown field"), std::string::npos) << key;
    } catch (const Error&) {
    }
  }
}
