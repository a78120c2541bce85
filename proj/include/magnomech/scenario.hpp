#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "magnomech/expression.hpp"
#include "magnomech/magnetic.hpp"
#include "magnomech/nonholonomic.hpp"
#include "magnomech/reduction.hpp"
#include "magnomech/sampling.hpp"
#include "magnomech/tolerances.hpp"

namespace magnomech {

using StringMatrix = std::vector<std::vector<std::string>>;

// Declarative scenario as read from JSON. Every expression is kept as text;
// numeric literals in the file become their decimal text.
struct ScenarioSpec {
  std::string name;
  std::string description;
  int n = 0;
  StringMatrix mass_matrix;        // empty: identity
  std::string potential = "0";
  std::string hamiltonian;         // optional general H(q, p)
  StringMatrix b_field;            // empty: zero
  StringMatrix constraints;        // k rows of n entries
  std::vector<std::string> constraint_manifold;  // optional k entries in (q, p)
  std::vector<std::string> gamma;
  std::vector<std::string> epsilon;  // 2n entries
  std::vector<int> symmetry;         // 1-based cyclic indices
  std::vector<std::array<double, 2>> sample_box;    // n rows; empty: [-1, 1]
  std::vector<std::array<double, 2>> momentum_box;  // n rows; empty: [-1, 1]
  int samples = 50;
  std::map<std::string, double> tolerances;
  std::optional<std::vector<double>> initial_q;
  std::optional<std::vector<double>> initial_p;

  int constraint_count() const { return static_cast<int>(constraints.size()); }
  bool operator==(const ScenarioSpec&) const = default;
};

// Validates structure and dimensions; errors carry JSON-pointer field paths.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);
std::string serialize_scenario(const ScenarioSpec& spec);
ScenarioSpec load_scenario_file(const std::string& path);

// Everything a check needs, assembled from a spec.
struct ScenarioModel {
  ScenarioSpec spec;
  NonholonomicSystem system;
  std::optional<OneFormSection> gamma;
  std::optional<PhaseMap> epsilon;
  TranslationSymmetry symmetry;
  bool invariance_ok = true;
  Box q_box;
  Box p_box;
  Tolerances tol;
  std::optional<PhasePoint> initial;
  std::vector<std::string> warnings;

  Index dim() const { return system.dim(); }
  Index constraint_count() const { return system.constraint_count(); }
};

// Parses expressions, checks antisymmetry of B, and verifies declared symmetries
// (a failure there is a warning and clears invariance_ok).
ScenarioModel build_model(const ScenarioSpec& spec, const Tolerances& base = default_tolerances());

// Spec with B replaced by -d(gamma), written entry-wise from symbolic derivatives.
ScenarioSpec construct_b(const ScenarioSpec& spec);

// Same spec with the magnetic field removed.
ScenarioSpec without_magnetic_field(const ScenarioSpec& spec);

// Field builders used by build_model; exposed for tests.
ScalarField scalar_field_from(const Expression& e, Index vars);
MatrixField matrix_field_from(const std::vector<std::vector<Expression>>& entries, Index n);

}  // namespace magnomech
