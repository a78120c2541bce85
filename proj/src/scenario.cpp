#include "magnomech/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "magnomech/errors.hpp"

namespace magnomech {

using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys = {
    "name",     "description", "n",       "mass_matrix", "potential",  "hamiltonian",
    "b_field",  "constraints", "constraint_manifold",    "gamma",      "epsilon",
    "symmetry", "sample_box",  "momentum_box",           "samples",    "tolerances",
    "initial"};

std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

std::string number_text(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

std::string read_expression(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.empty()) throw SchemaError("expression must not be empty", path);
    return s;
  }
  if (j.is_number()) return number_text(j.get<double>());
  throw SchemaError("expected an expression string or a number", path);
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError("expected an integer", path);
  return j.get<int>();
}

double read_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError("expected a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError("expected a finite number", path);
  return v;
}

const json& read_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError("expected an array", path);
  return j;
}

std::vector<std::string> read_expression_list(const json& j, std::size_t expected,
                                              const std::string& path) {
  read_array(j, path);
  if (j.size() != expected) {
    throw DimensionMismatch("expected " + std::to_string(expected) + " entries, found " +
                                std::to_string(j.size()),
                            path);
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_expression(j[i], child(path, i)));
  return out;
}

StringMatrix read_expression_matrix(const json& j, std::size_t rows, std::size_t cols,
                                    const std::string& path) {
  read_array(j, path);
  if (j.size() != rows) {
    throw DimensionMismatch("expected " + std::to_string(rows) + " rows, found " +
                                std::to_string(j.size()),
                            path);
  }
  StringMatrix out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_expression_list(j[i], cols, child(path, i)));
  return out;
}

std::vector<std::array<double, 2>> read_box(const json& j, std::size_t n, const std::string& path) {
  read_array(j, path);
  if (j.size() != n) {
    throw DimensionMismatch("expected " + std::to_string(n) + " intervals, found " +
                                std::to_string(j.size()),
                            path);
  }
  std::vector<std::array<double, 2>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = child(path, i);
    read_array(j[i], p);
    if (j[i].size() != 2) throw DimensionMismatch("interval must have two bounds", p);
    const double lo = read_double(j[i][0], child(p, 0));
    const double hi = read_double(j[i][1], child(p, 1));
    if (!(lo < hi)) throw SchemaError("interval lower bound must be below the upper bound", p);
    out.push_back({lo, hi});
  }
  return out;
}

std::vector<double> read_numbers(const json& j, std::size_t n, const std::string& path) {
  read_array(j, path);
  if (j.size() != n) {
    throw DimensionMismatch("expected " + std::to_string(n) + " numbers, found " +
                                std::to_string(j.size()),
                            path);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(read_double(j[i], child(path, i)));
  return out;
}

const std::set<std::string>& tolerance_keys() {
  static const std::set<std::string> keys = {"hypothesis", "equation",  "band_factor",
                                             "membership", "symplectic", "invariance",
                                             "sigma_min",  "fd_step",   "agreement",
                                             "on_manifold"};
  return keys;
}

void set_tolerance(Tolerances& t, const std::string& key, double v) {
  if (key == "hypothesis") t.hypothesis = v;
  else if (key == "equation") t.equation = v;
  else if (key == "band_factor") t.band_factor = v;
  else if (key == "membership") t.membership = v;
  else if (key == "symplectic") t.symplectic = v;
  else if (key == "invariance") t.invariance = v;
  else if (key == "sigma_min") t.sigma_min = v;
  else if (key == "fd_step") t.fd_step = v;
  else if (key == "agreement") t.agreement = v;
  else if (key == "on_manifold") t.on_manifold = v;
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("scenario must be a JSON object", "");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kTopLevelKeys.count(it.key())) throw SchemaError("unknown field '" + it.key() + "'", "/" + it.key());
  }
  ScenarioSpec s;
  if (!j.contains("name") || !j["name"].is_string() || j["name"].get<std::string>().empty()) {
    throw SchemaError("missing or empty scenario name", "/name");
  }
  s.name = j["name"].get<std::string>();
  if (j.contains("description")) {
    if (!j["description"].is_string()) throw SchemaError("expected a string", "/description");
    s.description = j["description"].get<std::string>();
  }
  if (!j.contains("n")) throw SchemaError("missing dimension", "/n");
  s.n = read_int(j["n"], "/n");
  if (s.n < 1) throw SchemaError("dimension must be at least 1", "/n");
  const auto n = static_cast<std::size_t>(s.n);

  if (j.contains("mass_matrix")) s.mass_matrix = read_expression_matrix(j["mass_matrix"], n, n, "/mass_matrix");
  if (j.contains("potential")) s.potential = read_expression(j["potential"], "/potential");
  if (j.contains("hamiltonian")) s.hamiltonian = read_expression(j["hamiltonian"], "/hamiltonian");
  if (j.contains("b_field")) s.b_field = read_expression_matrix(j["b_field"], n, n, "/b_field");
  if (j.contains("constraints")) {
    const json& c = read_array(j["constraints"], "/constraints");
    for (std::size_t r = 0; r < c.size(); ++r) {
      s.constraints.push_back(read_expression_list(c[r], n, child("/constraints", r)));
    }
    if (s.constraints.size() >= n) {
      throw DimensionMismatch("need fewer constraints than coordinates", "/constraints");
    }
  }
  const std::size_t k = s.constraints.size();
  if (j.contains("constraint_manifold")) {
    s.constraint_manifold = read_expression_list(j["constraint_manifold"], k, "/constraint_manifold");
  }
  if (!s.hamiltonian.empty() && k > 0 && s.constraint_manifold.empty()) {
    throw SchemaError("a general hamiltonian with constraints needs constraint_manifold",
                      "/constraint_manifold");
  }
  if (j.contains("gamma")) s.gamma = read_expression_list(j["gamma"], n, "/gamma");
  if (j.contains("epsilon")) s.epsilon = read_expression_list(j["epsilon"], 2 * n, "/epsilon");
  if (j.contains("symmetry")) {
    const json& sym = read_array(j["symmetry"], "/symmetry");
    for (std::size_t i = 0; i < sym.size(); ++i) {
      const int idx = read_int(sym[i], child("/symmetry", i));
      if (idx < 1 || idx > s.n) throw SchemaError("cyclic index out of range", child("/symmetry", i));
      if (std::find(s.symmetry.begin(), s.symmetry.end(), idx) != s.symmetry.end()) {
        throw SchemaError("duplicate cyclic index", child("/symmetry", i));
      }
      s.symmetry.push_back(idx);
    }
  }
  if (j.contains("sample_box")) s.sample_box = read_box(j["sample_box"], n, "/sample_box");
  if (j.contains("momentum_box")) s.momentum_box = read_box(j["momentum_box"], n, "/momentum_box");
  if (j.contains("samples")) {
    s.samples = read_int(j["samples"], "/samples");
    if (s.samples < 1) throw SchemaError("need at least one sample", "/samples");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw SchemaError("expected an object", "/tolerances");
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string p = "/tolerances/" + it.key();
      if (!tolerance_keys().count(it.key())) throw SchemaError("unknown tolerance", p);
      const double v = read_double(it.value(), p);
      if (!(v > 0.0)) throw SchemaError("tolerance must be positive", p);
      s.tolerances[it.key()] = v;
    }
  }
  if (j.contains("initial")) {
    const json& init = j["initial"];
    if (!init.is_object() || !init.contains("q") || !init.contains("p")) {
      throw SchemaError("initial needs q and p", "/initial");
    }
    s.initial_q = read_numbers(init["q"], n, "/initial/q");
    s.initial_p = read_numbers(init["p"], n, "/initial/p");
  }
  return s;
}

ScenarioSpec parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
  }
  return scenario_from_json(j);
}

json scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["n"] = s.n;
  if (!s.mass_matrix.empty()) j["mass_matrix"] = s.mass_matrix;
  j["potential"] = s.potential;
  if (!s.hamiltonian.empty()) j["hamiltonian"] = s.hamiltonian;
  if (!s.b_field.empty()) j["b_field"] = s.b_field;
  if (!s.constraints.empty()) j["constraints"] = s.constraints;
  if (!s.constraint_manifold.empty()) j["constraint_manifold"] = s.constraint_manifold;
  if (!s.gamma.empty()) j["gamma"] = s.gamma;
  if (!s.epsilon.empty()) j["epsilon"] = s.epsilon;
  if (!s.symmetry.empty()) j["symmetry"] = s.symmetry;
  if (!s.sample_box.empty()) j["sample_box"] = s.sample_box;
  if (!s.momentum_box.empty()) j["momentum_box"] = s.momentum_box;
  j["samples"] = s.samples;
  if (!s.tolerances.empty()) j["tolerances"] = s.tolerances;
  if (s.initial_q && s.initial_p) j["initial"] = {{"q", *s.initial_q}, {"p", *s.initial_p}};
  return j;
}

std::string serialize_scenario(const ScenarioSpec& spec) { return scenario_to_json(spec).dump(2) + "\n"; }

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------

ScalarField scalar_field_from(const Expression& e, Index vars) {
  if (e.is_constant()) return ScalarField::constant(e.eval(Vec(0)));
  std::vector<Expression> grad;
  for (Index i = 0; i < vars; ++i) grad.push_back(e.derivative(i));
  return {[e](const Vec& x) { return e.eval(x); },
          [grad](const Vec& x) {
            Vec g(static_cast<Index>(grad.size()));
            for (std::size_t i = 0; i < grad.size(); ++i) g(static_cast<Index>(i)) = grad[i].eval(x);
            return g;
          }};
}

MatrixField matrix_field_from(const std::vector<std::vector<Expression>>& entries, Index n) {
  const auto rows = static_cast<Index>(entries.size());
  const Index cols = rows == 0 ? n : static_cast<Index>(entries.front().size());
  // partials[j][r][c] = d entries[r][c] / d q^j
  std::vector<std::vector<std::vector<Expression>>> partials(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    auto& pj = partials[static_cast<std::size_t>(j)];
    for (const auto& row : entries) {
      std::vector<Expression> r;
      for (const auto& e : row) r.push_back(e.derivative(j));
      pj.push_back(std::move(r));
    }
  }
  auto fill = [rows, cols](const std::vector<std::vector<Expression>>& src, const Vec& q) {
    Mat m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) {
        m(r, c) = src[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].eval(q);
      }
    }
    return m;
  };
  return {rows, cols, [entries, fill](const Vec& q) { return fill(entries, q); },
          [partials, fill](const Vec& q, Index j) {
            return fill(partials[static_cast<std::size_t>(j)], q);
          }};
}

namespace {

Expression compile(const std::string& text, Index n, bool momenta, const std::string& path) {
  try {
    return Expression::parse(text, n, momenta);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), e.position(), path);
  } catch (const UnknownIdentifier& e) {
    throw UnknownIdentifier(e.what(), path);
  }
}

std::vector<std::vector<Expression>> compile_matrix(const StringMatrix& m, Index n,
                                                    const std::string& path) {
  std::vector<std::vector<Expression>> out;
  for (std::size_t r = 0; r < m.size(); ++r) {
    std::vector<Expression> row;
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      row.push_back(compile(m[r][c], n, false, child(child(path, r), c)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Box box_from(const std::vector<std::array<double, 2>>& rows, Index n) {
  if (rows.empty()) return Box::uniform(n, -1.0, 1.0);
  Box b;
  b.bounds.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    b.bounds(i, 0) = rows[static_cast<std::size_t>(i)][0];
    b.bounds(i, 1) = rows[static_cast<std::size_t>(i)][1];
  }
  return b;
}

void check_antisymmetric(const std::vector<std::vector<Expression>>& b, const Box& box) {
  const auto n = b.size();
  const auto probes = sobol_points(box, 8, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::string names = "entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                ") and (" + std::to_string(j + 1) + "," + std::to_string(i + 1) + ")";
      const std::string path = "/b_field/" + std::to_string(i) + "/" + std::to_string(j);
      for (const Vec& q : probes) {
        const double a = b[i][j].eval(q);
        const double c = b[j][i].eval(q);
        if (std::abs(a + c) > 1e-12 * (1.0 + std::abs(a))) {
          throw AntisymmetryViolation(names + " of b_field are not negatives of each other", path);
        }
      }
    }
  }
}

}  // namespace

ScenarioModel build_model(const ScenarioSpec& spec, const Tolerances& base) {
  ScenarioModel m;
  m.spec = spec;
  const Index n = spec.n;
  const Index k = spec.constraint_count();
  m.tol = base;
  for (const auto& [key, v] : spec.tolerances) set_tolerance(m.tol, key, v);
  m.q_box = box_from(spec.sample_box, n);
  m.p_box = box_from(spec.momentum_box, n);

  HamiltonianSpec h;
  if (!spec.hamiltonian.empty()) {
    h = HamiltonianSpec::general(n, scalar_field_from(compile(spec.hamiltonian, n, true, "/hamiltonian"), 2 * n));
  } else {
    MatrixField g = MatrixField::constant(Mat::Identity(n, n));
    if (!spec.mass_matrix.empty()) g = matrix_field_from(compile_matrix(spec.mass_matrix, n, "/mass_matrix"), n);
    h = HamiltonianSpec::quadratic(n, g, scalar_field_from(compile(spec.potential, n, false, "/potential"), n));
  }

  TwoFormField b = TwoFormField::zero(n);
  if (!spec.b_field.empty()) {
    const auto entries = compile_matrix(spec.b_field, n, "/b_field");
    check_antisymmetric(entries, m.q_box);
    std::vector<Expression> upper;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        upper.push_back(entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
    }
    b = TwoFormField(n, [upper](const Vec& q) {
      Vec v(static_cast<Index>(upper.size()));
      for (std::size_t i = 0; i < upper.size(); ++i) v(static_cast<Index>(i)) = upper[i].eval(q);
      return v;
    });
  }

  ConstraintDistribution d = ConstraintDistribution::unconstrained(n);
  if (k > 0) d = ConstraintDistribution(n, k, matrix_field_from(compile_matrix(spec.constraints, n, "/constraints"), n));

  if (!spec.constraint_manifold.empty()) {
    std::vector<Expression> cs;
    for (std::size_t i = 0; i < spec.constraint_manifold.size(); ++i) {
      cs.push_back(compile(spec.constraint_manifold[i], n, true, child("/constraint_manifold", i)));
    }
    std::vector<std::vector<Expression>> jac;
    for (const auto& c : cs) {
      std::vector<Expression> row;
      for (Index v = 0; v < 2 * n; ++v) row.push_back(c.derivative(v));
      jac.push_back(std::move(row));
    }
    auto residual = [cs](const Vec& z) {
      Vec r(static_cast<Index>(cs.size()));
      for (std::size_t i = 0; i < cs.size(); ++i) r(static_cast<Index>(i)) = cs[i].eval(z);
      return r;
    };
    auto jacobian = [jac, n](const Vec& z) {
      Mat out(static_cast<Index>(jac.size()), 2 * n);
      for (std::size_t i = 0; i < jac.size(); ++i) {
        for (Index v = 0; v < 2 * n; ++v) out(static_cast<Index>(i), v) = jac[i][static_cast<std::size_t>(v)].eval(z);
      }
      return out;
    };
    m.system = NonholonomicSystem(h, MagneticStructure(b), d,
                                  ConstraintManifold::explicit_residual(n, k, residual, jacobian));
  } else {
    m.system = NonholonomicSystem(h, MagneticStructure(b), d);
  }

  if (!spec.gamma.empty()) {
    std::vector<Expression> g;
    for (std::size_t i = 0; i < spec.gamma.size(); ++i) g.push_back(compile(spec.gamma[i], n, false, child("/gamma", i)));
    std::vector<std::vector<Expression>> grid;
    for (const auto& e : g) {
      std::vector<Expression> row;
      for (Index j = 0; j < n; ++j) row.push_back(e.derivative(j));
      grid.push_back(std::move(row));
    }
    const MatrixField jfield = matrix_field_from(grid, n);
    m.gamma = OneFormSection(
        n,
        [g](const Vec& q) {
          Vec v(static_cast<Index>(g.size()));
          for (std::size_t i = 0; i < g.size(); ++i) v(static_cast<Index>(i)) = g[i].eval(q);
          return v;
        },
        [jfield](const Vec& q) { return jfield(q); }, m.tol.fd_step);
  }

  if (!spec.epsilon.empty()) {
    std::vector<Expression> e;
    for (std::size_t i = 0; i < spec.epsilon.size(); ++i) e.push_back(compile(spec.epsilon[i], n, true, child("/epsilon", i)));
    std::vector<std::vector<Expression>> grid;
    for (const auto& x : e) {
      std::vector<Expression> row;
      for (Index j = 0; j < 2 * n; ++j) row.push_back(x.derivative(j));
      grid.push_back(std::move(row));
    }
    m.epsilon = PhaseMap(
        n,
        [e](const Vec& z) {
          Vec v(static_cast<Index>(e.size()));
          for (std::size_t i = 0; i < e.size(); ++i) v(static_cast<Index>(i)) = e[i].eval(z);
          return v;
        },
        [grid, n](const Vec& z) {
          Mat out(2 * n, 2 * n);
          for (Index r = 0; r < 2 * n; ++r) {
            for (Index c = 0; c < 2 * n; ++c) out(r, c) = grid[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].eval(z);
          }
          return out;
        },
        m.tol.fd_step);
  }

  m.symmetry.n = n;
  for (int idx : spec.symmetry) m.symmetry.cyclic.push_back(idx - 1);
  if (!m.symmetry.empty()) {
    const auto probes = phase_samples(m.system, m.q_box, m.p_box, 8, 0);
    const InvarianceReport inv = verify_invariance(m.symmetry, m.system, probes, m.tol);
    m.invariance_ok = inv.ok;
    if (!inv.ok) m.warnings.push_back("declared symmetry is broken: " + inv.detail);
  }

  if (spec.initial_q && spec.initial_p) {
    PhasePoint z0(Eigen::Map<const Vec>(spec.initial_q->data(), n),
                  Eigen::Map<const Vec>(spec.initial_p->data(), n));
    if (k > 0 && m.system.m.residual(z0).norm() > m.tol.on_manifold) {
      throw NotOnManifoldError("initial state is off the constraint manifold", "/initial");
    }
    m.initial = z0;
  }
  return m;
}

ScenarioSpec construct_b(const ScenarioSpec& spec) {
  if (spec.gamma.empty()) throw SchemaError("scenario has no gamma to build B from", "/gamma");
  const Index n = spec.n;
  std::vector<Expression> g;
  for (std::size_t i = 0; i < spec.gamma.size(); ++i) g.push_back(compile(spec.gamma[i], n, false, child("/gamma", i)));
  ScenarioSpec out = spec;
  out.name = spec.name + "-constructed";
  out.b_field.assign(static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n), "0"));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      // -(d gamma)_ij = d_j gamma_i - d_i gamma_j
      const Expression e = g[static_cast<std::size_t>(i)].derivative(j) - g[static_cast<std::size_t>(j)].derivative(i);
      out.b_field[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e.to_string();
      out.b_field[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = (-e).to_string();
    }
  }
  return out;
}

ScenarioSpec without_magnetic_field(const ScenarioSpec& spec) {
  ScenarioSpec out = spec;
  out.name = spec.name + "-b0";
  out.b_field.clear();
  return out;
}

}  // namespace magnomech
