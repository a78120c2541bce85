#pragma once

#include <cmath>
#include <random>
#include <string>

#include "magnomech/nonholonomic.hpp"

namespace mmtest {

using namespace magnomech;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline PhasePoint phase(std::initializer_list<double> q, std::initializer_list<double> p) {
  return {vec(q), vec(p)};
}

inline Mat planar_b(double b12) {
  Mat b(2, 2);
  b << 0.0, b12, -b12, 0.0;
  return b;
}

inline HamiltonianSpec free_hamiltonian(Index n) {
  return HamiltonianSpec::quadratic(n, MatrixField::constant(Mat::Identity(n, n)),
                                    ScalarField::constant(0.0));
}

inline HamiltonianSpec linear_potential_hamiltonian(Index n, const Vec& slope) {
  return HamiltonianSpec::quadratic(
      n, MatrixField::constant(Mat::Identity(n, n)),
      ScalarField([slope](const Vec& q) { return slope.dot(q); }, [slope](const Vec&) { return slope; }));
}

// dq3 - q1 dq2 = 0 on R^3.
inline ConstraintDistribution twisted_constraint() {
  return ConstraintDistribution(
      3, 1,
      MatrixField(
          1, 3, [](const Vec& q) { Mat a(1, 3); a << 0.0, -q(0), 1.0; return a; },
          [](const Vec&, Index j) {
            Mat d = Mat::Zero(1, 3);
            if (j == 0) d(0, 1) = -1.0;
            return d;
          }));
}

inline Mat b3_12(double b12) {
  Mat b = Mat::Zero(3, 3);
  b(0, 1) = b12;
  b(1, 0) = -b12;
  return b;
}

inline NonholonomicSystem twisted_particle(double b12 = 0.0) {
  return {free_hamiltonian(3), MagneticStructure(TwoFormField::constant(b3_12(b12))), twisted_constraint()};
}

// gamma_i(q) = a_i + sum_j b_ij q_j + sum_{j<=k} c_ijk q_j q_k with analytic Jacobian.
struct QuadraticSection {
  Vec a;
  Mat b;
  std::vector<Mat> c;  // c[i] symmetric n x n; gamma_i += q^T c[i] q

  OneFormSection section() const {
    const Index n = a.size();
    auto self = *this;
    return OneFormSection(
        n,
        [self](const Vec& q) {
          Vec out = self.a + self.b * q;
          for (Index i = 0; i < out.size(); ++i) out(i) += q.dot(self.c[static_cast<std::size_t>(i)] * q);
          return out;
        },
        [self](const Vec& q) {
          Mat j = self.b;
          for (Index i = 0; i < j.rows(); ++i) j.row(i) += 2.0 * (self.c[static_cast<std::size_t>(i)] * q).transpose();
          return j;
        });
  }

  // Constant part of the Jacobian antisymmetrized, J - J^T at q.
  Mat b_matching(const Vec& q) const {
    const Mat j = section().jacobian(ConfigPoint(q));
    return j - j.transpose();
  }
};

inline QuadraticSection random_quadratic_section(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  QuadraticSection s;
  s.a = Vec::NullaryExpr(n, [&] { return u(rng); });
  s.b = Mat::NullaryExpr(n, n, [&] { return u(rng); });
  for (Index i = 0; i < n; ++i) {
    Mat c = Mat::NullaryExpr(n, n, [&] { return u(rng); });
    s.c.push_back(0.5 * (c + c.transpose()));
  }
  return s;
}

inline Vec random_vec(Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec::NullaryExpr(n, [&] { return u(rng); });
}

inline std::string scenario_path(const std::string& name) {
  return std::string(MAGNOMECH_SCENARIO_DIR) + "/" + name + ".json";
}

}  // namespace mmtest
