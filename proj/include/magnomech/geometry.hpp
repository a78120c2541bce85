#pragma once

#include <functional>
#include <utility>

#include "magnomech/linalg.hpp"

namespace magnomech {

inline constexpr double kDefaultFdStep = 1e-5;

// A point q of Q = R^n in the global chart.
struct ConfigPoint {
  Vec q;

  ConfigPoint() = default;
  explicit ConfigPoint(Vec coords) : q(std::move(coords)) {}
  Index dim() const { return q.size(); }
};

// A point (q, p) of T*Q in canonical coordinates.
struct PhasePoint {
  Vec q;
  Vec p;

  PhasePoint() = default;
  PhasePoint(Vec q_, Vec p_);

  Index dim() const { return q.size(); }
  ConfigPoint base() const { return ConfigPoint(q); }
  Vec stacked() const;
  static PhasePoint from_stacked(const Vec& z);
};

// A vector (dq, dp) tangent to T*Q.
struct TangentPhaseVector {
  Vec dq;
  Vec dp;

  TangentPhaseVector() = default;
  TangentPhaseVector(Vec dq_, Vec dp_) : dq(std::move(dq_)), dp(std::move(dp_)) {}

  Index dim() const { return dq.size(); }
  Vec stacked() const;
  static TangentPhaseVector from_stacked(const Vec& v);
};

Vec central_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                double h);
Mat central_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                                double h);

// Real function on R^d with an optional analytic gradient; central
// differences stand in when no gradient is supplied.
class ScalarField {
 public:
  using Value = std::function<double(const Vec&)>;
  using Gradient = std::function<Vec(const Vec&)>;

  ScalarField() = default;
  ScalarField(Value value, Gradient gradient = {}, double fd_step = kDefaultFdStep);

  static ScalarField constant(double c);

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

 private:
  Value value_;
  Gradient gradient_;
  double fd_step_ = kDefaultFdStep;
};

// Matrix-valued function of q with optional analytic partial derivatives.
class MatrixField {
 public:
  using Value = std::function<Mat(const Vec&)>;
  using Partial = std::function<Mat(const Vec&, Index)>;

  MatrixField() = default;
  MatrixField(Index rows, Index cols, Value value, Partial partial = {},
              double fd_step = kDefaultFdStep);

  static MatrixField constant(const Mat& m);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Mat operator()(const Vec& q) const;
  // d/dq^j of the matrix at q.
  Mat partial(const Vec& q, Index j) const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  Value value_;
  Partial partial_;
  double fd_step_ = kDefaultFdStep;
};

// A one-form gamma: Q -> T*Q, stored through its covector components and
// Jacobian J_ij = d gamma_i / d q^j.
class OneFormSection {
 public:
  using Eval = std::function<Vec(const Vec&)>;
  using Jacobian = std::function<Mat(const Vec&)>;

  OneFormSection() = default;
  OneFormSection(Index n, Eval eval, Jacobian jacobian = {}, double fd_step = kDefaultFdStep);

  Index dim() const { return n_; }
  Vec operator()(const ConfigPoint& q) const;
  Mat jacobian(const ConfigPoint& q) const;
  Mat fd_jacobian(const ConfigPoint& q, double h) const;
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }
  // gamma(q) as a phase point.
  PhasePoint lift(const ConfigPoint& q) const { return {q.q, (*this)(q)}; }
  // Same section with its Jacobian forced through central differences of step h.
  OneFormSection with_fd_jacobian(double h) const;

 private:
  Index n_ = 0;
  Eval eval_;
  Jacobian jacobian_;
  double fd_step_ = kDefaultFdStep;
};

// A two-form on Q held as its evaluation matrix: value(x, y) = x^T B(q) y.
// Only strictly-upper entries are stored, so antisymmetry is exact.
class TwoFormField {
 public:
  // Returns the n(n-1)/2 strictly-upper entries in row-major order.
  using UpperEntries = std::function<Vec(const Vec&)>;

  TwoFormField() = default;
  TwoFormField(Index n, UpperEntries upper);

  static TwoFormField zero(Index n);
  // Throws AntisymmetryViolation when m is not exactly antisymmetric.
  static TwoFormField constant(const Mat& m);
  // Takes the strictly-upper triangle of whatever the callback returns.
  static TwoFormField from_matrix(Index n, std::function<Mat(const Vec&)> m);

  Index dim() const { return n_; }
  Mat operator()(const ConfigPoint& q) const;
  double pair(const ConfigPoint& q, const Vec& x, const Vec& y) const;

 private:
  Index n_ = 0;
  UpperEntries upper_;
};

// Smooth distribution D = ker A(q) defined by k constraint one-forms (rows of A).
class ConstraintDistribution {
 public:
  ConstraintDistribution() = default;
  ConstraintDistribution(Index n, Index k, MatrixField forms);

  static ConstraintDistribution unconstrained(Index n);

  Index dim() const { return n_; }
  Index count() const { return k_; }
  Mat forms(const ConfigPoint& q) const;
  Mat partial(const ConfigPoint& q, Index j) const;
  // Orthonormal basis of D_q; DegenerateConstraintError if rank A(q) < k.
  Mat basis(const ConfigPoint& q) const;

 private:
  Index n_ = 0;
  Index k_ = 0;
  MatrixField forms_;
};

// Evaluation matrix of d(gamma) at q: d(gamma)(x, y) = x^T (J^T - J) y.
Mat exterior_derivative_one_form(const OneFormSection& gamma, const ConfigPoint& q);

// Max |d_i B_jk + d_j B_ki + d_k B_ij| over index triples, central differences of step h.
double check_closed_two_form(const TwoFormField& b, const ConfigPoint& q, double h);

// Max |(d gamma + B)(x, y)| over pairs from an orthonormal basis of D_q.
double check_gamma_condition_on_D(const OneFormSection& gamma, const TwoFormField& b,
                                  const ConstraintDistribution& d, const ConfigPoint& q);

// Same quantity for an explicit subspace basis (columns) of T_qQ.
double gamma_condition_on_subspace(const OneFormSection& gamma, const TwoFormField& b,
                                   const Mat& subspace, const ConfigPoint& q);

}  // namespace magnomech
