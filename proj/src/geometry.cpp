#include "magnomech/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "magnomech/errors.hpp"

namespace magnomech {

PhasePoint::PhasePoint(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size()) {
    throw DimensionMismatch("phase point with dim q = " + std::to_string(q.size()) +
                            " and dim p = " + std::to_string(p.size()));
  }
}

Vec PhasePoint::stacked() const {
  Vec z(2 * q.size());
  z << q, p;
  return z;
}

PhasePoint PhasePoint::from_stacked(const Vec& z) {
  const Index n = z.size() / 2;
  return {z.head(n), z.tail(n)};
}

Vec TangentPhaseVector::stacked() const {
  Vec v(dq.size() + dp.size());
  v << dq, dp;
  return v;
}

TangentPhaseVector TangentPhaseVector::from_stacked(const Vec& v) {
  const Index n = v.size() / 2;
  return {v.head(n), v.tail(n)};
}

Vec central_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                double h) {
  Vec g(x.size());
  Vec xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat central_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                                double h) {
  Vec xp = x;
  Mat jac;
  for (Index j = 0; j < x.size(); ++j) {
    const double xj = x(j);
    xp(j) = xj + h;
    const Vec fp = f(xp);
    xp(j) = xj - h;
    const Vec fm = f(xp);
    xp(j) = xj;
    if (j == 0) jac.resize(fp.size(), x.size());
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Value value, Gradient gradient, double fd_step)
    : value_(std::move(value)), gradient_(std::move(gradient)), fd_step_(fd_step) {}

ScalarField ScalarField::constant(double c) {
  return {[c](const Vec&) { return c; }, [](const Vec& x) { return Vec::Zero(x.size()).eval(); }};
}

double ScalarField::operator()(const Vec& x) const { return value_ ? value_(x) : 0.0; }

Vec ScalarField::gradient(const Vec& x) const {
  if (gradient_) return gradient_(x);
  if (!value_) return Vec::Zero(x.size());
  return central_difference_gradient(value_, x, fd_step_);
}

MatrixField::MatrixField(Index rows, Index cols, Value value, Partial partial, double fd_step)
    : rows_(rows),
      cols_(cols),
      value_(std::move(value)),
      partial_(std::move(partial)),
      fd_step_(fd_step) {}

MatrixField MatrixField::constant(const Mat& m) {
  return {m.rows(), m.cols(), [m](const Vec&) { return m; },
          [r = m.rows(), c = m.cols()](const Vec&, Index) { return Mat::Zero(r, c).eval(); }};
}

Mat MatrixField::operator()(const Vec& q) const {
  if (!value_) return Mat::Zero(rows_, cols_);
  return value_(q);
}

Mat MatrixField::partial(const Vec& q, Index j) const {
  if (partial_) return partial_(q, j);
  if (!value_) return Mat::Zero(rows_, cols_);
  Vec qp = q;
  qp(j) += fd_step_;
  Vec qm = q;
  qm(j) -= fd_step_;
  return (value_(qp) - value_(qm)) / (2.0 * fd_step_);
}

// ---------------------------------------------------------------------------

OneFormSection::OneFormSection(Index n, Eval eval, Jacobian jacobian, double fd_step)
    : n_(n), eval_(std::move(eval)), jacobian_(std::move(jacobian)), fd_step_(fd_step) {}

Vec OneFormSection::operator()(const ConfigPoint& q) const {
  Vec v = eval_(q.q);
  if (!v.allFinite()) throw NumericalDomainError("one-form evaluated to a non-finite covector");
  return v;
}

Mat OneFormSection::jacobian(const ConfigPoint& q) const {
  if (jacobian_) {
    Mat j = jacobian_(q.q);
    if (!j.allFinite()) throw NumericalDomainError("one-form Jacobian is not finite");
    return j;
  }
  return fd_jacobian(q, fd_step_);
}

Mat OneFormSection::fd_jacobian(const ConfigPoint& q, double h) const {
  Mat j = central_difference_jacobian(eval_, q.q, h);
  if (!j.allFinite()) throw NumericalDomainError("one-form Jacobian is not finite");
  return j;
}

OneFormSection OneFormSection::with_fd_jacobian(double h) const {
  return {n_, eval_, {}, h};
}

// ---------------------------------------------------------------------------

namespace {

Index upper_count(Index n) { return n * (n - 1) / 2; }

Mat assemble_antisymmetric(Index n, const Vec& upper) {
  Mat m = Mat::Zero(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j, ++k) {
      m(i, j) = upper(k);
      m(j, i) = -upper(k);
    }
  }
  return m;
}

Vec strictly_upper(const Mat& m) {
  const Index n = m.rows();
  Vec upper(upper_count(n));
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) upper(k++) = m(i, j);
  }
  return upper;
}

}  // namespace

TwoFormField::TwoFormField(Index n, UpperEntries upper) : n_(n), upper_(std::move(upper)) {}

TwoFormField TwoFormField::zero(Index n) {
  return {n, [n](const Vec&) { return Vec::Zero(upper_count(n)).eval(); }};
}

TwoFormField TwoFormField::constant(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("two-form matrix must be square");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i; j < m.cols(); ++j) {
      if (m(i, j) != -m(j, i)) {
        throw AntisymmetryViolation("entries (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") and (" + std::to_string(j + 1) +
                                    "," + std::to_string(i + 1) + ") are not negatives");
      }
    }
  }
  Vec upper = strictly_upper(m);
  return {m.rows(), [upper](const Vec&) { return upper; }};
}

TwoFormField TwoFormField::from_matrix(Index n, std::function<Mat(const Vec&)> m) {
  return {n, [m = std::move(m)](const Vec& q) { return strictly_upper(m(q)); }};
}

Mat TwoFormField::operator()(const ConfigPoint& q) const {
  if (!upper_) return Mat::Zero(n_, n_);
  Vec upper = upper_(q.q);
  if (!upper.allFinite()) throw NumericalDomainError("two-form entries are not finite");
  return assemble_antisymmetric(n_, upper);
}

double TwoFormField::pair(const ConfigPoint& q, const Vec& x, const Vec& y) const {
  return x.dot((*this)(q) * y);
}

// ---------------------------------------------------------------------------

ConstraintDistribution::ConstraintDistribution(Index n, Index k, MatrixField forms)
    : n_(n), k_(k), forms_(std::move(forms)) {
  if (k_ > 0 && (forms_.rows() != k_ || forms_.cols() != n_)) {
    throw DimensionMismatch("constraint matrix must be k x n");
  }
}

ConstraintDistribution ConstraintDistribution::unconstrained(Index n) {
  return {n, 0, MatrixField::constant(Mat(0, n))};
}

Mat ConstraintDistribution::forms(const ConfigPoint& q) const {
  if (k_ == 0) return Mat(0, n_);
  Mat a = forms_(q.q);
  if (!a.allFinite()) throw NumericalDomainError("constraint forms are not finite");
  return a;
}

Mat ConstraintDistribution::partial(const ConfigPoint& q, Index j) const {
  if (k_ == 0) return Mat(0, n_);
  return forms_.partial(q.q, j);
}

Mat ConstraintDistribution::basis(const ConfigPoint& q) const {
  if (k_ == 0) return Mat::Identity(n_, n_);
  const Mat a = forms(q);
  const Index rank = numerical_rank(a);
  if (rank < k_) {
    throw DegenerateConstraintError("constraint matrix has rank " + std::to_string(rank) +
                                    " < k = " + std::to_string(k_));
  }
  return null_space(a);
}

// ---------------------------------------------------------------------------

Mat exterior_derivative_one_form(const OneFormSection& gamma, const ConfigPoint& q) {
  const Mat j = gamma.jacobian(q);
  return j.transpose() - j;
}

double check_closed_two_form(const TwoFormField& b, const ConfigPoint& q, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const Index n = b.dim();
  std::vector<Mat> partials;
  partials.reserve(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    Vec qp = q.q;
    qp(k) += h;
    Vec qm = q.q;
    qm(k) -= h;
    partials.push_back((b(ConfigPoint(qp)) - b(ConfigPoint(qm))) / (2.0 * h));
  }
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      for (Index k = j + 1; k < n; ++k) {
        const auto ui = static_cast<std::size_t>(i);
        const auto uj = static_cast<std::size_t>(j);
        const auto uk = static_cast<std::size_t>(k);
        const double cyclic = partials[ui](j, k) + partials[uj](k, i) + partials[uk](i, j);
        worst = std::max(worst, std::abs(cyclic));
      }
    }
  }
  return worst;
}

double gamma_condition_on_subspace(const OneFormSection& gamma, const TwoFormField& b,
                                   const Mat& subspace, const ConfigPoint& q) {
  const Mat combined = exterior_derivative_one_form(gamma, q) + b(q);
  const Mat restricted = subspace.transpose() * combined * subspace;
  return max_abs(restricted);
}

double check_gamma_condition_on_D(const OneFormSection& gamma, const TwoFormField& b,
                                  const ConstraintDistribution& d, const ConfigPoint& q) {
  return gamma_condition_on_subspace(gamma, b, d.basis(q), q);
}

}  // namespace magnomech
