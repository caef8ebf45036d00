#pragma once

#include "noma/core.hpp"

namespace noma {

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec<Scalar> x;
  Scalar objective = Scalar(0);
  /// Optimal value of the phase-1 problem (sum of artificials); zero iff feasible.
  Scalar phase1_residual = Scalar(0);
};

namespace detail {

template <typename Scalar>
bool positive(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return v > 0;
  } else {
    return v > 1e-9;
  }
}

template <typename Scalar>
bool nonzero(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return v != 0;
  } else {
    return std::abs(v) > 1e-9;
  }
}

// Dense tableau. The last column holds the right-hand side, the last row the objective
// (reduced costs, negated objective value in the corner).
template <typename Scalar>
class Tableau {
 public:
  Tableau(Mat<Scalar> t, std::vector<Eigen::Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  Mat<Scalar>& table() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Scalar p = t_(r, c);
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r || !nonzero(t_(i, c))) continue;
      const Scalar f = t_(i, c);
      t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Maximizes over columns [0, active_cols) using Bland's rule. Returns false if unbounded.
  bool optimize(Eigen::Index active_cols) {
    const Eigen::Index obj = rows();
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < active_cols; ++c) {
        if (positive(t_(obj, c))) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      Scalar best_ratio = Scalar(0);
      for (Eigen::Index r = 0; r < obj; ++r) {
        if (!positive(t_(r, enter))) continue;
        Scalar ratio = t_(r, rhs_col()) / t_(r, enter);
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

 private:
  Mat<Scalar> t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace detail

/// Two-phase simplex with Bland's rule: maximize c.x subject to A x = b, x >= 0.
/// Exact for Rational; double uses a 1e-9 pivot tolerance.
template <typename Scalar>
LpResult<Scalar> simplex_maximize(Mat<Scalar> A, Vec<Scalar> b, const Vec<Scalar>& c) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (b.size() != m || c.size() != n) throw InvalidArgument("LP dimensions are inconsistent");
  for (Eigen::Index r = 0; r < m; ++r) {
    if (b(r) < Scalar(0)) {
      A.row(r) = -A.row(r);
      b(r) = -b(r);
    }
  }
  // Columns: n structural, m artificial, rhs.
  Mat<Scalar> t = Mat<Scalar>::Zero(m + 1, n + m + 1);
  t.topLeftCorner(m, n) = A;
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) {
    t(r, n + r) = Scalar(1);
    t(r, n + m) = b(r);
    basis[static_cast<std::size_t>(r)] = n + r;
  }
  // Phase 1 objective: maximize -sum(artificials); reduced costs are the column sums of A.
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index col = 0; col < n; ++col) t(m, col) += t(r, col);
    t(m, n + m) += t(r, n + m);
  }
  detail::Tableau<Scalar> tab(std::move(t), std::move(basis));
  tab.optimize(n);

  LpResult<Scalar> result;
  result.phase1_residual = tab.table()(m, n + m);
  if (detail::positive(result.phase1_residual)) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  // Drive artificials out of the basis; rows where that is impossible are redundant.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < n) continue;
    for (Eigen::Index col = 0; col < n; ++col) {
      if (detail::nonzero(tab.table()(r, col))) {
        tab.pivot(r, col);
        break;
      }
    }
  }
  // Phase 2: reduced costs c_j - c_B B^-1 A_j.
  auto& tt = tab.table();
  tt.row(m).setZero();
  tt.block(m, 0, 1, n) = c.transpose();
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index bcol = tab.basis()[static_cast<std::size_t>(r)];
    if (bcol >= n) continue;
    const Scalar cb = c(bcol);
    if (detail::nonzero(cb)) tt.row(m) -= cb * tt.row(r);
  }
  // Artificial columns stay out of phase 2. Rows still holding an artificial are all-zero
  // over structural columns, so they never constrain the ratio test.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] >= n) tt.row(r).head(n).setZero();
  }
  if (!tab.optimize(n)) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.x = Vec<Scalar>::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index bcol = tab.basis()[static_cast<std::size_t>(r)];
    if (bcol < n) result.x(bcol) = tt(r, n + m);
  }
  result.objective = c.dot(result.x);
  return result;
}

enum class Sense { LessEqual, GreaterEqual, Equal };

/// Incremental LP builder over nonnegative variables; slack columns are added on solve.
template <typename Scalar>
class LinearProgram {
 public:
  explicit LinearProgram(Eigen::Index variables) : n_(variables), objective_(Vec<Scalar>::Zero(variables)) {}

  Eigen::Index variables() const { return n_; }
  void set_objective(Vec<Scalar> c) {
    if (c.size() != n_) throw InvalidArgument("objective has the wrong length");
    objective_ = std::move(c);
  }
  void add(Vec<Scalar> row, Sense sense, Scalar rhs) {
    if (row.size() != n_) throw InvalidArgument("constraint has the wrong length");
    rows_.push_back({std::move(row), sense, std::move(rhs)});
  }

  /// Solution restricted to the structural variables.
  LpResult<Scalar> maximize() const {
    Eigen::Index slacks = 0;
    for (const auto& r : rows_) slacks += r.sense != Sense::Equal;
    const auto m = static_cast<Eigen::Index>(rows_.size());
    Mat<Scalar> A = Mat<Scalar>::Zero(m, n_ + slacks);
    Vec<Scalar> b(m);
    Eigen::Index s = n_;
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto& row = rows_[static_cast<std::size_t>(r)];
      A.row(r).head(n_) = row.coefficients.transpose();
      if (row.sense == Sense::LessEqual) A(r, s++) = Scalar(1);
      if (row.sense == Sense::GreaterEqual) A(r, s++) = Scalar(-1);
      b(r) = row.rhs;
    }
    Vec<Scalar> c = Vec<Scalar>::Zero(n_ + slacks);
    c.head(n_) = objective_;
    auto result = simplex_maximize<Scalar>(std::move(A), std::move(b), c);
    if (result.status == LpStatus::Optimal) result.x = Vec<Scalar>(result.x.head(n_));
    return result;
  }

 private:
  struct Row {
    Vec<Scalar> coefficients;
    Sense sense;
    Scalar rhs;
  };
  Eigen::Index n_;
  Vec<Scalar> objective_;
  std::vector<Row> rows_;
};

}  // namespace noma
