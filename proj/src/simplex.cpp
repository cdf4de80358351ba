#include "bdstab/simplex.hpp"

#include <cmath>
#include <limits>

#include "bdstab/errors.hpp"

namespace bdstab {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols), t_(rows, Vec(cols + 1, 0.0)), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  double& rhs(std::size_t r) { return t_[r][cols_]; }
  std::size_t& basic(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c, Vec& obj) {
    const double p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || t_[i][c] == 0.0) continue;
      const double f = t_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[r][j];
    }
    if (obj[c] != 0.0) {
      const double f = obj[c];
      for (std::size_t j = 0; j <= cols_; ++j) obj[j] -= f * t_[r][j];
    }
    basis_[r] = c;
    ++pivots_;
  }

  /// Reduced-cost row for maximizing cost^T x: obj[j] = c_B B^-1 A_j - c_j.
  Vec objective_row(const Vec& cost) const {
    Vec obj(cols_ + 1, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) obj[j] = -cost[j];
    for (std::size_t r = 0; r < t_.size(); ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) obj[j] += cb * t_[r][j];
    }
    return obj;
  }

  /// Returns false when unbounded.
  bool optimize(Vec& obj, const std::vector<bool>& allowed, double eps) {
    for (std::size_t guard = 0; guard < 100000; ++guard) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed[j] && obj[j] < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = t_.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < t_.size(); ++r) {
        if (t_[r][enter] <= eps) continue;
        const double ratio = t_[r][cols_] / t_[r][enter];
        const bool tie = leave < t_.size() && std::abs(ratio - best) <= eps;
        if (leave == t_.size() || (!tie && ratio < best) || (tie && basis_[r] < basis_[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == t_.size()) return false;
      pivot(leave, enter, obj);
    }
    throw Error("simplex iteration limit reached");
  }

  std::size_t pivots() const { return pivots_; }

 private:
  std::size_t cols_;
  std::vector<Vec> t_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double eps) {
  const std::size_t m = lp.A.size();
  const std::size_t n = lp.c.size();
  if (lp.b.size() != m) throw DimensionError("LP right-hand side has the wrong length");
  for (const auto& row : lp.A)
    if (row.size() != n) throw DimensionError("LP constraint row has the wrong length");

  std::size_t artificials = 0;
  for (double bi : lp.b) artificials += bi < 0.0 ? 1 : 0;
  const std::size_t cols = n + m + artificials;
  Tableau T(m, cols);
  std::size_t next_art = n + m;
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = lp.b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) T.at(r, j) = sign * lp.A[r][j];
    T.at(r, n + r) = sign;  // slack, or surplus for flipped rows
    T.rhs(r) = sign * lp.b[r];
    if (sign < 0.0) {
      T.at(r, next_art) = 1.0;
      T.basic(r) = next_art++;
    } else {
      T.basic(r) = n + r;
    }
  }

  LpResult res;
  std::vector<bool> allowed(cols, true);
  if (artificials > 0) {
    Vec cost(cols, 0.0);
    for (std::size_t j = n + m; j < cols; ++j) cost[j] = -1.0;
    Vec obj = T.objective_row(cost);
    T.optimize(obj, allowed, eps);
    if (obj[cols] < -1e-9) {
      res.status = LpResult::Status::Infeasible;
      res.pivots = T.pivots();
      return res;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (T.basic(r) < n + m) continue;
      for (std::size_t j = 0; j < n + m; ++j) {
        if (std::abs(T.at(r, j)) > eps) {
          T.pivot(r, j, obj);
          break;
        }
      }
    }
    for (std::size_t j = n + m; j < cols; ++j) allowed[j] = false;
  }

  Vec cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
  Vec obj = T.objective_row(cost);
  if (!T.optimize(obj, allowed, eps)) {
    res.status = LpResult::Status::Unbounded;
    res.pivots = T.pivots();
    return res;
  }
  res.status = LpResult::Status::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (T.basic(r) < n) res.x[T.basic(r)] = T.rhs(r);
  res.objective = dot(lp.c, res.x);
  res.pivots = T.pivots();
  return res;
}

}  // namespace bdstab
