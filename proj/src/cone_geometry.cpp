#include "bdstab/cone_geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bdstab/errors.hpp"
#include "bdstab/simplex.hpp"

namespace bdstab {

Separator farkas_separator(const std::vector<Vec>& D, const Vec& x, double a_min) {
  if (D.empty()) throw DomainError("separation needs a non-empty drift set");
  const std::size_t d = x.size();
  if (norm(x) == 0.0) throw DomainError("separation direction must be non-zero");
  for (const auto& v : D) {
    if (v.size() != d) throw DimensionError("drift set and direction differ in dimension");
    if (norm(v) == 0.0) throw DomainError("drift set contains the zero vector");
    for (double c : v)
      if (!std::isfinite(c)) throw DomainError("drift set contains a non-finite vector");
  }

  // Variables y = eta + 1 in [0, 2]^d and s >= 0:
  //   <v, y> + s <= sum v   for v in D u {-x},   y_i <= 2.
  LinearProgram lp;
  auto add_row = [&](const Vec& v) {
    Vec row(v);
    row.push_back(1.0);
    lp.A.push_back(std::move(row));
    lp.b.push_back(std::accumulate(v.begin(), v.end(), 0.0));
  };
  for (const auto& v : D) add_row(v);
  add_row(-1.0 * x);
  for (std::size_t i = 0; i < d; ++i) {
    Vec row(d + 1, 0.0);
    row[i] = 1.0;
    lp.A.push_back(std::move(row));
    lp.b.push_back(2.0);
  }
  lp.c.assign(d + 1, 0.0);
  lp.c[d] = 1.0;

  const LpResult res = solve_lp(lp);
  Separator sep;
  if (res.status != LpResult::Status::Optimal) return sep;
  sep.eta.resize(d);
  for (std::size_t i = 0; i < d; ++i) sep.eta[i] = res.x[i] - 1.0;
  // A positive optimum already has |eta|_inf = 1; near s = 0 the LP may
  // return a vanishing eta, which is only rescaled for display.
  const double s = std::max(res.x[d], 0.0);
  const double scale = norm_inf(sep.eta);
  if (scale > 1e-9) sep.eta = (1.0 / scale) * sep.eta;
  sep.margin = s;
  sep.feasible = s > a_min;
  return sep;
}

ConeMembership in_cone(const std::vector<Vec>& D, const Vec& x) {
  const std::size_t d = x.size();
  const std::size_t m = D.size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    if (D[j].size() != d) throw DimensionError("drift set and target differ in dimension");
    for (std::size_t i = 0; i < d; ++i) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = D[j][i];
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(d));
  const double tol = 1e-13 * std::max(1.0, M.cwiseAbs().maxCoeff()) * std::max(1.0, b.norm());

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  std::vector<bool> passive(m, false);

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (std::size_t j = 0; j < m; ++j)
      if (passive[j]) idx.push_back(static_cast<Eigen::Index>(j));
    Eigen::MatrixXd P(M.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) P.col(static_cast<Eigen::Index>(k)) = M.col(idx[k]);
    const Eigen::VectorXd zp = P.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
    return z;
  };

  for (std::size_t outer = 0; outer < 3 * m + 3; ++outer) {
    const Eigen::VectorXd w = M.transpose() * (b - M * alpha);
    std::size_t t = m;
    double best = tol;
    for (std::size_t j = 0; j < m; ++j) {
      if (!passive[j] && w(static_cast<Eigen::Index>(j)) > best) {
        best = w(static_cast<Eigen::Index>(j));
        t = j;
      }
    }
    if (t == m) break;
    passive[t] = true;
    for (std::size_t inner = 0; inner < 3 * m + 3; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool ok = true;
      double step = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        if (passive[j] && z(J) <= 0.0) {
          ok = false;
          const double denom = alpha(J) - z(J);
          if (denom > 0.0) step = std::min(step, alpha(J) / denom);
        }
      }
      if (ok) {
        alpha = z;
        break;
      }
      alpha += step * (z - alpha);
      for (std::size_t j = 0; j < m; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        if (passive[j] && alpha(J) <= tol) {
          passive[j] = false;
          alpha(J) = 0.0;
        }
      }
    }
  }

  ConeMembership out;
  out.coefficients.resize(m);
  for (std::size_t j = 0; j < m; ++j) out.coefficients[j] = std::max(0.0, alpha(static_cast<Eigen::Index>(j)));
  Vec fit(d, 0.0);
  for (std::size_t j = 0; j < m; ++j) axpy(out.coefficients[j], D[j], fit);
  out.residual = norm(fit - x);
  out.inside = out.residual <= 1e-9 * norm(x);
  return out;
}

std::optional<SlidingSolution> solve_sliding(const Vec& da, const Vec& db, const Vec& v) {
  if (da.size() != 2 || db.size() != 2 || v.size() != 2) throw DimensionError("sliding analysis is 2D");
  const Vec c1 = da - db;
  const Vec c2 = -1.0 * v;
  const Vec rhs = -1.0 * db;
  const double det = cross2(c1, c2);
  const double scale = std::max({norm(da), norm(db), 1e-300}) * norm(v);
  SlidingSolution sol;
  if (std::abs(det) > 1e-14 * scale) {
    sol.alpha = cross2(rhs, c2) / det;
    sol.A = cross2(c1, rhs) / det;
    if (sol.alpha < -1e-12 || sol.alpha > 1.0 + 1e-12) return std::nullopt;
    sol.alpha = std::clamp(sol.alpha, 0.0, 1.0);
  } else {
    // c1 is collinear with v; a solution needs db collinear with v too.
    if (std::abs(cross2(v, db)) > 1e-14 * scale) return std::nullopt;
    sol.degenerate = true;
    const double Ab = dot(db, v) / dot(v, v);
    const double slope = dot(c1, v) / dot(v, v);
    if (norm(c1) <= 1e-14 * scale) {
      sol.alpha = 0.5;
      sol.A = Ab + 0.5 * slope;
    } else {
      sol.alpha = slope > 0.0 ? 1.0 : 0.0;
      sol.A = Ab + sol.alpha * slope;
    }
  }
  Vec lhs = (1.0 - sol.alpha) * db;
  axpy(sol.alpha, da, lhs);
  axpy(-sol.A, v, lhs);
  sol.residual = norm(lhs);
  return sol;
}

namespace {

void lattice_interior(std::size_t k, std::size_t total, Vec& cur, std::size_t i, std::vector<Vec>& out) {
  if (i + 1 == k) {
    if (total < 1) return;
    cur[i] = static_cast<double>(total);
    out.push_back(cur);
    return;
  }
  for (std::size_t c = 1; c + (k - i - 1) <= total; ++c) {
    cur[i] = static_cast<double>(c);
    lattice_interior(k, total - c, cur, i + 1, out);
  }
}

// Largest t with some x = sum alpha_k D_k, alpha >= 0, x_i >= t on the face,
// x_j = 0 off it and the face coordinates summing to at most 1. A positive t
// means the cone of D meets the open face, so A1 fails at x.
std::optional<Vec> cone_meets_face(const std::vector<Vec>& D, Pattern face, double a_min) {
  const std::size_t d = D.front().size();
  const std::size_t m = D.size();
  std::vector<Vec> unit;
  for (const auto& v : D) unit.push_back(normalized(v));
  LinearProgram lp;
  auto row = [&](std::size_t i, double sign, double t_coef, double rhs) {
    Vec r(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) r[k] = sign * unit[k][i];
    r[m] = t_coef;
    lp.A.push_back(std::move(r));
    lp.b.push_back(rhs);
  };
  Vec total(m + 1, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    if (in_pattern(face, i)) {
      row(i, -1.0, 1.0, 0.0);
      for (std::size_t k = 0; k < m; ++k) total[k] += unit[k][i];
    } else {
      row(i, 1.0, 0.0, 0.0);
      row(i, -1.0, 0.0, 0.0);
    }
  }
  lp.A.push_back(total);
  lp.b.push_back(1.0);
  lp.c.assign(m + 1, 0.0);
  lp.c[m] = 1.0;
  const LpResult res = solve_lp(lp);
  if (res.status != LpResult::Status::Optimal || !(res.x[m] > a_min)) return std::nullopt;
  Vec x(d, 0.0);
  for (std::size_t k = 0; k < m; ++k) axpy(res.x[k], unit[k], x);
  for (std::size_t i = 0; i < d; ++i)
    if (!in_pattern(face, i)) x[i] = 0.0;
  return normalized(x);
}

}  // namespace

std::vector<Vec> face_directions(std::size_t dimension, Pattern face, std::size_t resolution) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < dimension; ++i)
    if (in_pattern(face, i)) members.push_back(i);
  if (members.empty()) throw ContractError("the empty face has no directions");
  std::vector<Vec> local;
  if (members.size() == 1) {
    local.push_back({1.0});
  } else if (members.size() == 2) {
    const std::size_t n = std::max<std::size_t>(resolution, 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double th = (static_cast<double>(j) + 1.0) * (M_PI / 2.0) / (static_cast<double>(n) + 1.0);
      local.push_back({std::cos(th), std::sin(th)});
    }
  } else {
    Vec cur(members.size());
    lattice_interior(members.size(), std::max(resolution, members.size() + 1) - 1, cur, 0, local);
  }
  std::vector<Vec> out;
  out.reserve(local.size());
  for (const auto& l : local) {
    Vec x(dimension, 0.0);
    for (std::size_t k = 0; k < members.size(); ++k) x[members[k]] = l[k];
    out.push_back(normalized(x));
  }
  return out;
}

FaceSeparation a1_holds(const SupportPatternDrift& model, Pattern face, std::size_t resolution, double a_min) {
  const std::size_t d = model.dimension();
  std::vector<Vec> D;
  for (Pattern p = 1; p < model.pattern_count(); ++p)
    if ((p & face) == face) D.push_back(model.drift(p));
  // A zero drift makes every separation fail.
  const bool has_zero = std::any_of(D.begin(), D.end(), [](const Vec& v) { return norm(v) == 0.0; });

  FaceSeparation out;
  out.face = face;
  const auto dirs = face_directions(d, face, resolution);
  out.directions = dirs.size();
  // Sampling alone misses a cone of D that is a single ray inside the face.
  if (!has_zero) {
    if (auto x = cone_meets_face(D, face, a_min)) {
      out.holds = false;
      out.min_margin = 0.0;
      out.worst_eta = farkas_separator(D, *x, a_min).eta;
      out.failing_direction = std::move(x);
      return out;
    }
  }
  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& x : dirs) {
    Separator s;
    if (!has_zero) s = farkas_separator(D, x, a_min);
    if (!s.feasible) {
      out.holds = false;
      out.failing_direction = x;
      out.etas.clear();
      out.min_margin = has_zero ? 0.0 : s.margin;
      out.worst_eta = s.eta;
      return out;
    }
    if (s.margin < out.min_margin) {
      out.min_margin = s.margin;
      out.worst_eta = s.eta;
    }
    out.etas.push_back(std::move(s.eta));
  }
  out.holds = true;
  return out;
}

SeparationReport a1_all_faces(const SupportPatternDrift& model, const SeparationSettings& settings) {
  SeparationReport rep;
  rep.holds = true;
  for (Pattern p = 1; p < model.pattern_count(); ++p) {
    rep.faces.push_back(a1_holds(model, p, settings.face_resolution, settings.margin));
    rep.holds = rep.holds && rep.faces.back().holds;
  }
  return rep;
}

}  // namespace bdstab
