#include "bdstab/region2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bdstab/cone_geometry.hpp"
#include "bdstab/errors.hpp"
#include "bdstab/parallel.hpp"

namespace bdstab {

std::optional<USetWitness> membership_u1(const ConePartition2D& partition, std::size_t k, double tol) {
  if (k < 1 || k > partition.cone_count()) throw ContractError("U1 index out of range");
  const Vec delta = partition.drift(k - 1);
  const Vec& a = partition.ray(k - 1);
  const Vec& b = partition.ray(k);
  USetWitness w;
  w.kind = USetWitness::Kind::U1;
  w.index = k;
  if (partition.degenerate(k - 1)) {
    // Off-ray drift component of an axis cone is a birth rate, so exact
    // collinearity is the generic case there, not a knife edge.
    const double A = dot(a, delta);
    if (std::abs(cross2(a, delta)) > tol || !(A > tol)) return std::nullopt;
    w.first = A;
    w.second = 0.0;
    w.strict = true;
    return w;
  }
  const double det = cross2(a, b);
  const double A = cross2(delta, b) / det;
  const double B = cross2(a, delta) / det;
  if (A < -tol || B < -tol || !(A + B > tol)) return std::nullopt;
  w.first = A;
  w.second = B;
  w.strict = A > tol && B > tol;
  return w;
}

std::optional<USetWitness> membership_u2(const ConePartition2D& partition, std::size_t k, double tol) {
  if (k < 2 || k > partition.ray_count()) throw ContractError("U2 index out of range");
  if (k == partition.ray_count()) return std::nullopt;
  const auto sol = solve_sliding(partition.drift(k - 1), partition.drift(k - 2), partition.ray(k - 1));
  if (!sol || sol->A < -tol) return std::nullopt;
  USetWitness w;
  w.kind = USetWitness::Kind::U2;
  w.index = k;
  w.first = sol->alpha;
  w.second = sol->A;
  w.strict = sol->A > tol && sol->alpha > tol && sol->alpha < 1.0 - tol;
  return w;
}

namespace {

RegionVerdict memberships_of(const ConePartition2D& partition, double tol) {
  RegionVerdict v;
  for (std::size_t k = 1; k <= partition.cone_count(); ++k)
    if (auto w = membership_u1(partition, k, tol)) v.memberships.push_back(*w);
  for (std::size_t k = 2; k <= partition.ray_count(); ++k)
    if (auto w = membership_u2(partition, k, tol)) v.memberships.push_back(*w);
  return v;
}

bool any_outward(const RegionVerdict& v, double tol) {
  return std::any_of(v.memberships.begin(), v.memberships.end(), [&](const USetWitness& w) {
    return w.kind == USetWitness::Kind::U1 ? w.first + w.second > tol : w.second > tol;
  });
}

// A drift lying on the edge of one set can still be interior to the union,
// e.g. sliding outward along a ray with both neighbours pushing out. Shift
// every drift by a small common vector in eight directions; if each shifted
// partition still moves outward through some set the point is unstable.
bool interior_of_union(const ConePartition2D& partition, double tol) {
  double scale = 0.0;
  for (std::size_t k = 0; k < partition.cone_count(); ++k)
    scale = std::max({scale, norm_inf(partition.births(k)), norm_inf(partition.deaths(k))});
  const double eps = std::max(1e3 * tol, 1e-7 * scale);
  for (int j = 0; j < 8; ++j) {
    const double th = j * M_PI / 4.0;
    const Vec w{eps * std::cos(th), eps * std::sin(th)};
    std::vector<Vec> births, deaths;
    for (std::size_t k = 0; k < partition.cone_count(); ++k) {
      Vec b = partition.births(k), d = partition.deaths(k);
      for (std::size_t i = 0; i < 2; ++i) {
        if (w[i] >= 0.0) {
          b[i] += w[i];
        } else if (b[i] >= -w[i]) {
          b[i] += w[i];
        } else if (!partition.degenerate(k) || partition.ray(k)[i] != 0.0) {
          d[i] -= w[i];
        }
      }
      births.push_back(std::move(b));
      deaths.push_back(std::move(d));
    }
    if (!any_outward(memberships_of(ConePartition2D(partition.rays(), births, deaths), tol), tol)) return false;
  }
  return true;
}

}  // namespace

RegionVerdict classify_2d(const ConePartition2D& partition, double tol) {
  RegionVerdict v = memberships_of(partition, tol);
  if (v.memberships.empty()) {
    v.label = Label::Stable;
    return v;
  }
  const auto strict = std::find_if(v.memberships.begin(), v.memberships.end(), [](const USetWitness& w) { return w.strict; });
  v.witness = strict != v.memberships.end() ? *strict : v.memberships.front();
  if (strict != v.memberships.end() || (any_outward(v, tol) && interior_of_union(partition, tol))) {
    v.label = Label::Unstable;
  } else {
    v.label = Label::Boundary;
  }
  return v;
}

namespace {

std::vector<Vec> clip(const std::vector<Vec>& poly, std::size_t axis) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % poly.size()];
    const bool pin = p[axis] >= 0.0;
    const bool qin = q[axis] >= 0.0;
    if (pin) out.push_back(p);
    if (pin != qin) {
      const double t = p[axis] / (p[axis] - q[axis]);
      Vec r = p + t * (q - p);
      r[axis] = 0.0;
      out.push_back(std::move(r));
    }
  }
  return out;
}

void simplify(std::vector<Vec>& poly) {
  bool changed = true;
  while (changed && poly.size() > 2) {
    changed = false;
    for (std::size_t i = 0; i < poly.size() && poly.size() > 2; ++i) {
      const Vec& prev = poly[(i + poly.size() - 1) % poly.size()];
      const Vec& cur = poly[i];
      const Vec& next = poly[(i + 1) % poly.size()];
      const double scale = std::max({norm(prev), norm(cur), norm(next), 1.0});
      const bool duplicate = norm(cur - prev) <= 1e-12 * scale;
      const bool collinear = std::abs(cross2(cur - prev, next - cur)) <= 1e-12 * scale * scale;
      if (duplicate || collinear) {
        poly.erase(poly.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
}

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

}  // namespace

std::vector<Vec> region_polygon(const ArrivalFamily2D& family) {
  std::vector<Vec> chain;
  for (std::size_t k = 0; k < family.cone_count(); ++k) chain.push_back(family.anchor(k));
  std::vector<Vec> poly;
  poly.push_back({0.0, 0.0});
  poly.push_back({chain.front()[0], 0.0});
  for (const auto& p : chain) poly.push_back(p);
  poly.push_back({0.0, chain.back()[1]});
  poly = clip(clip(poly, 0), 1);
  for (auto& p : poly)
    for (auto& c : p)
      if (c == 0.0) c = 0.0;  // drop negative zeros
  simplify(poly);
  const auto origin = std::find_if(poly.begin(), poly.end(), [](const Vec& p) { return norm(p) <= 1e-12; });
  if (origin != poly.end()) std::rotate(poly.begin(), origin, poly.end());
  return poly;
}

std::vector<Vec> region_polygon(const Model& model) {
  const auto family = arrival_family(model);
  if (!family) throw Unsupported("the " + family_name(model) + " model has no affine arrival parameterization over a 2D cone partition");
  return region_polygon(*family);
}

std::optional<bool> polygon_contains(const std::vector<Vec>& polygon, const Vec& p, double tube) {
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const Vec& a = polygon[i];
    const Vec& b = polygon[j];
    if (segment_distance(p, a, b) <= tube) return std::nullopt;
    if ((a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]) inside = !inside;
  }
  return inside;
}

RegionGrid sweep_region(const ArrivalFamily2D& family, const SweepSettings& sweep, double tol, unsigned threads) {
  if (sweep.grid < 2) throw ContractError("sweep grid needs at least 2 points per axis");
  if (sweep.lo.size() != 2 || sweep.hi.size() != 2) throw DimensionError("sweep bounds must be 2D");
  RegionGrid g;
  g.n = sweep.grid;
  g.lo = sweep.lo;
  g.hi = sweep.hi;
  g.step1 = (sweep.hi[0] - sweep.lo[0]) / static_cast<double>(g.n - 1);
  g.step2 = (sweep.hi[1] - sweep.lo[1]) / static_cast<double>(g.n - 1);
  g.cells.resize(g.n * g.n);
  parallel_for(g.cells.size(), [&](std::size_t idx) {
    const std::size_t i = idx % g.n;
    const std::size_t j = idx / g.n;
    Vec lambda{sweep.lo[0] + static_cast<double>(i) * g.step1, sweep.lo[1] + static_cast<double>(j) * g.step2};
    const Label label = classify_2d(family.at(lambda), tol).label;
    g.cells[idx] = GridCell{std::move(lambda), label};
  }, threads);
  return g;
}

void write_grid_csv(std::ostream& out, const RegionGrid& grid) {
  out << "lambda1,lambda2,verdict\r\n";
  char buf[96];
  for (const auto& c : grid.cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", c.lambda[0], c.lambda[1]);
    out << buf << to_string(c.label) << "\r\n";
  }
}

void write_region_svg(std::ostream& out, const ArrivalFamily2D& family, const std::vector<Vec>& polygon, const RegionGrid* grid) {
  double extent = 0.0;
  for (std::size_t k = 0; k < family.cone_count(); ++k) extent = std::max(extent, norm_inf(family.anchor(k)));
  for (const auto& p : polygon) extent = std::max(extent, norm_inf(p));
  if (grid) extent = std::max(extent, norm_inf(grid->hi));
  extent = extent > 0.0 ? 1.1 * extent : 1.0;

  const double size = 560.0;
  const double pad = 40.0;
  auto X = [&](double v) { return pad + v / extent * size; };
  auto Y = [&](double v) { return pad + size - v / extent * size; };
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
  out << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  if (grid) {
    const double w = grid->step1 / extent * size;
    const double h = grid->step2 / extent * size;
    for (const auto& c : grid->cells) {
      const char* fill = c.label == Label::Stable ? "#cfe8cf" : c.label == Label::Unstable ? "#f3d0d0" : "#e0e0e0";
      std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\"/>\n",
                    X(c.lambda[0]) - w / 2, Y(c.lambda[1]) - h / 2, w, h, fill);
      out << buf;
    }
  }
  out << "<polygon fill=\"#4a8f4a\" fill-opacity=\"0.35\" stroke=\"#2d5f2d\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : polygon) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(p[0]), Y(p[1]));
    out << buf;
  }
  out << "\"/>\n";
  // cones drawn at each psi point
  for (std::size_t k = 0; k < family.cone_count(); ++k) {
    const Vec psi = family.anchor(k);
    for (std::size_t r = k; r <= k + 1; ++r) {
      const Vec end = psi + (0.25 * extent) * family.rays()[r];
      std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#8888cc\" stroke-dasharray=\"4 3\"/>\n",
                    X(psi[0]), Y(psi[1]), X(end[0]), Y(end[1]));
      out << buf;
    }
  }
  out << "<polyline fill=\"none\" stroke=\"#222\" stroke-width=\"1.2\" points=\"";
  for (std::size_t k = 0; k < family.cone_count(); ++k) {
    const Vec psi = family.anchor(k);
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(psi[0]), Y(psi[1]));
    out << buf;
  }
  out << "\"/>\n";
  for (std::size_t k = 0; k < family.cone_count(); ++k) {
    const Vec psi = family.anchor(k);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"#c33\"><title>psi_%zu = (%g, %g)</title></circle>\n",
                  X(psi[0]), Y(psi[1]), k + 1, psi[0], psi[1]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n"
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n",
                X(0), Y(0), X(extent), Y(0), X(0), Y(0), X(0), Y(extent));
  out << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"%.2f\" font-size=\"14\">lambda1</text>\n<text x=\"%.2f\" y=\"%.2f\" font-size=\"14\">lambda2</text>\n",
                X(extent) - 50, Y(0) + 25, X(0) - 30, Y(extent) - 10);
  out << buf << "</svg>\n";
}

}  // namespace bdstab
