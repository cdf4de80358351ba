#include "bdstab/drift_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "bdstab/errors.hpp"

namespace bdstab {

namespace {

constexpr double kOnRayTol = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_vec(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

void require_rate_vector(const Vec& v, std::size_t d, const std::string& what) {
  if (v.size() != d) throw DimensionError(what + " has dimension " + std::to_string(v.size()) + ", expected " + std::to_string(d));
  for (double r : v) {
    if (!std::isfinite(r) || r < 0.0) throw DomainError(what + " must be finite and non-negative, got " + format_vec(v));
  }
}

void require_state(std::span<const double> x, std::size_t d) {
  if (x.size() != d) throw DimensionError("state has dimension " + std::to_string(x.size()) + ", expected " + std::to_string(d));
  bool nonzero = false;
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("state " + format_vec(x) + " has a non-finite coordinate");
    if (v < 0.0) throw DomainError("state " + format_vec(x) + " has a negative coordinate");
    nonzero = nonzero || v > 0.0;
  }
  if (!nonzero) throw DomainError("drift is undefined at the origin");
}

Vec unit(std::size_t d, std::size_t i) {
  Vec e(d, 0.0);
  e[i] = 1.0;
  return e;
}

void check_rays(std::vector<Vec>& rays) {
  if (rays.size() < 2) throw ContractError("a cone partition needs at least two rays");
  for (auto& v : rays) {
    if (v.size() != 2) throw DimensionError("cone partition rays must be 2D");
    if (!(v[0] >= 0.0 && v[1] >= 0.0) || norm(v) == 0.0 || !std::isfinite(norm(v))) {
      throw DomainError("ray " + format_vec(v) + " must be a non-zero vector of the closed quadrant");
    }
    if (std::abs(norm(v) - 1.0) > 1e-15) v = normalized(v);
  }
  if (std::abs(rays.front()[1]) > kOnRayTol) throw ContractError("first ray must be e1");
  if (std::abs(rays.back()[0]) > kOnRayTol) throw ContractError("last ray must be e2");
  rays.front() = {1.0, 0.0};
  rays.back() = {0.0, 1.0};
  for (std::size_t k = 0; k + 1 < rays.size(); ++k) {
    if (cross2(rays[k], rays[k + 1]) < -kOnRayTol) throw ContractError("rays must be ordered by angle from e1 to e2");
  }
}

bool same_ray(const Vec& a, const Vec& b) {
  return std::abs(cross2(a, b)) <= kOnRayTol && dot(a, b) > 0.0;
}

/// Whether cone (a, b) lies in the coordinate hyperplane {x_i = 0}.
bool cone_in_hyperplane(const Vec& a, const Vec& b, std::size_t i) { return a[i] == 0.0 && b[i] == 0.0; }

void check_masked_deaths(const std::vector<Vec>& rays, const std::vector<Vec>& deaths) {
  for (std::size_t k = 0; k < deaths.size(); ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (cone_in_hyperplane(rays[k], rays[k + 1], i) && deaths[k][i] != 0.0) {
        throw ContractError("cone " + std::to_string(k + 1) + " lies in {x" + std::to_string(i + 1) +
                            " = 0} but its death vector has a non-zero component there");
      }
    }
  }
}

}  // namespace

Pattern support_of(std::span<const double> x) {
  Pattern p = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0) p |= Pattern{1} << i;
  return p;
}

// ---------------------------------------------------------------------------
// SupportPatternDrift

SupportPatternDrift::SupportPatternDrift(std::size_t dimension, std::vector<Entry> entries, Vec origin_births)
    : dimension_(dimension) {
  if (dimension < 2 || dimension > 16) throw DimensionError("support-pattern models need 2 <= d <= 16");
  const std::size_t n = std::size_t{1} << dimension;
  if (entries.size() != n - 1) {
    throw ContractError("support-pattern table needs " + std::to_string(n - 1) + " entries, got " + std::to_string(entries.size()));
  }
  births_.assign(n, Vec());
  deaths_.assign(n, Vec());
  for (auto& e : entries) {
    if (e.support == 0 || e.support >= n) throw ContractError("invalid support pattern " + std::to_string(e.support));
    if (!births_[e.support].empty()) throw ContractError("support pattern " + std::to_string(e.support) + " listed twice");
    require_rate_vector(e.births, dimension, "birth vector");
    require_rate_vector(e.deaths, dimension, "death vector");
    births_[e.support] = std::move(e.births);
    deaths_[e.support] = std::move(e.deaths);
  }
  if (origin_births.empty()) origin_births = births_[n - 1];
  require_rate_vector(origin_births, dimension, "origin birth vector");
  births_[0] = std::move(origin_births);
  deaths_[0] = Vec(dimension, 0.0);
  bool any_birth = false;
  for (const auto& b : births_)
    for (double r : b) any_birth = any_birth || r > 0.0;
  if (!any_birth) throw DomainError("at least one birth rate must be positive");
}

Vec SupportPatternDrift::deaths(Pattern p, Masking masking) const {
  Vec out = deaths_.at(p);
  if (masking == Masking::Masked)
    for (std::size_t i = 0; i < dimension_; ++i)
      if (!in_pattern(p, i)) out[i] = 0.0;
  return out;
}

Vec SupportPatternDrift::drift(Pattern p, Masking masking) const { return births_.at(p) - deaths(p, masking); }

std::vector<SupportPatternDrift::Entry> SupportPatternDrift::entries() const {
  std::vector<Entry> out;
  for (Pattern p = 1; p < births_.size(); ++p) out.push_back({p, births_[p], deaths_[p]});
  return out;
}

// ---------------------------------------------------------------------------
// ConePartition2D

ConePartition2D::ConePartition2D(std::vector<Vec> rays, std::vector<Vec> births, std::vector<Vec> deaths)
    : rays_(std::move(rays)), births_(std::move(births)), deaths_(std::move(deaths)) {
  check_rays(rays_);
  if (births_.size() + 1 != rays_.size() || deaths_.size() + 1 != rays_.size()) {
    throw ContractError("a partition with N rays needs N-1 birth and death vectors");
  }
  for (const auto& b : births_) require_rate_vector(b, 2, "cone birth vector");
  for (const auto& d : deaths_) require_rate_vector(d, 2, "cone death vector");
  check_masked_deaths(rays_, deaths_);
}

bool ConePartition2D::degenerate(std::size_t cone) const { return same_ray(rays_.at(cone), rays_.at(cone + 1)); }

std::size_t ConePartition2D::cone_of(std::span<const double> x) const {
  const double eps = kOnRayTol * norm(x);
  for (std::size_t k = 0; k < cone_count(); ++k) {
    if (degenerate(k) && std::abs(cross2(rays_[k], x)) <= eps && dot(rays_[k], x) > 0.0) return k;
  }
  for (std::size_t k = 0; k < cone_count(); ++k) {
    if (degenerate(k)) continue;
    if (cross2(rays_[k], x) >= -eps && cross2(x, rays_[k + 1]) > eps) return k;
  }
  for (std::size_t k = cone_count(); k-- > 0;) {
    if (degenerate(k)) continue;
    if (cross2(rays_[k], x) >= -eps && cross2(x, rays_[k + 1]) >= -eps) return k;
  }
  throw DomainError("direction " + format_vec(x) + " is not covered by the cone partition");
}

std::size_t ConePartition2D::origin_cone() const {
  const std::array<double, 2> diag{1.0, 1.0};
  return cone_of(diag);
}

// ---------------------------------------------------------------------------
// ArrivalFamily2D

ArrivalFamily2D::ArrivalFamily2D(std::vector<Vec> rays, std::vector<Vec> deaths, std::vector<Vec> extra_births)
    : rays_(std::move(rays)), deaths_(std::move(deaths)), extras_(std::move(extra_births)) {
  check_rays(rays_);
  if (deaths_.size() + 1 != rays_.size() || extras_.size() + 1 != rays_.size()) {
    throw ContractError("a family with N rays needs N-1 death and extra-birth vectors");
  }
  for (const auto& d : deaths_) require_rate_vector(d, 2, "cone death vector");
  for (const auto& e : extras_) {
    if (e.size() != 2 || !std::isfinite(e[0]) || !std::isfinite(e[1])) throw DomainError("extra births must be finite 2D vectors");
  }
  check_masked_deaths(rays_, deaths_);
}

ConePartition2D ArrivalFamily2D::at(const Vec& lambda) const {
  require_rate_vector(lambda, 2, "arrival vector");
  std::vector<Vec> births;
  births.reserve(extras_.size());
  for (const auto& e : extras_) {
    Vec b(2);
    for (std::size_t i = 0; i < 2; ++i) b[i] = e[i] == 0.0 ? lambda[i] : lambda[i] + e[i];
    births.push_back(std::move(b));
  }
  return ConePartition2D(rays_, std::move(births), deaths_);
}

// ---------------------------------------------------------------------------
// Smooth rates

ExprRate::ExprRate(std::string source) : text(std::move(source)), expr(parse(text)) {}

double evaluate_rate(const RateFn& fn, std::span<const double> x) {
  return std::visit(overloaded{
                        [](const ConstantRate& c) { return c.value; },
                        [&](const ShannonRate& s) {
                          const double r = norm(x);
                          double others = 0.0;
                          for (std::size_t j = 0; j < x.size(); ++j)
                            if (j != s.coordinate) others += x[j] / r;
                          return std::log(1.0 + (x[s.coordinate] / r) / (s.noise + others));
                        },
                        [&](const ExprRate& e) { return e.expr.evaluate(x); },
                    },
                    fn);
}

SmoothDrift::SmoothDrift(std::size_t dimension, Law law) : dimension_(dimension), law_(std::move(law)) {
  if (dimension < 2) throw DimensionError("models need dimension >= 2");
  std::visit(overloaded{
                 [&](const CoordinateRates& c) {
                   if (c.births.size() != dimension || c.deaths.size() != dimension) {
                     throw DimensionError("smooth model needs one birth and one death rate per coordinate");
                   }
                   auto check = [&](const RateFn& fn) {
                     if (const auto* k = std::get_if<ConstantRate>(&fn); k && (!std::isfinite(k->value) || k->value < 0.0)) {
                       throw DomainError("constant rates must be finite and non-negative");
                     }
                     if (const auto* s = std::get_if<ShannonRate>(&fn)) {
                       if (!(s->noise > 0.0) || !std::isfinite(s->noise)) throw DomainError("Shannon noise must be positive");
                       if (s->coordinate >= dimension) throw DimensionError("Shannon rate coordinate out of range");
                     }
                     if (const auto* e = std::get_if<ExprRate>(&fn); e && e->expr.max_variable() > dimension) {
                       throw DimensionError("expression '" + e->text + "' references x" + std::to_string(e->expr.max_variable()) +
                                            " in a " + std::to_string(dimension) + "-dimensional model");
                     }
                   };
                   for (const auto& fn : c.births) check(fn);
                   for (const auto& fn : c.deaths) check(fn);
                 },
                 [&](const PolytopeAllocation& p) {
                   if (p.arrival_vertices.empty() || p.capacity_vertices.empty()) {
                     throw DomainError("polytope allocation needs non-empty vertex lists");
                   }
                   for (const auto& v : p.arrival_vertices) require_rate_vector(v, dimension, "arrival vertex");
                   for (const auto& v : p.capacity_vertices) require_rate_vector(v, dimension, "capacity vertex");
                 },
             },
             law_);
}

Rates SmoothDrift::rates(std::span<const double> x, Masking masking) const {
  Rates out;
  std::visit(overloaded{
                 [&](const CoordinateRates& c) {
                   out.birth.resize(dimension_);
                   out.death.resize(dimension_);
                   for (std::size_t i = 0; i < dimension_; ++i) {
                     out.birth[i] = evaluate_rate(c.births[i], x);
                     out.death[i] = evaluate_rate(c.deaths[i], x);
                   }
                 },
                 [&](const PolytopeAllocation& p) {
                   auto pick = [&](const std::vector<Vec>& verts, bool maximize) -> const Vec& {
                     std::size_t best = 0;
                     double best_val = dot(x, verts[0]);
                     for (std::size_t j = 1; j < verts.size(); ++j) {
                       const double v = dot(x, verts[j]);
                       if (maximize ? v > best_val : v < best_val) {
                         best = j;
                         best_val = v;
                       }
                     }
                     return verts[best];
                   };
                   out.birth = pick(p.arrival_vertices, false);
                   out.death = pick(p.capacity_vertices, true);
                 },
             },
             law_);
  if (masking == Masking::Masked)
    for (std::size_t i = 0; i < dimension_; ++i)
      if (x[i] == 0.0) out.death[i] = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Model-level operations

std::size_t dimension(const Model& model) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift& m) { return m.dimension(); },
                        [](const ConeModel&) { return std::size_t{2}; },
                        [](const SmoothDrift& m) { return m.dimension(); },
                    },
                    model);
}

std::string family_name(const Model& model) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift&) { return std::string("support_pattern"); },
                        [](const ConeModel&) { return std::string("cone_partition"); },
                        [](const SmoothDrift& m) {
                          return std::string(std::holds_alternative<PolytopeAllocation>(m.law()) ? "polytope" : "smooth");
                        },
                    },
                    model);
}

Rates rates_at(const Model& model, std::span<const double> x, Masking masking) {
  require_state(x, dimension(model));
  return std::visit(overloaded{
                        [&](const SupportPatternDrift& m) {
                          const Pattern p = support_of(x);
                          return Rates{m.births(p), m.deaths(p, masking)};
                        },
                        [&](const ConeModel& m) {
                          const auto part = m.partition();
                          const std::size_t k = part.cone_of(x);
                          return Rates{part.births(k), part.deaths(k)};
                        },
                        [&](const SmoothDrift& m) { return m.rates(x, masking); },
                    },
                    model);
}

Vec drift_at(const Model& model, std::span<const double> x, Masking masking) { return rates_at(model, x, masking).drift(); }

Vec origin_births(const Model& model) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift& m) { return m.births(0); },
                        [](const ConeModel& m) {
                          const auto part = m.partition();
                          return part.births(part.origin_cone());
                        },
                        [](const SmoothDrift& m) {
                          const Vec diag(m.dimension(), 1.0);
                          return m.rates(diag).birth;
                        },
                    },
                    model);
}

ConePartition2D cones_from_support(const SupportPatternDrift& model) {
  if (model.dimension() != 2) throw DimensionError("cones_from_support needs a 2D model, got d = " + std::to_string(model.dimension()));
  const Vec e1{1.0, 0.0};
  const Vec e2{0.0, 1.0};
  return ConePartition2D({e1, e1, e2, e2}, {model.births(1), model.births(3), model.births(2)},
                         {model.deaths(1), model.deaths(3), model.deaths(2)});
}

ArrivalFamily2D family_from_support(const SupportPatternDrift& model) {
  if (model.dimension() != 2) throw DimensionError("arrival families are 2D, got d = " + std::to_string(model.dimension()));
  const Vec e1{1.0, 0.0};
  const Vec e2{0.0, 1.0};
  const Vec& ref = model.births(3);
  auto extra = [&](Pattern p) {
    Vec e(2);
    for (std::size_t i = 0; i < 2; ++i) e[i] = model.births(p)[i] == ref[i] ? 0.0 : model.births(p)[i] - ref[i];
    return e;
  };
  return ArrivalFamily2D({e1, e1, e2, e2}, {model.deaths(1), model.deaths(3), model.deaths(2)}, {extra(1), extra(3), extra(2)});
}

std::optional<ArrivalFamily2D> arrival_family(const Model& model) {
  if (const auto* s = std::get_if<SupportPatternDrift>(&model); s && s->dimension() == 2) return family_from_support(*s);
  if (const auto* c = std::get_if<ConeModel>(&model)) return c->family;
  return std::nullopt;
}

std::optional<Vec> arrival_vector(const Model& model) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift& m) -> std::optional<Vec> { return m.births(m.full_pattern()); },
                        [](const ConeModel& m) -> std::optional<Vec> { return m.lambda; },
                        [](const SmoothDrift& m) -> std::optional<Vec> {
                          const auto* c = std::get_if<CoordinateRates>(&m.law());
                          if (!c) return std::nullopt;
                          Vec out;
                          for (const auto& fn : c->births) {
                            const auto* k = std::get_if<ConstantRate>(&fn);
                            if (!k) return std::nullopt;
                            out.push_back(k->value);
                          }
                          return out;
                        },
                    },
                    model);
}

Model with_arrivals(const Model& model, const Vec& lambda) {
  if (lambda.size() != dimension(model)) {
    throw DimensionError("arrival vector has dimension " + std::to_string(lambda.size()) + ", model has " +
                         std::to_string(dimension(model)));
  }
  require_rate_vector(lambda, lambda.size(), "arrival vector");
  return std::visit(overloaded{
                        [&](const SupportPatternDrift& m) -> Model {
                          const Vec ref = m.births(m.full_pattern());
                          auto shift = [&](const Vec& b) {
                            Vec out(b.size());
                            for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[i] == ref[i] ? lambda[i] : lambda[i] + (b[i] - ref[i]);
                            return out;
                          };
                          auto entries = m.entries();
                          for (auto& e : entries) e.births = shift(e.births);
                          return SupportPatternDrift(m.dimension(), std::move(entries), shift(m.births(0)));
                        },
                        [&](const ConeModel& m) -> Model { return ConeModel{m.family, lambda}; },
                        [&](const SmoothDrift& m) -> Model {
                          if (!arrival_vector(Model(m))) throw Unsupported("model births are not constant; cannot substitute an arrival vector");
                          auto rates = std::get<CoordinateRates>(m.law());
                          for (std::size_t i = 0; i < lambda.size(); ++i) rates.births[i] = ConstantRate{lambda[i]};
                          return SmoothDrift(m.dimension(), std::move(rates));
                        },
                    },
                    model);
}

// ---------------------------------------------------------------------------
// Validation

Vec random_orthant_direction(std::size_t dimension, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  for (;;) {
    Vec x(dimension);
    for (auto& v : x) v = std::abs(gauss(rng));
    const double r = norm(x);
    if (r > 1e-8) return (1.0 / r) * x;
  }
}

HomogeneityReport check_homogeneity(const Model& model, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t d = dimension(model);
  HomogeneityReport report;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = random_orthant_direction(d, rng);
    const Vec base = drift_at(model, x);
    for (double a : {0.5, 2.0, 10.0}) {
      const Vec scaled = drift_at(model, a * x);
      const double dev = norm(scaled - base) / (1.0 + norm(base));
      if (dev > report.max_deviation) {
        report.max_deviation = dev;
        report.witness = x;
        report.witness_scale = a;
      }
    }
  }
  report.passed = report.max_deviation <= 1e-9;
  return report;
}

void validate_model(const Model& model, std::size_t smoke_samples, std::uint64_t seed) {
  const auto* smooth = std::get_if<SmoothDrift>(&model);
  if (!smooth) return;
  const std::size_t d = smooth->dimension();
  std::mt19937_64 rng(seed);
  std::vector<Vec> points;
  for (std::size_t i = 0; i < d; ++i) points.push_back(unit(d, i));
  for (std::size_t i = 0; i < d && d > 2; ++i) {
    Vec x = random_orthant_direction(d, rng);
    x[i] = 0.0;
    points.push_back(normalized(x));
  }
  for (std::size_t s = 0; s < smoke_samples; ++s) points.push_back(random_orthant_direction(d, rng));
  for (const auto& x : points) {
    const Rates r = smooth->rates(x, Masking::Unmasked);
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(r.birth[i]) || r.birth[i] < 0.0 || !std::isfinite(r.death[i]) || r.death[i] < 0.0) {
        throw DomainError("rates of coordinate " + std::to_string(i + 1) + " at " + format_vec(x) +
                          " are not finite and non-negative");
      }
    }
  }
  const auto h = check_homogeneity(model, 200, seed + 1);
  if (!h.passed) {
    std::ostringstream os;
    os << "drift is not 0-homogeneous: |delta(" << h.witness_scale << " x) - delta(x)| / (1 + |delta(x)|) = " << h.max_deviation
       << " at x = " << format_vec(h.witness);
    throw HomogeneityError(os.str());
  }
}

double drift_bound(const Model& model, std::size_t samples, std::uint64_t seed) {
  return std::visit(overloaded{
                        [](const SupportPatternDrift& m) {
                          double b = 0.0;
                          for (Pattern p = 1; p < m.pattern_count(); ++p) b = std::max(b, norm(m.drift(p)));
                          return b;
                        },
                        [](const ConeModel& m) {
                          const auto part = m.partition();
                          double b = 0.0;
                          for (std::size_t k = 0; k < part.cone_count(); ++k) b = std::max(b, norm(part.drift(k)));
                          return b;
                        },
                        [&](const SmoothDrift& m) {
                          std::mt19937_64 rng(seed);
                          double b = 0.0;
                          for (std::size_t i = 0; i < m.dimension(); ++i) b = std::max(b, norm(m.rates(unit(m.dimension(), i)).drift()));
                          for (std::size_t s = 0; s < samples; ++s) {
                            b = std::max(b, norm(m.rates(random_orthant_direction(m.dimension(), rng)).drift()));
                          }
                          return b;
                        },
                    },
                    model);
}

// ---------------------------------------------------------------------------
// Direction meshes

namespace {

std::vector<Vec> icosphere(int level) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                            {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},  {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v = normalized(v);
  std::vector<std::array<std::size_t, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},   {4, 9, 5}, {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint;
    auto mid = [&](std::size_t a, std::size_t b) {
      const auto key = std::minmax(a, b);
      if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
      verts.push_back(normalized(verts[a] + verts[b]));
      midpoint.emplace(key, verts.size() - 1);
      return verts.size() - 1;
    };
    std::vector<std::array<std::size_t, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const std::size_t a = mid(f[0], f[1]);
      const std::size_t b = mid(f[1], f[2]);
      const std::size_t c = mid(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  return verts;
}

void simplex_lattice(std::size_t d, std::size_t total, Vec& current, std::size_t i, std::vector<Vec>& out) {
  if (i + 1 == d) {
    current[i] = static_cast<double>(total);
    out.push_back(normalized(current));
    return;
  }
  for (std::size_t k = 0; k <= total; ++k) {
    current[i] = static_cast<double>(k);
    simplex_lattice(d, total - k, current, i + 1, out);
  }
}

}  // namespace

std::vector<Vec> direction_mesh(std::size_t dimension, std::size_t resolution, int icosphere_level) {
  std::vector<Vec> out;
  if (dimension == 2) {
    if (resolution < 2) throw ContractError("2D direction mesh needs at least 2 directions");
    const double step = (M_PI / 2.0) / static_cast<double>(resolution - 1);
    for (std::size_t j = 0; j < resolution; ++j) {
      const double th = step * static_cast<double>(j);
      Vec v{std::cos(th), std::sin(th)};
      if (j == 0) v = {1.0, 0.0};
      if (j + 1 == resolution) v = {0.0, 1.0};
      out.push_back(std::move(v));
    }
    return out;
  }
  if (dimension == 3) {
    for (auto v : icosphere(icosphere_level)) {
      if (v[0] < -1e-12 || v[1] < -1e-12 || v[2] < -1e-12) continue;
      for (auto& c : v) c = std::abs(c) <= 1e-12 ? 0.0 : c;
      out.push_back(normalized(v));
    }
    return out;
  }
  Vec current(dimension, 0.0);
  simplex_lattice(dimension, std::max<std::size_t>(resolution, 1), current, 0, out);
  return out;
}

}  // namespace bdstab
