#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace bdstab {

/// Dense real vector. Dimensions in this library are tiny (2 or 3), so a
/// plain std::vector is used throughout instead of a fixed-size type.
using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

/// y += s * x
inline void axpy(double s, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

inline Vec normalized(const Vec& a) { return (1.0 / norm(a)) * a; }

/// z-component of the 2D cross product a x b.
inline double cross2(std::span<const double> a, std::span<const double> b) {
  return a[0] * b[1] - a[1] * b[0];
}

}  // namespace bdstab
