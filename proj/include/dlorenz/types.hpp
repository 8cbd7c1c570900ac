#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace dlorenz {

template <class T>
using Vec3 = std::array<T, 3>;

template <class T>
using Mat3 = std::array<std::array<T, 3>, 3>;

/// A point in 3-space. Interpreted as (x, y, z) for the Henon family and
/// as (X1, X2, Y) for the rescaled limit maps.
using State3 = Vec3<double>;
using Matrix3 = Mat3<double>;

/// Orbits leaving this ball are reported as escaped.
inline constexpr double kDivergenceRadius = 1e6;

inline double norm2(const State3& s) {
  return std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
}

inline double norm_inf(const State3& s) {
  return std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2])});
}

inline bool is_finite(const State3& s) {
  return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]);
}

inline bool escaped(const State3& s) {
  return !is_finite(s) || norm_inf(s) > kDivergenceRadius;
}

inline double max_abs_diff(const State3& a, const State3& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]),
                   std::abs(a[2] - b[2])});
}

inline double max_abs_diff(const Matrix3& a, const Matrix3& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

template <class T>
T det3(const Mat3<T>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

template <class T>
Vec3<T> matvec(const Mat3<T>& m, const Vec3<T>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

}  // namespace dlorenz
