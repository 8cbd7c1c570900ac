#pragma once

// Template definitions for rescaling.hpp.

#include <algorithm>
#include <optional>

namespace dlorenz {

namespace detail {

template <class F>
std::optional<Mat3<Real>> central_jacobian(const F& f, const Vec3<Real>& p, const Real& h) {
  Mat3<Real> J{};
  for (std::size_t j = 0; j < 3; ++j) {
    Vec3<Real> lo = p, hi = p;
    lo[j] -= h;
    hi[j] += h;
    const std::optional<Vec3<Real>> fl = f(lo);
    const std::optional<Vec3<Real>> fh = f(hi);
    if (!fl || !fh) return std::nullopt;
    for (std::size_t i = 0; i < 3; ++i) J[i][j] = ((*fh)[i] - (*fl)[i]) / (2 * h);
  }
  return J;
}

}  // namespace detail

template <class F, class G>
DeviationResult deviation_between(const F& f, const G& g, const std::vector<State3>& grid,
                                  double h) {
  DeviationResult out;
  const Real rh(h);
  Real c0(0), c1(0);
  for (const State3& p : grid) {
    const Vec3<Real> x{Real(p[0]), Real(p[1]), Real(p[2])};
    const std::optional<Vec3<Real>> fx = f(x);
    const std::optional<Vec3<Real>> gx = g(x);
    if (!fx || !gx) continue;
    const auto Jf = detail::central_jacobian(f, x, rh);
    const auto Jg = detail::central_jacobian(g, x, rh);
    if (!Jf || !Jg) continue;
    ++out.points;
    for (std::size_t i = 0; i < 3; ++i) {
      c0 = std::max(c0, Real(abs((*fx)[i] - (*gx)[i])));
      for (std::size_t j = 0; j < 3; ++j) c1 = std::max(c1, Real(abs((*Jf)[i][j] - (*Jg)[i][j])));
    }
  }
  out.c0 = to_double(c0);
  out.c1 = to_double(c1);
  out.coverage = grid.empty() ? 0.0 : static_cast<double>(out.points) / static_cast<double>(grid.size());
  return out;
}

}  // namespace dlorenz
