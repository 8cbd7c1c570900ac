#include "dlorenz/core_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dlorenz/error.hpp"

namespace dlorenz {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroB: return "zero-B";
    case ErrorKind::Escape: return "escape";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::EmptyStrip: return "empty-strip";
    case ErrorKind::OutOfStrip: return "out-of-strip";
    case ErrorKind::DegenerateD: return "degenerate-d";
    case ErrorKind::DegenerateCoefficients: return "degenerate-coefficients";
    case ErrorKind::ConditionA: return "condition-A";
    case ErrorKind::InvalidCase: return "invalid-case";
    case ErrorKind::FloatRange: return "float-range";
    case ErrorKind::InsufficientRange: return "insufficient-range";
    case ErrorKind::SmallM3: return "small-M3";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

State3 henon3d_step(const State3& s, const HenonParams& p) {
  return {s[1], s[2], p.M1 + p.B * s[0] + p.M2 * s[1] - s[2] * s[2]};
}

Matrix3 henon3d_jacobian(const State3& s, const HenonParams& p) {
  return {{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {p.B, p.M2, -2.0 * s[2]}}};
}

InverseHenonParams hatted_params(const HenonParams& p) {
  if (p.B == 0.0)
    throw Error(ErrorKind::ZeroB, "inverse map requires B != 0 (zero-B)");
  return {p.M1 / (p.B * p.B), -p.M2 / p.B, 1.0 / p.B};
}

State3 henon3d_inverse_step(const State3& s, const InverseHenonParams& ip) {
  return {s[1], s[2], ip.M1hat + ip.M2hat * s[2] + ip.Bhat * s[0] - s[1] * s[1]};
}

Matrix3 henon3d_inverse_jacobian(const State3& s, const InverseHenonParams& ip) {
  return {{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {ip.Bhat, -2.0 * s[1], ip.M2hat}}};
}

State3 to_inverse_coords(const State3& s, double B) {
  if (B == 0.0) throw Error(ErrorKind::ZeroB, "inverse coordinates require B != 0 (zero-B)");
  return {-s[2] / B, -s[1] / B, -s[0] / B};
}

State3 from_inverse_coords(const State3& s, double B) {
  if (B == 0.0) throw Error(ErrorKind::ZeroB, "inverse coordinates require B != 0 (zero-B)");
  return {-B * s[2], -B * s[1], -B * s[0]};
}

std::pair<double, double> mira_step(std::pair<double, double> s,
                                    std::pair<double, double> m) {
  const auto [y, z] = s;
  return {z, m.first + m.second * z - y * y};
}

State3 limit_map_case1(const State3& s, double M1, double M2, double M3) {
  return {-M3 * s[1], s[2], M1 - s[0] + M2 * s[1] - s[2] * s[2]};
}

Matrix3 limit_map_case1_jacobian(const State3& s, double, double M2, double M3) {
  return {{{0.0, -M3, 0.0}, {0.0, 0.0, 1.0}, {-1.0, M2, -2.0 * s[2]}}};
}

State3 limit_map_case2(const State3& s, double M1, double M2, double M3) {
  return {s[2], s[0], M1 + M2 * s[0] + M3 * s[1] - s[2] * s[2]};
}

Matrix3 limit_map_case2_jacobian(const State3& s, double, double M2, double M3) {
  return {{{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {M2, M3, -2.0 * s[2]}}};
}

State3 case1_to_case2(const State3& s, double M3) { return {s[1], -s[0] / M3, s[2]}; }
State3 case2_to_case1(const State3& s, double M3) { return {-M3 * s[1], s[0], s[2]}; }
State3 case2_to_henon(const State3& s) { return {s[1], s[0], s[2]}; }
State3 henon_to_case2(const State3& s) { return {s[1], s[0], s[2]}; }

namespace {

double eval_real(const CubicPoly& p, double x) {
  return ((x + p.c2) * x + p.c1) * x + p.c0;
}

double eval_deriv(const CubicPoly& p, double x) {
  return (3.0 * x + 2.0 * p.c2) * x + p.c1;
}

double bisect_root(const CubicPoly& p, double a, double b) {
  double fa = eval_real(p, a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = eval_real(p, m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double newton_polish(const CubicPoly& p, double r) {
  double best = r;
  double best_res = std::abs(eval_real(p, r));
  for (int it = 0; it < 4 && best_res > 0.0; ++it) {
    const double d = eval_deriv(p, best);
    if (d == 0.0) break;
    const double cand = best - eval_real(p, best) / d;
    const double res = std::abs(eval_real(p, cand));
    if (!(res < best_res)) break;
    best = cand;
    best_res = res;
  }
  return best;
}

std::array<std::complex<double>, 2> quadratic_roots(double q1, double q0) {
  const double disc = q1 * q1 - 4.0 * q0;
  const double scale = q1 * q1 + 4.0 * std::abs(q0);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(disc) <= 8.0 * eps * scale) {
    const double r = -0.5 * q1;
    return {std::complex<double>(r), std::complex<double>(r)};
  }
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double t = -0.5 * (q1 + std::copysign(sq, q1));
    if (t == 0.0) return {std::complex<double>(0.0), std::complex<double>(0.0)};
    double r1 = t, r2 = q0 / t;
    if (r1 < r2) std::swap(r1, r2);
    return {std::complex<double>(r1), std::complex<double>(r2)};
  }
  const double re = -0.5 * q1;
  const double im = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(re, im), std::complex<double>(re, -im)};
}

}  // namespace

std::array<std::complex<double>, 3> cubic_roots(const CubicPoly& poly) {
  const double bound =
      1.0 + std::max({std::abs(poly.c2), std::abs(poly.c1), std::abs(poly.c0)});

  // Break the real line at the critical points so each piece is monotone.
  std::vector<double> knots{-bound};
  const auto crit = quadratic_roots(2.0 * poly.c2 / 3.0, poly.c1 / 3.0);
  for (const auto& c : crit)
    if (c.imag() == 0.0 && std::abs(c.real()) < bound) knots.push_back(c.real());
  knots.push_back(bound);
  std::sort(knots.begin(), knots.end());

  std::vector<double> real_roots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double fa = eval_real(poly, a), fb = eval_real(poly, b);
    if (fa == 0.0) {
      real_roots.push_back(a);
    } else if ((fa < 0) != (fb < 0) && fb != 0.0) {
      real_roots.push_back(bisect_root(poly, a, b));
    }
  }

  // Deflate by the root that is least sensitive to perturbation.
  double pivot = real_roots.empty() ? 0.0 : real_roots.front();
  double best = -1.0;
  for (double r : real_roots) {
    const double d = std::abs(eval_deriv(poly, r));
    if (d > best) {
      best = d;
      pivot = r;
    }
  }
  pivot = newton_polish(poly, pivot);

  const double q1 = poly.c2 + pivot;
  const double q0 = poly.c1 + pivot * q1;
  const auto rest = quadratic_roots(q1, q0);

  std::array<std::complex<double>, 3> out{std::complex<double>(pivot), rest[0],
                                          rest[1]};
  // Polish real roots from the quadratic against the original cubic.
  for (std::size_t i = 1; i < 3; ++i)
    if (out[i].imag() == 0.0 && out[1] != out[2])
      out[i] = newton_polish(poly, out[i].real());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

CubicPoly henon_charpoly(double p, const HenonParams& params) {
  return {2.0 * p, -params.M2, -params.B};
}

std::vector<FixedPointAnalysis> fixed_points(const HenonParams& params) {
  const double b = params.B + params.M2 - 1.0;
  const double disc = b * b + 4.0 * params.M1;
  const double scale = b * b + 4.0 * std::abs(params.M1);
  constexpr double eps = std::numeric_limits<double>::epsilon();

  std::vector<double> ps;
  if (std::abs(disc) <= 8.0 * eps * scale) {
    ps.push_back(0.5 * b);
  } else if (disc > 0.0) {
    const double q = 0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0) {
      ps.push_back(0.0);
    } else {
      ps.push_back(q);
      ps.push_back(-params.M1 / q);
    }
    std::sort(ps.begin(), ps.end());
  }

  std::vector<FixedPointAnalysis> out;
  out.reserve(ps.size());
  for (double p : ps) {
    FixedPointAnalysis fp;
    fp.point = {p, p, p};
    fp.charpoly = henon_charpoly(p, params);
    fp.multipliers = cubic_roots(fp.charpoly);
    out.push_back(fp);
  }
  return out;
}

}  // namespace dlorenz
