#include "dlorenz/rescaling.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include <omp.h>

#include "dlorenz/core_maps.hpp"

namespace dlorenz {

namespace {

using RVec = Vec3<Real>;
using RMat = Mat3<Real>;
using Poly = Poly3<Real>;

constexpr double kFloatCap = 1e300;

Real rpow(const Real& b, int k) { return boost::multiprecision::pow(b, k); }

Real max_abs(const RVec& v) {
  using boost::multiprecision::abs;
  return std::max({abs(v[0]), abs(v[1]), abs(v[2])});
}

RMat inverse3(const RMat& m) {
  const Real det = det3(m);
  if (det == 0) throw Error(ErrorKind::DegenerateCoefficients, "singular rescaling chart");
  RMat inv{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
      const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
    }
  return inv;
}

template <class V>
Vec3<V> apply_linear(const RMat& A, const Vec3<V>& x) {
  Vec3<V> out;
  for (int i = 0; i < 3; ++i) out[i] = x[0] * A[i][0] + x[1] * A[i][1] + x[2] * A[i][2];
  return out;
}

/// T_k = T1 o T0^k with precomputed powers of the multipliers.
template <class V>
Vec3<V> return_map(const ModelT<Real>& m, const RVec& powers, const Vec3<V>& x) {
  const Vec3<V> y{x[0] * powers[0], x[1] * powers[1], x[2] * powers[2]};
  return global_map_step(y, m.global, m.tails);
}

RVec saddle_powers(const ModelT<Real>& m, int k) {
  return {rpow(m.saddle.lambda1, k), rpow(m.saddle.lambda2, k), rpow(m.saddle.gamma, k)};
}

/// T_k in (xi, eta) coordinates around the shifted expansion point.
PolyMap3<Real> local_form(const ModelT<Real>& m, const RVec& powers, const RVec& s) {
  const auto& g = m.global;
  const Real ginv = Real(1) / powers[2];
  const Vec3<Poly> in{Poly::variable(0) + (g.x1plus + s[0]), Poly::variable(1) + (g.x2plus + s[1]),
                      (Poly::variable(2) + (g.yminus + s[2])) * ginv};
  const Vec3<Poly> out = return_map(m, powers, in);
  PolyMap3<Real> r;
  r.comp[0] = out[0] - (g.x1plus + s[0]);
  r.comp[1] = out[1] - (g.x2plus + s[1]);
  r.comp[2] = out[2] * powers[2] - (g.yminus + s[2]);
  return r;
}

RVec shift_residual(const ModelT<Real>& m, const RVec& powers, const RVec& s) {
  const PolyMap3<Real> P = local_form(m, powers, s);
  return {P.comp[0][0], P.comp[1][0], P.comp[2].coeff(0, 0, 1)};
}

/// Newton solve for the shift; the residual is affine in s without tails,
/// so that case converges in one step.
RVec solve_shift(const ModelT<Real>& m, const RVec& powers) {
  RVec s{Real(0), Real(0), Real(0)};
  const Real h("1e-40");
  for (int it = 0; it < 60; ++it) {
    const RVec F = shift_residual(m, powers, s);
    if (max_abs(F) < Real("1e-300")) break;
    RMat J{};
    for (int j = 0; j < 3; ++j) {
      RVec sj = s;
      sj[j] += h;
      const RVec Fj = shift_residual(m, powers, sj);
      for (int i = 0; i < 3; ++i) J[i][j] = (Fj[i] - F[i]) / h;
    }
    const RVec ds = apply_linear(inverse3(J), F);
    for (int i = 0; i < 3; ++i) s[i] -= ds[i];
    if (max_abs(ds) <= Real("1e-320") * (1 + max_abs(s))) break;
  }
  return s;
}

void require_case(TangencyCase c) {
  if (c != TangencyCase::CaseI && c != TangencyCase::CaseII)
    throw Error(ErrorKind::InvalidCase,
                std::string("rescaling requires CaseI or CaseII, got ") + to_string(c));
}

Real gamma_for(const Model& base, double mu3) {
  return (Real(1) - Real(mu3)) / (Real(base.saddle.lambda1) * Real(base.saddle.lambda2));
}

void require_in_cap(int k, const Real& gamma) {
  using boost::multiprecision::abs;
  using boost::multiprecision::log10;
  const double log_scale = 2.0 * k * to_double(log10(abs(gamma)));
  if (log_scale > std::log10(kFloatCap)) {
    const int cap = static_cast<int>(std::floor(std::log10(kFloatCap) / (2.0 * to_double(log10(abs(gamma))))));
    throw Error(ErrorKind::FloatRange, "k = " + std::to_string(k) +
                                           " exceeds the float-range cap |gamma|^(2k) <= 1e300 (k <= " +
                                           std::to_string(cap) + ")");
  }
}

struct Chart {
  RescalingChart chart;
  PolyMap3<Real> local;  // T_k in (xi, eta) at the solved shift
};

Chart build_chart(int k, const ModelT<Real>& m, TangencyCase c, double sabotage) {
  require_case(c);
  const auto& g = m.global;
  if (g.d == 0) throw Error(ErrorKind::DegenerateD, "tangency coefficient d vanishes");
  if (c == TangencyCase::CaseI && (g.c1 == 0 || g.b2 == 0))
    throw Error(ErrorKind::DegenerateCoefficients, "CaseI rescaling needs c1 != 0 and b2 != 0");
  if (c == TangencyCase::CaseII && (g.b1 == 0 || g.a21_prime() == 0))
    throw Error(ErrorKind::DegenerateCoefficients, "CaseII rescaling needs b1 != 0 and a21' != 0");

  const RVec powers = saddle_powers(m, k);
  Chart out;
  RescalingChart& ch = out.chart;
  ch.k = k;
  ch.tcase = c;
  ch.shift = solve_shift(m, powers);
  out.local = local_form(m, powers, ch.shift);
  const PolyMap3<Real>& P = out.local;

  const Real q = P.comp[2].coeff(0, 0, 2);
  if (q == 0) throw Error(ErrorKind::DegenerateD, "vanishing quadratic term in the return map");
  const Real alpha3 = Real(-1) / q * Real(sabotage);
  const Real A[2][2] = {{P.comp[0][1], P.comp[0][2]}, {P.comp[1][1], P.comp[1][2]}};
  const Real b[2] = {P.comp[0][3], P.comp[1][3]};

  Real u1[2], u2[2];
  if (c == TangencyCase::CaseII) {
    for (int i = 0; i < 2; ++i) u1[i] = alpha3 * b[i];
    for (int i = 0; i < 2; ++i) u2[i] = A[i][0] * u1[0] + A[i][1] * u1[1];
  } else {
    const Real M3 = g.jacobian() * rpow(m.saddle.jacobian(), k);
    if (M3 == 0) throw Error(ErrorKind::DegenerateCoefficients, "CaseI rescaling needs J1 != 0");
    for (int i = 0; i < 2; ++i) u2[i] = alpha3 * b[i];
    for (int i = 0; i < 2; ++i) u1[i] = -(A[i][0] * u2[0] + A[i][1] * u2[1]) / M3;
  }
  if (u1[0] * u2[1] - u1[1] * u2[0] == 0)
    throw Error(ErrorKind::DegenerateCoefficients, "rescaling frame is singular");

  const Real zero(0);
  ch.frame = {{{u1[0], u2[0], zero}, {u1[1], u2[1], zero}, {zero, zero, alpha3}}};
  const Real ginv = Real(1) / powers[2];
  ch.base = {g.x1plus + ch.shift[0], g.x2plus + ch.shift[1], (g.yminus + ch.shift[2]) * ginv};
  ch.matrix = ch.frame;
  for (int j = 0; j < 3; ++j) ch.matrix[2][j] *= ginv;
  ch.inverse = inverse3(ch.matrix);

  using boost::multiprecision::log10;
  using boost::multiprecision::sqrt;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int j = 0; j < 3; ++j) {
    const Real n = sqrt(ch.matrix[0][j] * ch.matrix[0][j] + ch.matrix[1][j] * ch.matrix[1][j] +
                        ch.matrix[2][j] * ch.matrix[2][j]);
    const double l = to_double(log10(n));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  ch.log10_condition = hi - lo;
  return out;
}

/// M1 and M2 realised by the chart: the constant term and the linear
/// coupling a_v . b of the third component.
std::pair<Real, Real> realised_m12(const PolyMap3<Real>& P) {
  const Real q = P.comp[2].coeff(0, 0, 2);
  const Real M1 = -q * P.comp[2][0];
  const Real M2 = P.comp[2][1] * P.comp[0][3] + P.comp[2][2] * P.comp[1][3];
  return {M1, M2};
}

std::pair<Real, Real> realised_for(int k, const UnfoldingParamsT<Real>& mu, TangencyCase c,
                                   const ModelT<Real>& base) {
  const ModelT<Real> m = apply_unfolding(base, mu, c);
  const RVec powers = saddle_powers(m, k);
  return realised_m12(local_form(m, powers, solve_shift(m, powers)));
}

}  // namespace

Vec3<Real> RescalingChart::to_physical(const Vec3<Real>& X) const {
  RVec x = apply_linear(matrix, X);
  for (int i = 0; i < 3; ++i) x[i] += base[i];
  return x;
}

Vec3<Real> RescalingChart::to_rescaled(const Vec3<Real>& x) const {
  const RVec d{x[0] - base[0], x[1] - base[1], x[2] - base[2]};
  return apply_linear(inverse, d);
}

int rescaling_k_cap(const Model& base, double mu3) {
  using boost::multiprecision::abs;
  using boost::multiprecision::log10;
  const double lg = to_double(log10(abs(gamma_for(base, mu3))));
  return static_cast<int>(std::floor(std::log10(kFloatCap) / (2.0 * lg)));
}

UnfoldingParamsT<Real> params_from_target(int k, LimitTargets targets, double mu3, TangencyCase c,
                                          const Model& base, ParameterInversion inv) {
  require_case(c);
  const ModelT<Real> mb = base.cast<Real>();
  const auto& g = mb.global;
  if (g.d == 0) throw Error(ErrorKind::DegenerateD, "tangency coefficient d vanishes");
  const Real gamma = gamma_for(base, mu3);
  require_in_cap(k, gamma);
  if (c == TangencyCase::CaseI && g.c1 == 0)
    throw Error(ErrorKind::DegenerateCoefficients, "CaseI parameter inversion needs c1 != 0");
  if (c == TangencyCase::CaseII && g.b1 == 0)
    throw Error(ErrorKind::DegenerateCoefficients, "CaseII parameter inversion needs b1 != 0");

  const Real M1(targets.M1), M2(targets.M2);
  const Real l1k = rpow(mb.saddle.lambda1, k);
  const Real l2k = rpow(mb.saddle.lambda2, k);
  const Real gk = rpow(gamma, k);
  const Real pivot = c == TangencyCase::CaseI ? g.c1 : g.b1;

  UnfoldingParamsT<Real> mu;
  mu.mu3 = Real(mu3);
  if (inv == ParameterInversion::LeadingOrder) {
    mu.mu2 = M2 / (pivot * l1k * gk);
    const Real c1 = c == TangencyCase::CaseI ? g.c1 : mu.mu2;
    mu.mu1 = -M1 / (g.d * gk * gk) - l1k * c1 * g.x1plus;
    if (c == TangencyCase::CaseII) mu.mu1 += g.yminus / gk;
    return mu;
  }

  // The shift only depends on the linear block of T1, which mu does not touch.
  const Real mu2_base = c == TangencyCase::CaseI ? g.b1 : g.c1;
  const ModelT<Real> m0 = apply_unfolding(mb, {Real(0), mu2_base, mu.mu3}, c);
  const RVec s = solve_shift(m0, saddle_powers(m0, k));
  mu.mu2 = (M2 - g.c2 * g.b2 * rpow(mb.saddle.lambda2 * gamma, k)) / (pivot * l1k * gk);
  const Real c1 = c == TangencyCase::CaseI ? g.c1 : mu.mu2;
  mu.mu1 = (-M1 / (g.d * gk) + g.yminus) / gk - c1 * l1k * (g.x1plus + s[0]) -
           g.c2 * l2k * (g.x2plus + s[1]);
  if (mb.tails.is_zero()) return mu;

  // Tails couple mu into the shift and the coefficients: refine by Newton.
  using boost::multiprecision::abs;
  for (int it = 0; it < 40; ++it) {
    const auto [r1, r2] = realised_for(k, mu, c, mb);
    const Real e1 = r1 - M1, e2 = r2 - M2;
    if (abs(e1) <= Real("1e-30") * (1 + abs(M1)) && abs(e2) <= Real("1e-30") * (1 + abs(M2))) break;
    const Real h1 = Real("1e-60") / (gk * gk) + abs(mu.mu1) * Real("1e-60");
    const Real h2 = Real("1e-60") / (l1k * gk) + abs(mu.mu2) * Real("1e-60");
    UnfoldingParamsT<Real> p1 = mu, p2 = mu;
    p1.mu1 += h1;
    p2.mu2 += h2;
    const auto [a1, a2] = realised_for(k, p1, c, mb);
    const auto [b1, b2] = realised_for(k, p2, c, mb);
    const Real j11 = (a1 - r1) / h1, j21 = (a2 - r2) / h1;
    const Real j12 = (b1 - r1) / h2, j22 = (b2 - r2) / h2;
    const Real det = j11 * j22 - j12 * j21;
    if (det == 0) throw Error(ErrorKind::DegenerateCoefficients, "parameter inversion is singular");
    mu.mu1 -= (j22 * e1 - j12 * e2) / det;
    mu.mu2 -= (-j21 * e1 + j11 * e2) / det;
  }
  return mu;
}

double mu3_for_target_m3(int k, double M3, LimitTargets targets, TangencyCase c, const Model& base) {
  if (k <= 0) throw Error(ErrorKind::InsufficientRange, "k must be positive");
  double mu3 = 0.0;
  for (int it = 0; it < 60; ++it) {
    const UnfoldingParamsT<Real> mu = params_from_target(k, targets, mu3, c, base);
    const ModelT<Real> m = apply_unfolding(base.cast<Real>(), mu, c);
    const double ratio = M3 / to_double(m.global.jacobian());
    if (!(ratio > 0.0))
      throw Error(ErrorKind::DegenerateCoefficients,
                  "target M3 has the wrong sign for J1 of this model");
    const double next = 1.0 - std::pow(ratio, 1.0 / k);
    const bool done = std::abs(next - mu3) <= 1e-15;
    mu3 = next;
    if (done) break;
  }
  return mu3;
}

RescalingChart rescale_coords_case1(int k, const ModelT<Real>& unfolded) {
  return build_chart(k, unfolded, TangencyCase::CaseI, 1.0).chart;
}

RescalingChart rescale_coords_case2(int k, const ModelT<Real>& unfolded) {
  return build_chart(k, unfolded, TangencyCase::CaseII, 1.0).chart;
}

LeadingOrderScalings leading_order_scalings(int k, const ModelT<Real>& m, TangencyCase c) {
  require_case(c);
  const auto& g = m.global;
  const Real l1k = rpow(m.saddle.lambda1, k);
  const Real ginv = Real(1) / rpow(m.saddle.gamma, k);
  LeadingOrderScalings s;
  s.y = to_double(-ginv / g.d);
  if (c == TangencyCase::CaseI) {
    s.x1 = to_double(ginv / (g.c1 * g.d * l1k) * ginv);
    s.x2 = to_double(-g.b2 * ginv / g.d);
  } else {
    s.x1 = to_double(-g.b1 * ginv / g.d);
    s.x2 = to_double(-l1k * ginv * g.b1 * g.a21_prime() / g.d);
  }
  return s;
}

RescaledReturnMap::RescaledReturnMap(int k, LimitTargets targets, TangencyCase c, const Model& base,
                                     RescaledMapOptions opt)
    : RescaledReturnMap(k, params_from_target(k, targets, opt.mu3, c, base, opt.inversion), c, base,
                        opt, targets) {}

RescaledReturnMap::RescaledReturnMap(int k, const UnfoldingParamsT<Real>& mu, TangencyCase c,
                                     const Model& base, RescaledMapOptions opt,
                                     std::optional<LimitTargets> targets)
    : k_(k), case_(c), box_half_(opt.box_half), mu_(mu) {
  require_case(c);
  model_ = apply_unfolding(base.cast<Real>(), mu, c);
  require_in_cap(k, model_.saddle.gamma);
  model_d_ = model_.cast<double>();
  const std::optional<Strip> st = strip(k, model_d_);
  if (!st)
    throw Error(ErrorKind::EmptyStrip, "strip sigma_k^0 is empty for k = " + std::to_string(k));
  strip_ = *st;
  powers_ = saddle_powers(model_, k);

  Chart built = build_chart(k, model_, c, opt.sabotage);
  chart_ = built.chart;

  // R_k as polynomials: Phi, then T_k, then Phi^{-1}.
  Vec3<Poly> X{Poly::variable(0), Poly::variable(1), Poly::variable(2)};
  Vec3<Poly> x = apply_linear(chart_.matrix, X);
  for (int i = 0; i < 3; ++i) x[i] = x[i] + chart_.base[i];
  Vec3<Poly> y = return_map(model_, powers_, x);
  for (int i = 0; i < 3; ++i) y[i] = y[i] - chart_.base[i];
  const Vec3<Poly> Y = apply_linear(chart_.inverse, y);
  for (int i = 0; i < 3; ++i) {
    poly_exact_.comp[i] = Y[i];
    poly_.comp[i] = Y[i].cast<double>();
  }

  const double M3 = to_double(model_.global.jacobian() * rpow(model_.saddle.jacobian(), k));
  realised_.k = k;
  realised_.M3 = M3;
  realised_.M1 = to_double(poly_exact_.comp[2][0]);
  realised_.M2 = to_double(c == TangencyCase::CaseI ? poly_exact_.comp[2][2] : poly_exact_.comp[2][1]);
  params_ = realised_;
  if (targets) {
    params_.M1 = targets->M1;
    params_.M2 = targets->M2;
  }
}

std::optional<Vec3<Real>> RescaledReturnMap::evaluate_exact(const Vec3<Real>& X) const {
  const RVec x = chart_.to_physical(X);
  if (!strip_.box.contains(x)) return std::nullopt;
  return chart_.to_rescaled(return_map(model_, powers_, x));
}

std::optional<State3> RescaledReturnMap::evaluate(const State3& X) const {
  const auto r = evaluate_exact({Real(X[0]), Real(X[1]), Real(X[2])});
  if (!r) return std::nullopt;
  return State3{to_double((*r)[0]), to_double((*r)[1]), to_double((*r)[2])};
}

Vec3<Real> RescaledReturnMap::limit_exact(const Vec3<Real>& X) const {
  const Real M1(params_.M1), M2(params_.M2), M3(params_.M3);
  if (case_ == TangencyCase::CaseI) return {-M3 * X[1], X[2], M1 - X[0] + M2 * X[1] - X[2] * X[2]};
  return {X[2], X[0], M1 + M2 * X[0] + M3 * X[1] - X[2] * X[2]};
}

State3 RescaledReturnMap::limit(const State3& X) const {
  if (case_ == TangencyCase::CaseI) return limit_map_case1(X, params_.M1, params_.M2, params_.M3);
  return limit_map_case2(X, params_.M1, params_.M2, params_.M3);
}

std::vector<State3> limit_fixed_points(TangencyCase c, double M1, double M2, double M3) {
  require_case(c);
  // Y^2 + (1 - M2 - M3) Y - M1 = 0
  const double bq = 1.0 - M2 - M3;
  const double disc = bq * bq + 4.0 * M1;
  std::vector<State3> out;
  if (disc < 0.0) return out;
  const double sq = std::sqrt(disc);
  const double t = -0.5 * (bq + std::copysign(sq, bq));
  std::vector<double> roots;
  if (t != 0.0) {
    roots = {t, -M1 / t};
  } else {
    roots = {0.0};
  }
  std::sort(roots.begin(), roots.end());
  if (roots.size() == 2 && roots[0] == roots[1]) roots.pop_back();
  for (double p : roots) {
    if (c == TangencyCase::CaseI)
      out.push_back({-M3 * p, p, p});
    else
      out.push_back({p, p, p});
  }
  return out;
}

std::vector<State3> box_grid(double half, int per_axis) {
  std::vector<State3> out;
  if (per_axis <= 0) return out;
  auto coord = [&](int i) {
    return per_axis == 1 ? 0.0 : -half + 2.0 * half * i / (per_axis - 1);
  };
  out.reserve(static_cast<std::size_t>(per_axis) * per_axis * per_axis);
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int l = 0; l < per_axis; ++l) out.push_back({coord(i), coord(j), coord(l)});
  return out;
}

DeviationResult deviation(const RescaledReturnMap& R, const std::vector<State3>& grid, double h) {
  return deviation_between([&](const Vec3<Real>& x) { return R.evaluate_exact(x); },
                           [&](const Vec3<Real>& x) { return std::optional<Vec3<Real>>(R.limit_exact(x)); },
                           grid, h);
}

double fit_geometric_rate(const std::vector<int>& k, const std::vector<double>& y, std::size_t* used,
                          double floor) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k.size() && i < y.size(); ++i) {
    if (!(y[i] >= floor) || !std::isfinite(y[i])) continue;
    const double xv = k[i], yv = std::log(y[i]);
    n += 1;
    sx += xv;
    sy += yv;
    sxx += xv * xv;
    sxy += xv * yv;
  }
  if (used) *used = static_cast<std::size_t>(n);
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::exp((n * sxy - sx * sy) / den);
}

namespace {

RescalingRecord compute_record(int k, LimitTargets targets, TangencyCase c, const Model& base,
                               const ConvergenceOptions& opt, const std::vector<State3>& grid) {
  RescaledMapOptions mo;
  mo.inversion = opt.inversion;
  mo.mu3 = opt.mu3;
  mo.box_half = opt.box_half;
  mo.sabotage = opt.sabotage;
  const RescaledReturnMap R(k, targets, c, base, mo);
  const DeviationResult dev = deviation(R, grid, opt.fd_step);

  RescalingRecord rec;
  rec.k = k;
  rec.c0 = dev.c0;
  rec.c1 = dev.c1;
  rec.coverage = dev.coverage;
  rec.M3 = R.params().M3;
  rec.saddle_jacobian = to_double(R.unfolded_model().saddle.jacobian());
  rec.mu1 = to_double(R.mu().mu1);
  rec.mu2 = to_double(R.mu().mu2);
  rec.mu3 = to_double(R.mu().mu3);
  const auto J = detail::central_jacobian([&](const Vec3<Real>& x) { return R.evaluate_exact(x); },
                                          RVec{Real(0), Real(0), Real(0)}, Real(opt.fd_step));
  if (!J) throw Error(ErrorKind::OutOfStrip, "origin of the rescaled box lies outside the strip");
  rec.det_at_origin = to_double(det3(*J));
  // Reference: J1 of the family (before unfolding) times (l1 l2 g)^k.
  rec.reference_det = to_double(base.cast<Real>().global.jacobian() *
                                rpow(R.unfolded_model().saddle.jacobian(), k));
  rec.jacobian_residual =
      std::abs(std::abs(rec.det_at_origin) - std::abs(rec.reference_det)) / std::abs(rec.reference_det);
  return rec;
}

RescalingReport report_impl(int kmin, int kmax, LimitTargets targets, TangencyCase c,
                            const Model& base, const ConvergenceOptions& opt, bool parallel) {
  require_case(c);
  if (kmax < kmin) throw Error(ErrorKind::InsufficientRange, "kmax < kmin");
  RescalingReport rep;
  rep.tcase = c;
  rep.targets = targets;
  rep.mu3 = opt.mu3;
  rep.k_cap = rescaling_k_cap(base, opt.mu3);
  if (kmax > rep.k_cap)
    throw Error(ErrorKind::FloatRange, "kmax = " + std::to_string(kmax) +
                                           " exceeds the float-range cap |gamma|^(2k) <= 1e300 (k <= " +
                                           std::to_string(rep.k_cap) + ")");
  Model unfolded = base;
  unfolded.saddle.gamma = to_double(gamma_for(base, opt.mu3));
  const int k0 = min_return_index(unfolded);
  if (kmin < k0)
    throw Error(ErrorKind::EmptyStrip, "kmin = " + std::to_string(kmin) +
                                           " is below the first return index k0 = " + std::to_string(k0));
  const int n = kmax - kmin + 1;
  if (n < 4) throw Error(ErrorKind::InsufficientRange, "need at least 4 values of k");

  const std::vector<State3> grid = box_grid(opt.box_half, opt.grid_per_axis);
  rep.records.resize(static_cast<std::size_t>(n));
  std::exception_ptr failure;
  const int threads = parallel ? (opt.threads > 0 ? opt.threads : omp_get_max_threads()) : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    try {
      rep.records[static_cast<std::size_t>(i)] = compute_record(kmin + i, targets, c, base, opt, grid);
    } catch (...) {
#pragma omp critical(dlorenz_report_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<int> ks;
  std::vector<double> c0;
  for (const auto& r : rep.records) {
    ks.push_back(r.k);
    c0.push_back(r.c0);
  }
  rep.fitted_rate = fit_geometric_rate(ks, c0, &rep.fit_points);
  if (rep.fit_points < 4)
    throw Error(ErrorKind::InsufficientRange,
                "fewer than 4 values of k have a deviation above the rounding floor");
  const double g = to_double(gamma_for(base, opt.mu3));
  rep.predicted_rate = std::max(std::abs(base.saddle.lambda1), 1.0 / std::abs(g));
  return rep;
}

}  // namespace

RescalingReport convergence_report(int kmin, int kmax, LimitTargets targets, TangencyCase c,
                                   const Model& base, const ConvergenceOptions& opt) {
  return report_impl(kmin, kmax, targets, c, base, opt, true);
}

RescalingReport convergence_report_serial(int kmin, int kmax, LimitTargets targets, TangencyCase c,
                                          const Model& base, const ConvergenceOptions& opt) {
  return report_impl(kmin, kmax, targets, c, base, opt, false);
}

EquivalenceCheck case_equivalence_check(double M1, double M2, double M3, std::size_t orbit_length,
                                        State3 s0) {
  if (!(std::abs(M3) >= 0.01))
    throw Error(ErrorKind::SmallM3, "case equivalence needs |M3| >= 0.01");
  constexpr double kBall = 100.0;
  EquivalenceCheck out;
  State3 X = s0;
  State3 Z = case1_to_case2(s0, M3);
  for (std::size_t i = 0; i < orbit_length; ++i) {
    if (norm_inf(X) > kBall || norm_inf(Z) > kBall) {
      out.bounded = false;
      break;
    }
    const State3 Xn = limit_map_case1(X, M1, M2, M3);
    const State3 pushed = case1_to_case2(Xn, M3);
    out.max_error = std::max(out.max_error,
                             max_abs_diff(pushed, limit_map_case2(case1_to_case2(X, M3), M1, M2, M3)));
    Z = limit_map_case2(Z, M1, M2, M3);
    out.trajectory_error = std::max(out.trajectory_error, max_abs_diff(pushed, Z));
    X = Xn;
    ++out.steps;
  }
  if (out.bounded && (norm_inf(X) > kBall || norm_inf(Z) > kBall)) out.bounded = false;
  return out;
}

PeriodicOrbitCheck periodic_orbit_correspondence(const RescaledReturnMap& R, State3 guess) {
  const PolyMap3<Real>& P = R.polynomial_exact();
  RVec X{Real(guess[0]), Real(guess[1]), Real(guess[2])};
  for (int it = 0; it < 100; ++it) {
    const RVec F = P.step(X);
    RMat J = P.jacobian(X);
    RVec r;
    for (int i = 0; i < 3; ++i) {
      r[i] = F[i] - X[i];
      J[i][i] -= 1;
    }
    const RVec dx = apply_linear(inverse3(J), r);
    for (int i = 0; i < 3; ++i) X[i] -= dx[i];
    if (max_abs(dx) <= Real("1e-300") * (1 + max_abs(X))) break;
    if (max_abs(X) > Real(1e6)) throw Error(ErrorKind::Escape, "fixed-point search diverged");
  }
  const auto RX = R.evaluate_exact(X);
  if (!RX) throw Error(ErrorKind::OutOfStrip, "fixed point of R_k lies outside the strip");

  PeriodicOrbitCheck out;
  out.fixed_point = {to_double(X[0]), to_double(X[1]), to_double(X[2])};
  out.period = R.k() + kGlobalSteps;
  RVec diff;
  for (int i = 0; i < 3; ++i) diff[i] = (*RX)[i] - X[i];
  out.rescaled_residual = to_double(max_abs(diff));

  const RescalingChart& ch = R.chart();
  const RVec q = ch.to_physical(X);
  const auto orbit = single_round_orbit(R.unfolded_model(), q, R.k());
  for (int i = 0; i < 3; ++i) diff[i] = orbit.back()[i] - q[i];
  out.closure_physical = to_double(max_abs(diff));
  const RVec back = ch.to_rescaled(orbit.back());
  for (int i = 0; i < 3; ++i) diff[i] = back[i] - X[i];
  out.closure_rescaled = to_double(max_abs(diff));

  const State3 qd{to_double(q[0]), to_double(q[1]), to_double(q[2])};
  const auto orbit_d = single_round_orbit(R.unfolded_model().cast<double>(), qd, R.k());
  out.closure_physical_double = max_abs_diff(orbit_d.back(), qd);
  return out;
}

}  // namespace dlorenz
