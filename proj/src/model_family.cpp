#include "dlorenz/model_family.hpp"

#include <cmath>
#include <string>

namespace dlorenz {

const char* to_string(TangencyCase c) {
  switch (c) {
    case TangencyCase::Simple: return "Simple";
    case TangencyCase::CaseI: return "CaseI";
    case TangencyCase::CaseII: return "CaseII";
    case TangencyCase::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

bool TailPolynomials::is_zero() const {
  for (const auto& q : quadratic)
    for (const auto& row : q)
      for (double v : row)
        if (v != 0.0) return false;
  return cubic_u[0] == 0.0 && cubic_u[1] == 0.0 && cubic_u[2] == 0.0;
}

Model default_model(TangencyCase c) {
  Model m;
  m.saddle = {0.5, 0.4, 5.0};
  auto& g = m.global;
  g.a11 = -0.7;
  g.a12 = 0.65;
  g.a21 = 0.3;
  g.a22 = 1.0;
  g.b2 = 1.0;
  g.d = 1.0;
  g.x1plus = 0.3;
  g.x2plus = 0.2;
  g.yminus = 0.5;
  g.yplus = 0.0;
  if (c == TangencyCase::CaseII) {
    g.b1 = 1.0;
    g.c1 = 0.0;
    g.c2 = 1.0;
  } else {
    g.b1 = 0.0;
    g.c1 = 1.0;
    g.c2 = 0.5;
  }
  m.declared_case = c;
  return m;
}

State3 local_map_power(const State3& s, const SaddleParams& sp, int k) {
  if (k < 0) throw Error(ErrorKind::Config, "local_map_power requires k >= 0");
  if (s[2] != 0.0 &&
      k * std::log(std::abs(sp.gamma)) + std::log(std::abs(s[2])) > std::log(kDivergenceRadius))
    throw Error(ErrorKind::Overflow, "|gamma^k y| exceeds the divergence radius at k=" +
                                         std::to_string(k));
  return local_map_power_unchecked(s, sp, k);
}

TangencyCase classify_tangency(const GlobalMapCoefficients& g, double tol) {
  if (std::abs(g.d) <= tol)
    throw Error(ErrorKind::DegenerateD, "tangency is not quadratic: d == 0");
  const bool b1z = std::abs(g.b1) <= tol;
  const bool c1z = std::abs(g.c1) <= tol;
  const bool b2z = std::abs(g.b2) <= tol;
  const bool c2z = std::abs(g.c2) <= tol;
  if (!b1z && !c1z) return TangencyCase::Simple;
  if (b1z && !c1z && !b2z) return TangencyCase::CaseI;
  if (c1z && !b1z && !c2z) return TangencyCase::CaseII;
  return TangencyCase::Degenerate;
}

void validate_model(const Model& m) {
  const auto& s = m.saddle;
  if (!(std::abs(s.lambda2) > 0.0 && std::abs(s.lambda2) < std::abs(s.lambda1) &&
        std::abs(s.lambda1) < 1.0 && std::abs(s.gamma) > 1.0))
    throw Error(ErrorKind::ConditionA, "saddle violates 0<|lambda2|<|lambda1|<1<|gamma|");
  if (std::abs(m.global.d) <= 1e-12)
    throw Error(ErrorKind::DegenerateD, "tangency is not quadratic: d == 0");
  if (std::abs(m.global.jacobian()) <= 1e-12)
    throw Error(ErrorKind::DegenerateCoefficients, "global map is not a diffeomorphism: det == 0");
  if (m.tails.quadratic[2][2][2] != 0.0)
    throw Error(ErrorKind::Config, "tail u^2 term of the third component must be zero");
  for (std::size_t i = 0; i < 3; ++i)
    if (!(m.pi_plus_half[i] > 0.0) || !(m.pi_minus_half[i] > 0.0))
      throw Error(ErrorKind::Config, "neighbourhood half-widths must be positive");
}

Box3 pi_plus(const Model& m) {
  const State3 c{m.global.x1plus, m.global.x2plus, 0.0};
  const auto& h = m.pi_plus_half;
  return {{c[0] - h[0], c[1] - h[1], c[2] - h[2]}, {c[0] + h[0], c[1] + h[1], c[2] + h[2]}};
}

Box3 pi_minus(const Model& m) {
  const State3 c{0.0, 0.0, m.global.yminus};
  const auto& h = m.pi_minus_half;
  return {{c[0] - h[0], c[1] - h[1], c[2] - h[2]}, {c[0] + h[0], c[1] + h[1], c[2] + h[2]}};
}

std::optional<Strip> strip(int k, const Model& m) {
  if (k < 0) return std::nullopt;
  const Box3 plus = pi_plus(m);
  const Box3 minus = pi_minus(m);
  const double mult[3] = {m.saddle.lambda1, m.saddle.lambda2, m.saddle.gamma};
  Strip out;
  out.k = k;
  for (std::size_t i = 0; i < 3; ++i) {
    // {x : mult^k x in [lo, hi]}
    const double f = std::pow(mult[i], k);
    double lo = minus.lo[i] / f;
    double hi = minus.hi[i] / f;
    if (f < 0.0) std::swap(lo, hi);
    if (std::isnan(lo)) lo = -INFINITY;
    if (std::isnan(hi)) hi = INFINITY;
    out.box.lo[i] = std::max(lo, plus.lo[i]);
    out.box.hi[i] = std::min(hi, plus.hi[i]);
  }
  if (out.box.empty()) return std::nullopt;
  return out;
}

int min_return_index(const Model& m, int kmax) {
  for (int k = 0; k <= kmax; ++k)
    if (strip(k, m)) return k;
  throw Error(ErrorKind::EmptyStrip, "no nonempty strip up to k=" + std::to_string(kmax));
}

FirstReturnMap::FirstReturnMap(int k, Model model) : k_(k), model_(std::move(model)) {
  const int k0 = min_return_index(model_);
  auto s = strip(k, model_);
  if (k < k0 || !s)
    throw Error(ErrorKind::EmptyStrip, "strip sigma_k is empty for k=" + std::to_string(k) +
                                           " (k0=" + std::to_string(k0) + ")");
  strip_ = *s;
}

State3 FirstReturnMap::step(const State3& s) const {
  return global_map_step(local_map_power_unchecked(s, model_.saddle, k_), model_.global,
                         model_.tails);
}

State3 FirstReturnMap::step_iterated(const State3& s) const {
  State3 x = s;
  for (int i = 0; i < k_; ++i) x = local_map_step(x, model_.saddle);
  return global_map_step(x, model_.global, model_.tails);
}

Matrix3 FirstReturnMap::jacobian(const State3& s) const {
  const State3 mid = local_map_power_unchecked(s, model_.saddle, k_);
  const Matrix3 g = global_map_jacobian(mid, model_.global, model_.tails);
  const double f[3] = {std::pow(model_.saddle.lambda1, k_), std::pow(model_.saddle.lambda2, k_),
                       std::pow(model_.saddle.gamma, k_)};
  Matrix3 J{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) J[i][j] = g[i][j] * f[j];
  return J;
}

}  // namespace dlorenz
