#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dlorenz/error.hpp"
#include "dlorenz/types.hpp"

namespace dlorenz {

enum class TangencyCase { Simple, CaseI, CaseII, Degenerate };

const char* to_string(TangencyCase c);

/// Multipliers of the saddle O: 0 < |lambda2| < |lambda1| < 1 < |gamma|.
template <class R>
struct SaddleParamsT {
  R lambda1{0.5};
  R lambda2{0.4};
  R gamma{5.0};

  /// Jacobian of the local map at O, lambda1 * lambda2 * gamma.
  R jacobian() const { return lambda1 * lambda2 * gamma; }
};

/// Taylor coefficients of the global map T1 : Pi- -> Pi+.
template <class R>
struct GlobalMapCoefficientsT {
  R a11{}, a12{}, a21{}, a22{};
  R b1{}, b2{};
  R c1{}, c2{};
  R d{};
  R x1plus{}, x2plus{};
  R yminus{};
  R yplus{};

  /// det [[a11 a12 b1] [a21 a22 b2] [c1 c2 0]]: the Jacobian of T1 at M-.
  R jacobian() const {
    return a11 * (a22 * R(0) - b2 * c2) - a12 * (a21 * R(0) - b2 * c1) +
           b1 * (a21 * c2 - a22 * c1);
  }

  /// a21 - (b2 / b1) a11; must be nonzero for the second tangency case.
  R a21_prime() const { return a21 - (b2 / b1) * a11; }
};

template <class R>
struct UnfoldingParamsT {
  R mu1{};
  R mu2{};
  R mu3{};
};

using SaddleParams = SaddleParamsT<double>;
using GlobalMapCoefficients = GlobalMapCoefficientsT<double>;
using UnfoldingParams = UnfoldingParamsT<double>;

/// Higher-order remainder terms of T1, all zero by default. With
/// z = (x1, x2, u), u = y - y^-, component i of T1 gains
///   z^T quadratic[i] z + cubic_u[i] * u^3.
/// quadratic[2][2][2] must stay zero: the u^2 term of the third component
/// is the tangency coefficient d.
struct TailPolynomials {
  std::array<Matrix3, 3> quadratic{};
  State3 cubic_u{};

  bool is_zero() const;
};

struct Box3 {
  State3 lo{};
  State3 hi{};

  bool empty() const { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }

  template <class V>
  bool contains(const Vec3<V>& p) const {
    for (std::size_t i = 0; i < 3; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

/// A diffeomorphism family realised by a linear local map T0 near the saddle
/// and a quadratic global map T1 from Pi- (around M- = (0, 0, y^-)) to Pi+
/// (around M+ = (x1^+, x2^+, 0)).
template <class R>
struct ModelT {
  SaddleParamsT<R> saddle;
  GlobalMapCoefficientsT<R> global;
  TailPolynomials tails;
  State3 pi_plus_half{0.1, 0.1, 0.1};
  State3 pi_minus_half{0.1, 0.1, 0.1};
  TangencyCase declared_case = TangencyCase::CaseI;

  template <class S>
  ModelT<S> cast() const {
    ModelT<S> m;
    m.saddle = {S(saddle.lambda1), S(saddle.lambda2), S(saddle.gamma)};
    const auto& g = global;
    m.global = {S(g.a11), S(g.a12), S(g.a21), S(g.a22), S(g.b1),     S(g.b2), S(g.c1),
                S(g.c2),  S(g.d),   S(g.x1plus), S(g.x2plus), S(g.yminus), S(g.yplus)};
    m.tails = tails;
    m.pi_plus_half = pi_plus_half;
    m.pi_minus_half = pi_minus_half;
    m.declared_case = declared_case;
    return m;
  }
};

using Model = ModelT<double>;

/// Model with the documented default coefficients for the given case.
/// Both defaults have det(T1 at M-) = 1 and a conservative saddle
/// (lambda1, lambda2, gamma) = (0.5, 0.4, 5).
Model default_model(TangencyCase c);

// ---------------------------------------------------------------------------
// Pointwise maps. V is the value type (double, an extended-precision real or
// a polynomial over it); R is the coefficient type.

template <class R, class V>
Vec3<V> local_map_step(const Vec3<V>& s, const SaddleParamsT<R>& sp) {
  return {s[0] * sp.lambda1, s[1] * sp.lambda2, s[2] * sp.gamma};
}

/// T0^k for the diagonal local map, exact for every k.
template <class R, class V>
Vec3<V> local_map_power_unchecked(const Vec3<V>& s, const SaddleParamsT<R>& sp, int k) {
  using std::pow;
  return {s[0] * R(pow(sp.lambda1, k)), s[1] * R(pow(sp.lambda2, k)),
          s[2] * R(pow(sp.gamma, k))};
}

/// T0^k with an overflow check on |gamma^k y| done in the log domain.
/// Throws ErrorKind::Overflow when it would exceed the divergence radius.
State3 local_map_power(const State3& s, const SaddleParams& sp, int k);

template <class V>
V tail_term(const Matrix3& q, double cubic, const V& x1, const V& x2, const V& u) {
  const V* z[3] = {&x1, &x2, &u};
  V acc = u * 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (q[i][j] != 0.0) acc = acc + (*z[i]) * (*z[j]) * q[i][j];
  if (cubic != 0.0) acc = acc + u * u * u * cubic;
  return acc;
}

/// Global map T1 in absolute local coordinates (input near M-, output near M+).
template <class R, class V>
Vec3<V> global_map_step(const Vec3<V>& s, const GlobalMapCoefficientsT<R>& g,
                        const TailPolynomials& tails) {
  const V& x1 = s[0];
  const V& x2 = s[1];
  const V u = s[2] - g.yminus;
  Vec3<V> out{x1 * g.a11 + x2 * g.a12 + u * g.b1 + g.x1plus,
              x1 * g.a21 + x2 * g.a22 + u * g.b2 + g.x2plus,
              x1 * g.c1 + x2 * g.c2 + u * u * g.d + g.yplus};
  if (!tails.is_zero())
    for (std::size_t i = 0; i < 3; ++i)
      out[i] = out[i] + tail_term(tails.quadratic[i], tails.cubic_u[i], x1, x2, u);
  return out;
}

/// Differential of T1 at an absolute point.
template <class R>
Mat3<R> global_map_jacobian(const Vec3<R>& s, const GlobalMapCoefficientsT<R>& g,
                            const TailPolynomials& tails) {
  const R u = s[2] - g.yminus;
  Mat3<R> J{{{g.a11, g.a12, g.b1}, {g.a21, g.a22, g.b2}, {g.c1, g.c2, R(2) * g.d * u}}};
  if (!tails.is_zero()) {
    const Vec3<R> z{s[0], s[1], u};
    for (std::size_t i = 0; i < 3; ++i) {
      const Matrix3& q = tails.quadratic[i];
      for (std::size_t j = 0; j < 3; ++j) {
        R acc(0);
        for (std::size_t l = 0; l < 3; ++l) acc += (q[j][l] + q[l][j]) * z[l];
        J[i][j] += acc;
      }
      J[i][2] += R(3) * tails.cubic_u[i] * u * u;
    }
  }
  return J;
}

/// Throws ErrorKind::DegenerateD when d == 0 (|d| <= 1e-12).
TangencyCase classify_tangency(const GlobalMapCoefficients& g, double zero_tol = 1e-12);

/// Checks condition A, d != 0, det(T1) != 0 and the tail shape.
/// Throws ErrorKind::ConditionA / DegenerateD / DegenerateCoefficients / Config.
void validate_model(const Model& m);

/// Sets y^+ = mu1, b1 = mu2 (CaseI) or c1 = mu2 (CaseII), and rescales gamma
/// so that 1 - lambda1 lambda2 gamma = mu3 with lambda1, lambda2 fixed.
template <class R>
ModelT<R> apply_unfolding(const ModelT<R>& base, const UnfoldingParamsT<R>& mu,
                          TangencyCase c) {
  if (c != TangencyCase::CaseI && c != TangencyCase::CaseII)
    throw Error(ErrorKind::InvalidCase, "unfolding requires CaseI or CaseII");
  ModelT<R> m = base;
  m.global.yplus = mu.mu1;
  if (c == TangencyCase::CaseI)
    m.global.b1 = mu.mu2;
  else
    m.global.c1 = mu.mu2;
  m.saddle.gamma = (R(1) - mu.mu3) / (m.saddle.lambda1 * m.saddle.lambda2);
  m.declared_case = c;
  using std::abs;
  const auto& s = m.saddle;
  if (!(abs(s.lambda2) > R(0) && abs(s.lambda2) < abs(s.lambda1) &&
        abs(s.lambda1) < R(1) && abs(s.gamma) > R(1)))
    throw Error(ErrorKind::ConditionA, "unfolded saddle violates 0<|l2|<|l1|<1<|gamma|");
  return m;
}

/// sigma_k^0 = T0^{-k}(Pi-) cap Pi+.
struct Strip {
  Box3 box;
  int k = 0;
};

Box3 pi_plus(const Model& m);
Box3 pi_minus(const Model& m);

/// Exact strip for the diagonal local map; nullopt when empty.
std::optional<Strip> strip(int k, const Model& m);

/// Smallest k whose strip is nonempty (strips stay nonempty from there on for
/// symmetric neighbourhoods). Throws ErrorKind::EmptyStrip if none up to kmax.
int min_return_index(const Model& m, int kmax = 4096);

/// n0: number of model iterations realised by one application of T1.
inline constexpr int kGlobalSteps = 1;

/// First-return map T_k = T1 o T0^k on the strip sigma_k^0.
class FirstReturnMap {
 public:
  /// Throws ErrorKind::EmptyStrip when k < k0.
  FirstReturnMap(int k, Model model);

  State3 step(const State3& s) const;
  Matrix3 jacobian(const State3& s) const;
  /// T1(T0(...T0(s))) one local step at a time.
  State3 step_iterated(const State3& s) const;

  bool in_strip(const State3& s) const { return strip_.box.contains(s); }
  const Strip& strip_box() const { return strip_; }
  int k() const { return k_; }
  const Model& model() const { return model_; }

 private:
  int k_;
  Model model_;
  Strip strip_;
};

/// Orbit of the full model through one return: k local steps then T1.
/// Returns k + kGlobalSteps + 1 points, the first being s.
template <class R>
std::vector<Vec3<R>> single_round_orbit(const ModelT<R>& m, const Vec3<R>& s, int k) {
  std::vector<Vec3<R>> pts{s};
  Vec3<R> x = s;
  for (int i = 0; i < k; ++i) {
    x = local_map_step(x, m.saddle);
    pts.push_back(x);
  }
  x = global_map_step(x, m.global, m.tails);
  pts.push_back(x);
  return pts;
}

}  // namespace dlorenz
