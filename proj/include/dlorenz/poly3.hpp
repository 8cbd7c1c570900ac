#pragma once

#include <array>
#include <cstddef>

#include "dlorenz/types.hpp"

namespace dlorenz {

namespace poly_detail {

struct Monomial {
  int e[3];
};

/// Monomials of total degree <= 3 in graded order.
inline constexpr std::array<Monomial, 20> kMonomials{{
    {{0, 0, 0}},
    {{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}},
    {{2, 0, 0}}, {{1, 1, 0}}, {{1, 0, 1}}, {{0, 2, 0}}, {{0, 1, 1}}, {{0, 0, 2}},
    {{3, 0, 0}}, {{2, 1, 0}}, {{2, 0, 1}}, {{1, 2, 0}}, {{1, 1, 1}},
    {{1, 0, 2}}, {{0, 3, 0}}, {{0, 2, 1}}, {{0, 1, 2}}, {{0, 0, 3}},
}};

constexpr int index_of(int a, int b, int c) {
  for (std::size_t i = 0; i < kMonomials.size(); ++i)
    if (kMonomials[i].e[0] == a && kMonomials[i].e[1] == b && kMonomials[i].e[2] == c)
      return static_cast<int>(i);
  return -1;
}

struct ProductTable {
  // product index for every pair, -1 when the degree exceeds 3
  int idx[20][20];
  constexpr ProductTable() : idx{} {
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j)
        idx[i][j] = index_of(kMonomials[i].e[0] + kMonomials[j].e[0],
                             kMonomials[i].e[1] + kMonomials[j].e[1],
                             kMonomials[i].e[2] + kMonomials[j].e[2]);
  }
};

inline constexpr ProductTable kProducts{};

}  // namespace poly_detail

/// Polynomial of total degree <= 3 in three variables. Products that would
/// exceed degree 3 set `truncated()`; the return-map composition never does.
template <class R>
class Poly3 {
 public:
  Poly3() { c_.fill(R(0)); }
  explicit Poly3(const R& constant) : Poly3() { c_[0] = constant; }

  static Poly3 variable(int i) {
    Poly3 p;
    p.c_[1 + i] = R(1);
    return p;
  }

  const R& coeff(int a, int b, int c) const { return c_[poly_detail::index_of(a, b, c)]; }
  R& coeff(int a, int b, int c) { return c_[poly_detail::index_of(a, b, c)]; }
  const R& operator[](std::size_t i) const { return c_[i]; }
  R& operator[](std::size_t i) { return c_[i]; }
  bool truncated() const { return truncated_; }

  Poly3 operator+(const Poly3& o) const {
    Poly3 r = *this;
    for (std::size_t i = 0; i < 20; ++i) r.c_[i] += o.c_[i];
    r.truncated_ = truncated_ || o.truncated_;
    return r;
  }
  Poly3 operator-(const Poly3& o) const {
    Poly3 r = *this;
    for (std::size_t i = 0; i < 20; ++i) r.c_[i] -= o.c_[i];
    r.truncated_ = truncated_ || o.truncated_;
    return r;
  }
  Poly3 operator*(const Poly3& o) const {
    Poly3 r;
    for (std::size_t i = 0; i < 20; ++i) {
      if (c_[i] == R(0)) continue;
      for (std::size_t j = 0; j < 20; ++j) {
        if (o.c_[j] == R(0)) continue;
        const int k = poly_detail::kProducts.idx[i][j];
        if (k < 0)
          r.truncated_ = true;
        else
          r.c_[k] += c_[i] * o.c_[j];
      }
    }
    r.truncated_ = r.truncated_ || truncated_ || o.truncated_;
    return r;
  }

  template <class S>
  Poly3 operator*(const S& s) const {
    Poly3 r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
  }
  template <class S>
  Poly3 operator+(const S& s) const {
    Poly3 r = *this;
    r.c_[0] += s;
    return r;
  }
  template <class S>
  Poly3 operator-(const S& s) const {
    Poly3 r = *this;
    r.c_[0] -= s;
    return r;
  }

  template <class V>
  V eval(const Vec3<V>& x) const {
    V acc(0);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& e = poly_detail::kMonomials[i].e;
      V term = V(c_[i]);
      for (int a = 0; a < e[0]; ++a) term *= x[0];
      for (int a = 0; a < e[1]; ++a) term *= x[1];
      for (int a = 0; a < e[2]; ++a) term *= x[2];
      acc += term;
    }
    return acc;
  }

  /// Partial derivative with respect to variable `v`, evaluated at x.
  template <class V>
  V deriv(int v, const Vec3<V>& x) const {
    V acc(0);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto& e = poly_detail::kMonomials[i].e;
      if (e[v] == 0) continue;
      V term = V(c_[i]) * V(e[v]);
      for (int var = 0; var < 3; ++var) {
        const int pw = var == v ? e[var] - 1 : e[var];
        for (int a = 0; a < pw; ++a) term *= x[var];
      }
      acc += term;
    }
    return acc;
  }

  template <class S>
  Poly3<S> cast() const {
    Poly3<S> r;
    for (std::size_t i = 0; i < 20; ++i) r[i] = static_cast<S>(c_[i]);
    return r;
  }

 private:
  std::array<R, 20> c_;
  bool truncated_ = false;
};

/// Map (X1, X2, Y) -> three cubic polynomials, with its analytic Jacobian.
template <class R>
struct PolyMap3 {
  std::array<Poly3<R>, 3> comp;

  Vec3<R> step(const Vec3<R>& x) const {
    return {comp[0].eval(x), comp[1].eval(x), comp[2].eval(x)};
  }
  Mat3<R> jacobian(const Vec3<R>& x) const {
    Mat3<R> J{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) J[i][j] = comp[i].deriv(j, x);
    return J;
  }
};

}  // namespace dlorenz
