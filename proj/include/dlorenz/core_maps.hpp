#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "dlorenz/types.hpp"

namespace dlorenz {

/// Parameters of the 3D Henon map (x, y, z) -> (y, z, M1 + B x + M2 y - z^2).
struct HenonParams {
  double M1 = 0.0;
  double M2 = 0.0;
  double B = 0.0;
};

/// Parameters of the inverse-form map (x, y, z) -> (y, z, M1h + M2h z + Bh x - y^2).
struct InverseHenonParams {
  double M1hat = 0.0;
  double M2hat = 0.0;
  double Bhat = 0.0;
};

/// Monic cubic lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct CubicPoly {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  std::complex<double> operator()(std::complex<double> z) const {
    return ((z + c2) * z + c1) * z + c0;
  }
};

struct FixedPointAnalysis {
  State3 point{};
  std::array<std::complex<double>, 3> multipliers{};
  CubicPoly charpoly;
};

State3 henon3d_step(const State3& s, const HenonParams& p);
Matrix3 henon3d_jacobian(const State3& s, const HenonParams& p);

/// Parameters of the inverse map. Throws ErrorKind::ZeroB when B == 0.
InverseHenonParams hatted_params(const HenonParams& p);
State3 henon3d_inverse_step(const State3& s, const InverseHenonParams& ip);
Matrix3 henon3d_inverse_jacobian(const State3& s, const InverseHenonParams& ip);

// The inverse-form map is f^{-1} written in the coordinates
//   sigma(x, y, z) = -(z, y, x) / B,
// i.e. henon3d_inverse_step(sigma(f(s)), hatted_params(p)) = sigma(s).
// Both throw ErrorKind::ZeroB when B == 0.
State3 to_inverse_coords(const State3& s, double B);
State3 from_inverse_coords(const State3& s, double B);

/// Two-dimensional Mira map (y, z) -> (z, M1h + M2h z - y^2).
std::pair<double, double> mira_step(std::pair<double, double> s,
                                    std::pair<double, double> m);

/// Limit map of the first kind: (X1, X2, Y) -> (-M3 X2, Y, M1 - X1 + M2 X2 - Y^2).
State3 limit_map_case1(const State3& s, double M1, double M2, double M3);
Matrix3 limit_map_case1_jacobian(const State3& s, double M1, double M2,
                                 double M3);

/// Limit map of the second kind: (X1, X2, Y) -> (Y, X1, M1 + M2 X1 + M3 X2 - Y^2).
State3 limit_map_case2(const State3& s, double M1, double M2, double M3);
Matrix3 limit_map_case2_jacobian(const State3& s, double M1, double M2,
                                 double M3);

// Conjugacies between the three quadratic families. With
//   h(X1, X2, Y) = (X2, -X1 / M3, Y)
// one has h o limit1 = limit2 o h, and with g(X1, X2, Y) = (X2, X1, Y)
// one has g o limit2 = henon(M1, M2, B = M3) o g.
State3 case1_to_case2(const State3& s, double M3);
State3 case2_to_case1(const State3& s, double M3);
State3 case2_to_henon(const State3& s);
State3 henon_to_case2(const State3& s);

/// Roots of a monic real cubic. The best-conditioned real root is polished
/// by Newton and deflated; the remaining quadratic is solved in a
/// cancellation-free form. Complex roots come out as a conjugate pair.
std::array<std::complex<double>, 3> cubic_roots(const CubicPoly& poly);

/// Characteristic polynomial of the Henon Jacobian at a diagonal point p:
/// lambda^3 + 2p lambda^2 - M2 lambda - B.
CubicPoly henon_charpoly(double p, const HenonParams& params);

/// Fixed points of the 3D Henon map.
///
/// A fixed point satisfies x' = y = x and y' = z = y, so every fixed point
/// lies on the diagonal x = y = z = p with p^2 - (B + M2 - 1) p - M1 = 0.
/// Returns 0, 1 (double root) or 2 points ordered by p.
std::vector<FixedPointAnalysis> fixed_points(const HenonParams& params);

}  // namespace dlorenz
