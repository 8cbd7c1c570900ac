#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "dlorenz/core_maps.hpp"
#include "dlorenz/error.hpp"

using namespace dlorenz;

namespace {

// Hand-written reference for the forward map, independent of the library.
State3 henon_ref(const State3& s, double M1, double M2, double B) {
  return {s[1], s[2], M1 + B * s[0] + M2 * s[1] - s[2] * s[2]};
}

std::vector<double> sorted_real_parts(const std::array<std::complex<double>, 3>& m) {
  std::vector<double> v{m[0].real(), m[1].real(), m[2].real()};
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("henon3d_step examples") {
  CHECK(henon3d_step({0, 0, 0}, {7, 0, 0}) == State3{0, 0, 7});
  const State3 fp = henon3d_step({0.5, 0.5, 0.5}, {-0.25, 1, 1});
  CHECK(max_abs_diff(fp, {0.5, 0.5, 0.5}) == 0.0);
  CHECK(henon3d_step({1, 2, 3}, {0, 1, 1}) == State3{2, 3, -6});
}

TEST_CASE("henon3d_jacobian has determinant B everywhere") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 500; ++i) {
    const HenonParams p{u(rng), u(rng), u(rng)};
    const State3 s{u(rng), u(rng), u(rng)};
    const Matrix3 J = henon3d_jacobian(s, p);
    CHECK(det3(J) == doctest::Approx(p.B).epsilon(1e-14));
    // Central differences of the reference map.
    const double h = 1e-6;
    for (std::size_t c = 0; c < 3; ++c) {
      State3 a = s, b = s;
      a[c] += h;
      b[c] -= h;
      const State3 fa = henon_ref(a, p.M1, p.M2, p.B), fb = henon_ref(b, p.M1, p.M2, p.B);
      for (std::size_t r = 0; r < 3; ++r) CHECK(J[r][c] == doctest::Approx((fa[r] - fb[r]) / (2 * h)).epsilon(1e-6));
    }
  }
  const Matrix3 J = henon3d_jacobian({9, 9, 0}, {0, 1, 1});
  CHECK(J[2] == std::array<double, 3>{1, 1, 0});
}

TEST_CASE("hatted_params examples") {
  const auto a = hatted_params({4, 3, 2});
  CHECK(a.M1hat == 1.0);
  CHECK(a.M2hat == -1.5);
  CHECK(a.Bhat == 0.5);
  const auto b = hatted_params({0, 0, 1});
  CHECK((b.M1hat == 0.0 && b.M2hat == 0.0 && b.Bhat == 1.0));
  const auto c = hatted_params({1, -1, -1});
  CHECK((c.M1hat == 1.0 && c.M2hat == -1.0 && c.Bhat == -1.0));
  try {
    hatted_params({1, 1, 0});
    FAIL("expected zero-B error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroB);
  }
}

TEST_CASE("inverse map examples and round trip") {
  CHECK(henon3d_inverse_step({0, 0, 0}, {2.5, 0, 0}) == State3{0, 0, 2.5});
  CHECK(henon3d_inverse_step({1, 0, 0}, {0, 0, 1}) == State3{0, 0, 1});

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const HenonParams p{0.1, 0.85, 0.7};
  const auto ip = hatted_params(p);
  for (int i = 0; i < 200; ++i) {
    const State3 s{u(rng), u(rng), u(rng)};
    const State3 r = henon3d_inverse_step(to_inverse_coords(henon3d_step(s, p), p.B), ip);
    CHECK(max_abs_diff(from_inverse_coords(r, p.B), s) <= 1e-12);
    // Oracle: explicit f^{-1}(X, Y, Z) = ((Z - M1 - M2 X + Y^2) / B, X, Y).
    const State3 f = henon3d_step(s, p);
    const State3 back{(f[2] - p.M1 - p.M2 * f[0] + f[1] * f[1]) / p.B, f[0], f[1]};
    CHECK(max_abs_diff(from_inverse_coords(r, p.B), back) <= 1e-12);
  }
}

TEST_CASE("inverse round trip property for |coords| <= 10, |B| >= 0.1") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10), ub(0.1, 3), sign(-1, 1);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    const double B = ub(rng) * (sign(rng) < 0 ? -1 : 1);
    const HenonParams p{u(rng) * 0.2, u(rng) * 0.2, B};
    const auto ip = hatted_params(p);
    for (int i = 0; i < 100; ++i) {
      const State3 s{u(rng), u(rng), u(rng)};
      const State3 r = henon3d_inverse_step(to_inverse_coords(henon3d_step(s, p), p.B), ip);
      worst = std::max(worst, max_abs_diff(from_inverse_coords(r, p.B), s) / std::max(1.0, norm_inf(s) * norm_inf(s)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("inverse coordinates reject B = 0 and round trip") {
  CHECK_THROWS_AS(to_inverse_coords({1, 2, 3}, 0.0), Error);
  const State3 s{1, -2, 3};
  CHECK(max_abs_diff(from_inverse_coords(to_inverse_coords(s, 0.3), 0.3), s) <= 1e-15);
}

TEST_CASE("mira_step examples and projection of the zero-Bhat inverse map") {
  const auto a = mira_step({0, 0}, {0.3, 0.7});
  CHECK((a.first == 0.0 && a.second == 0.3));
  const auto b = mira_step({1, 1}, {1, 1});
  CHECK((b.first == 1.0 && b.second == 1.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 200; ++i) {
    const InverseHenonParams ip{u(rng), u(rng), 0.0};
    const State3 s{u(rng), u(rng), u(rng)};
    const State3 r = henon3d_inverse_step(s, ip);
    const auto m = mira_step({s[1], s[2]}, {ip.M1hat, ip.M2hat});
    CHECK(r[1] == m.first);
    CHECK(r[2] == m.second);
  }
}

TEST_CASE("limit map examples") {
  CHECK(limit_map_case1({0, 0, 0}, 0, 0, 0) == State3{0, 0, 0});
  CHECK(limit_map_case1({1, 1, 1}, 1, 1, 1) == State3{-1, 1, 0});
  CHECK(limit_map_case2({0, 0, 0}, 0.4, 0, 0) == State3{0, 0, 0.4});
  CHECK(limit_map_case2({1, 2, 3}, 0, 1, 1) == State3{3, 1, -6});
}

TEST_CASE("documented conjugacies hold pointwise") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2, 2), um(0.1, 2);
  for (int i = 0; i < 300; ++i) {
    const double M1 = u(rng), M2 = u(rng), M3 = um(rng) * (u(rng) < 0 ? -1 : 1);
    const State3 s{u(rng), u(rng), u(rng)};
    const State3 lhs = case1_to_case2(limit_map_case1(s, M1, M2, M3), M3);
    const State3 rhs = limit_map_case2(case1_to_case2(s, M3), M1, M2, M3);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * std::max(1.0, norm_inf(lhs)));
    CHECK(max_abs_diff(case2_to_case1(case1_to_case2(s, M3), M3), s) <= 1e-14 * std::max(1.0, norm_inf(s)));

    const State3 g1 = case2_to_henon(limit_map_case2(s, M1, M2, M3));
    const State3 g2 = henon3d_step(case2_to_henon(s), {M1, M2, M3});
    CHECK(max_abs_diff(g1, g2) <= 1e-14 * std::max(1.0, norm_inf(g1)));
    CHECK(henon_to_case2(case2_to_henon(s)) == s);
  }
}

TEST_CASE("cubic_roots on known polynomials") {
  // (l - 1)(l + 1)^2 = l^3 + l^2 - l - 1
  const auto r = cubic_roots({1, -1, -1});
  const auto v = sorted_real_parts(r);
  CHECK(v[0] == doctest::Approx(-1).epsilon(1e-7));
  CHECK(v[1] == doctest::Approx(-1).epsilon(1e-7));
  CHECK(v[2] == doctest::Approx(1).epsilon(1e-12));
  // (l - 2)(l^2 + 1)
  const auto c = cubic_roots({-2, 1, -2});
  int complex_count = 0;
  for (const auto& z : c) {
    CHECK(std::abs(CubicPoly{-2, 1, -2}(z)) <= 1e-12);
    if (std::abs(z.imag()) > 1e-9) ++complex_count;
  }
  CHECK(complex_count == 2);
}

TEST_CASE("fixed_points examples") {
  const auto d = fixed_points({-0.25, 1, 1});
  REQUIRE(d.size() == 1);
  CHECK(std::abs(d[0].point[0] - 0.5) <= 1e-10);
  const auto v = sorted_real_parts(d[0].multipliers);
  CHECK(std::abs(v[0] + 1) <= 1e-10);
  CHECK(std::abs(v[1] + 1) <= 1e-10);
  CHECK(std::abs(v[2] - 1) <= 1e-10);
  for (const auto& z : d[0].multipliers) CHECK(std::abs(z.imag()) <= 1e-10);

  CHECK(fixed_points({-1, 0, 0}).empty());
}

TEST_CASE("fixed point multipliers: charpoly residual and product equals B") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int seen = 0;
  for (int i = 0; i < 400; ++i) {
    const HenonParams p{u(rng), u(rng), u(rng)};
    for (const auto& fp : fixed_points(p)) {
      ++seen;
      const double x = fp.point[0];
      CHECK(max_abs_diff(henon3d_step(fp.point, p), fp.point) <= 1e-12 * std::max(1.0, x * x));
      std::complex<double> prod = 1;
      for (const auto& z : fp.multipliers) {
        CHECK(std::abs(fp.charpoly(z)) <= 1e-10);
        prod *= z;
      }
      CHECK(std::abs(prod - p.B) <= 1e-10);
      // charpoly against the characteristic polynomial of the Jacobian
      const Matrix3 J = henon3d_jacobian(fp.point, p);
      CHECK(fp.charpoly.c2 == doctest::Approx(-(J[0][0] + J[1][1] + J[2][2])));
      CHECK(fp.charpoly.c0 == doctest::Approx(-det3(J)));
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("no fixed points off the diagonal (residual search)") {
  // The map forces x' = y and y' = z, so f(s) = s implies x = y = z. Search a
  // coarse grid for off-diagonal near-fixed points of several parameter sets.
  const std::vector<HenonParams> ps{{-0.25, 1, 1}, {0.1, 0.85, 0.7}, {0.5, 0.2, -0.6}};
  for (const auto& p : ps) {
    double best_off = 1e9;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j)
        for (int l = -20; l <= 20; ++l) {
          const State3 s{i * 0.1, j * 0.1, l * 0.1};
          const double off = std::max(std::abs(s[0] - s[1]), std::abs(s[1] - s[2]));
          if (off < 0.05) continue;
          best_off = std::min(best_off, max_abs_diff(henon3d_step(s, p), s));
        }
    CHECK(best_off >= 0.05);
  }
}
