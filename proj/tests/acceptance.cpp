// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "dlorenz/atlas.hpp"
#include "dlorenz/core_maps.hpp"
#include "dlorenz/lyapunov.hpp"
#include "dlorenz/model_family.hpp"
#include "dlorenz/rescaling.hpp"

using namespace dlorenz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int n, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  (%.2fs, limit %.0fs%s) %s\n", n, pass ? "PASS" : "FAIL", secs, limit_s,
              in_time ? "" : ", over time", o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

// 1: multipliers at the degenerate point.
Outcome degenerate_point() {
  const auto fps = fixed_points({-0.25, 1, 1});
  if (fps.size() != 1) return {false, "expected one fixed point, got " + std::to_string(fps.size())};
  const auto& fp = fps[0];
  double err = std::abs(fp.point[0] - 0.5);
  std::vector<std::complex<double>> m(fp.multipliers.begin(), fp.multipliers.end());
  std::sort(m.begin(), m.end(), [](auto a, auto b) { return a.real() < b.real(); });
  const double want[3] = {-1, -1, 1};
  for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(m[i] - want[i]));
  return {err <= 1e-10, fmt("max error %.3g (tol 1e-10)", err)};
}

// 2: inverse-map identity through the coordinates sigma(x, y, z) = -(z, y, x) / B.
Outcome inverse_identity() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> s(-2, 2), b(0.1, 3), coin(0, 1);
  std::vector<HenonParams> ps;
  for (int i = 0; i < 20; ++i) ps.push_back({s(rng), s(rng), b(rng) * (coin(rng) < 0.5 ? -1 : 1)});
  double err = 0;
  for (int i = 0; i < 1000; ++i) {
    const State3 x{s(rng), s(rng), s(rng)};
    for (const auto& p : ps) {
      const State3 y = henon3d_inverse_step(to_inverse_coords(henon3d_step(x, p), p.B), hatted_params(p));
      err = std::max(err, max_abs_diff(from_inverse_coords(y, p.B), x));
    }
  }
  return {err <= 1e-10, fmt("max round-trip error %.3g (tol 1e-10)", err)};
}

// 3: exponent sum equals ln|B| on ten bounded orbits.
Outcome sum_law() {
  SweepConfig ic;
  std::vector<std::pair<HenonParams, double>> res;
  for (double B : {0.55, 0.7, 0.85, 0.95, -0.6})
    for (double M2 : {0.6, 0.8, 0.9})
      for (double M1 : {0.0, 0.1, 0.3}) {
        if (res.size() == 10) break;
        const HenonParams p{M1, M2, B};
        LyapunovSpectrum sp;
        State3 x = initial_condition(p, ic, 0);
        if (lyapunov_spectrum_into(HenonMap{p}, x, 10000, 1000000, sp).escaped) continue;
        res.push_back({p, std::abs(sp.sum() - std::log(std::abs(B)))});
      }
  double worst = 0;
  for (const auto& r : res) worst = std::max(worst, r.second);
  return {res.size() == 10 && worst <= 1e-4,
          std::to_string(res.size()) + " bounded orbits, " + fmt("max |sum - ln|B|| %.3g (tol 1e-4)", worst)};
}

// 4: Lorenz-candidate component adjoining (-1/4, 1, 1) in the default 50^3 sweep.
Outcome lorenz_region() {
  SweepConfig cfg;  // defaults are the criterion's box, steps and budgets
  const Atlas a = sweep_grid(cfg);
  const auto comps = region_extract(a, is_lorenz_cell);
  const HenonParams ref{-0.25, 1, 1};
  std::size_t best = 0;
  std::array<double, 3> dist{};
  for (const auto& c : comps)
    if (c.size() >= 5 && c.adjoins(ref, 0.3) && c.size() > best) best = c.size(), dist = c.distance_to(ref);
  std::ostringstream os;
  os << comps.size() << " components";
  if (!comps.empty()) os << ", largest " << comps.front().size();
  os << "; adjoining component of size " << best;
  if (best) os << fmt(" at distance (%.3g, ", dist[0]) << fmt("%.3g, ", dist[1]) << fmt("%.3g)", dist[2]);
  const BoundaryStats bs = boundary_fraction(a, is_lorenz_cell);
  const EscapeMonotonicity em = escape_monotonicity(a);
  os << fmt("; boundary fraction %.3f", bs.fraction()) << fmt(", escape-monotone rows %.3f", em.fraction());
  return {best >= 5, os.str()};
}

// 5: geometric convergence of R_k to the limit maps.
Outcome rescaling_lemma() {
  bool ok = true;
  std::ostringstream os;
  for (auto c : {TangencyCase::CaseI, TangencyCase::CaseII})
    for (const LimitTargets t : {LimitTargets{0, 0}, LimitTargets{1, 0.5}}) {
      const auto rep = convergence_report(10, 24, t, c, default_model(c));
      const double c1_drop = rep.records.front().c1 / rep.records.back().c1;
      const bool pass = rep.fitted_rate >= 0.35 && rep.fitted_rate <= 0.65 && c1_drop >= 10;
      ok = ok && pass;
      os << to_string(c) << "(" << t.M1 << "," << t.M2 << ")" << fmt(": rate %.3f", rep.fitted_rate)
         << fmt(" C1 drop %.3gx; ", c1_drop);
    }
  return {ok, os.str() + "predicted 0.5, band [0.35, 0.65]"};
}

// 6: Jacobian law, under both readings of the constant J1.
Outcome jacobian_law() {
  double worst_det = 0, worst_saddle = 0;
  for (auto c : {TangencyCase::CaseI, TangencyCase::CaseII})
    for (double mu3 : {0.0, 0.05}) {
      ConvergenceOptions opt;
      opt.mu3 = mu3;
      const auto rep = convergence_report(12, 24, {0, 0}, c, default_model(c), opt);
      for (const auto& r : rep.records) {
        worst_det = std::max(worst_det, r.jacobian_residual);
        const double lit = std::pow(r.saddle_jacobian, r.k + 1);
        worst_saddle = std::max(worst_saddle, std::abs(std::abs(r.det_at_origin) - lit) / lit);
      }
    }
  return {worst_det <= 0.1 && worst_saddle <= 0.1,
          fmt("max rel. error with J1 = det T1: %.3g", worst_det) +
              fmt(", with J1 = l1 l2 g: %.3g (tol 0.1, k >= 12)", worst_saddle)};
}

// 7: fixed point of R_k closes a period-(k+1) orbit of the model.
Outcome periodic_orbit() {
  double worst = 0, worst_double = 0;
  for (auto c : {TangencyCase::CaseI, TangencyCase::CaseII}) {
    const RescaledReturnMap R(15, LimitTargets{1, 0.5}, c, default_model(c));
    const auto guesses = limit_fixed_points(c, 1, 0.5, R.params().M3);
    if (guesses.empty()) return {false, "limit map has no fixed point"};
    const auto chk = periodic_orbit_correspondence(R, guesses[0]);
    if (chk.period != 16) return {false, "wrong period"};
    worst = std::max(worst, chk.closure_physical);
    worst_double = std::max(worst_double, chk.closure_physical_double);
  }
  return {worst <= 1e-8 && worst_double <= 1e-8,
          fmt("closure %.3g", worst) + fmt(" (extended precision), %.3g (double); tol 1e-8, period 16", worst_double)};
}

// 8: the two limit maps are conjugate.
Outcome limit_equivalence() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1), m3(0.1, 2);
  double worst = 0;
  int done = 0, tries = 0;
  while (done < 20 && tries < 10000) {
    ++tries;
    const double M3 = m3(rng) * (u(rng) < 0 ? -1 : 1);
    const auto e = case_equivalence_check(0.5 * u(rng), 1 + 0.5 * u(rng), M3, 100);
    if (!e.bounded || e.steps < 100) continue;
    ++done;
    worst = std::max(worst, e.max_error);
  }
  return {done == 20 && worst <= 1e-10,
          std::to_string(done) + " bounded orbits (" + std::to_string(tries) + " draws), " +
              fmt("max error %.3g (tol 1e-10)", worst)};
}

// 9: tangency classification and single-condition mutations.
Outcome tangency_classes() {
  const auto c1 = default_model(TangencyCase::CaseI).global;
  const auto c2 = default_model(TangencyCase::CaseII).global;
  auto simple = c1;
  simple.b1 = 0.4;
  auto degenerate = c1;
  degenerate.c1 = 0;
  int wrong = 0, checks = 0;
  auto expect = [&](const GlobalMapCoefficients& g, TangencyCase want) {
    ++checks;
    if (classify_tangency(g) != want) ++wrong;
  };
  expect(c1, TangencyCase::CaseI);
  expect(c2, TangencyCase::CaseII);
  expect(simple, TangencyCase::Simple);
  expect(degenerate, TangencyCase::Degenerate);
  // mutations: flip exactly one zero / nonzero condition
  auto m = c1;
  m.b1 = 1e-3;
  expect(m, TangencyCase::Simple);
  m = c1;
  m.c1 = 0;
  expect(m, TangencyCase::Degenerate);
  m = c1;
  m.b2 = 0;
  expect(m, TangencyCase::Degenerate);
  m = c2;
  m.c1 = 1e-3;
  expect(m, TangencyCase::Simple);
  m = c2;
  m.b1 = 0;
  expect(m, TangencyCase::Degenerate);
  m = c2;
  m.c2 = 0;
  expect(m, TangencyCase::Degenerate);
  m = simple;
  m.c1 = 0;
  expect(m, TangencyCase::CaseII);
  m = simple;
  m.b1 = 0;
  expect(m, TangencyCase::CaseI);
  bool d_rejected = false;
  try {
    auto z = c1;
    z.d = 0;
    classify_tangency(z);
  } catch (const Error& e) {
    d_rejected = e.kind() == ErrorKind::DegenerateD;
  }
  return {wrong == 0 && d_rejected,
          std::to_string(checks - wrong) + "/" + std::to_string(checks) + " patterns, d = 0 " +
              (d_rejected ? "rejected" : "NOT rejected")};
}

// 10: the rescaled map reproduces the limit-map classification.
Outcome delta_k() {
  DeltaKConfig cfg;  // k = 18, 20 x 20 targets, default budgets
  cfg.target_M3 = 0.7;
  const auto rep = delta_k_scan(cfg, default_model(TangencyCase::CaseI));
  const auto& s = rep.slices.at(0);
  return {s.agreement >= 0.9, fmt("agreement %.4f (need 0.9)", s.agreement) + fmt(", M3 %.6f", s.M3) + ", candidates " +
                                  std::to_string(s.limit_candidates) + " limit / " +
                                  std::to_string(s.rescaled_candidates) + " rescaled / " +
                                  std::to_string(s.shared_candidates) + " shared"};
}

}  // namespace

int main() {
  criterion(1, 1, degenerate_point);
  criterion(2, 1, inverse_identity);
  criterion(3, 30, sum_law);
  criterion(4, 15 * 60, lorenz_region);
  criterion(5, 120, rescaling_lemma);
  criterion(6, 30, jacobian_law);
  criterion(7, 10, periodic_orbit);
  criterion(8, 1, limit_equivalence);
  criterion(9, 1, tangency_classes);
  criterion(10, 10 * 60, delta_k);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
