#include "dlorenz/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "dlorenz/error.hpp"

namespace dlorenz {

void TangentFrame::advance(const Matrix3& jac) {
  // v_j = J q_j, then modified Gram-Schmidt on the columns.
  Matrix3 v{};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      v[r][c] = jac[r][0] * q_[0][c] + jac[r][1] * q_[1][c] + jac[r][2] * q_[2][c];

  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t l = 0; l < j; ++l) {
      const double proj = q_[0][l] * v[0][j] + q_[1][l] * v[1][j] + q_[2][l] * v[2][j];
      for (std::size_t r = 0; r < 3; ++r) v[r][j] -= proj * q_[r][l];
    }
    const double nrm = std::sqrt(v[0][j] * v[0][j] + v[1][j] * v[1][j] + v[2][j] * v[2][j]);
    log_sum_[j] += std::log(nrm);
    for (std::size_t r = 0; r < 3; ++r) q_[r][j] = v[r][j] / nrm;
  }
}

namespace detail {

LyapunovSpectrum finish_spectrum(const TangentFrame& frame, std::size_t n,
                                 std::size_t transient) {
  LyapunovSpectrum out;
  out.iterations_used = n;
  out.transient_discarded = transient;
  if (n == 0) return out;
  const auto& ls = frame.log_sums();
  for (std::size_t i = 0; i < 3; ++i) out.exponents[i] = ls[i] / static_cast<double>(n);
  std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
  return out;
}

void throw_escape(std::size_t iteration) {
  throw Error(ErrorKind::Escape,
              "orbit escaped the divergence ball at iterate " + std::to_string(iteration));
}

AttractorClass decide_class(const LyapunovSpectrum& spec, double bound,
                            int recurrence_period, const ClassifyConfig& cfg) {
  AttractorClass out;
  out.spectrum = spec;
  out.orbit_bound = bound;
  const auto& e = spec.exponents;

  if (recurrence_period > 0) {
    out.period = recurrence_period;
    if (e[0] < 0.0)
      out.kind = AttractorKind::PeriodicSink;
    else if (recurrence_period == 1)
      out.kind = AttractorKind::FixedPoint;
    else
      out.kind = AttractorKind::Undetermined;
    return out;
  }
  if (is_lorenz_candidate(e, cfg.tolerance))
    out.kind = AttractorKind::DiscreteLorenzCandidate;
  else if (e[0] > cfg.tolerance)
    out.kind = AttractorKind::OtherChaotic;
  else
    out.kind = AttractorKind::Undetermined;
  return out;
}

}  // namespace detail

MiraSpectrum mira_lyapunov_spectrum(std::pair<double, double> m, std::pair<double, double> s,
                                    std::size_t transient, std::size_t n) {
  auto bad = [](std::pair<double, double> p) {
    return !std::isfinite(p.first) || !std::isfinite(p.second) ||
           std::max(std::abs(p.first), std::abs(p.second)) > kDivergenceRadius;
  };
  for (std::size_t i = 0; i < transient; ++i) {
    s = mira_step(s, m);
    if (bad(s)) detail::throw_escape(i + 1);
  }
  // Columns q0, q1 of an orthonormal frame; Jacobian [[0, 1], [-2y, M2h]].
  double q[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  double acc[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double j10 = -2.0 * s.first, j11 = m.second;
    double v[2][2];
    for (int c = 0; c < 2; ++c) {
      v[0][c] = q[1][c];
      v[1][c] = j10 * q[0][c] + j11 * q[1][c];
    }
    const double n0 = std::hypot(v[0][0], v[1][0]);
    acc[0] += std::log(n0);
    q[0][0] = v[0][0] / n0;
    q[1][0] = v[1][0] / n0;
    const double proj = q[0][0] * v[0][1] + q[1][0] * v[1][1];
    v[0][1] -= proj * q[0][0];
    v[1][1] -= proj * q[1][0];
    const double n1 = std::hypot(v[0][1], v[1][1]);
    acc[1] += std::log(n1);
    q[0][1] = v[0][1] / n1;
    q[1][1] = v[1][1] / n1;
    s = mira_step(s, m);
    if (bad(s)) detail::throw_escape(transient + i + 1);
  }
  MiraSpectrum out;
  out.iterations_used = n;
  out.transient_discarded = transient;
  if (n > 0) {
    out.exponents = {acc[0] / static_cast<double>(n), acc[1] / static_cast<double>(n)};
    if (out.exponents[0] < out.exponents[1]) std::swap(out.exponents[0], out.exponents[1]);
  }
  return out;
}

bool is_lorenz_candidate(const std::array<double, 3>& e, double tol) {
  return e[0] > tol && e[0] + e[1] > tol && e[0] + e[1] + e[2] < -tol;
}

const char* to_string(AttractorKind kind) {
  switch (kind) {
    case AttractorKind::Escaped: return "Escaped";
    case AttractorKind::FixedPoint: return "FixedPoint";
    case AttractorKind::PeriodicSink: return "PeriodicSink";
    case AttractorKind::DiscreteLorenzCandidate: return "DiscreteLorenzCandidate";
    case AttractorKind::OtherChaotic: return "OtherChaotic";
    case AttractorKind::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

}  // namespace dlorenz
