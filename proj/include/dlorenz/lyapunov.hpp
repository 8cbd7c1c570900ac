#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dlorenz/core_maps.hpp"
#include "dlorenz/types.hpp"

namespace dlorenz {

template <class M>
concept DifferentiableMap3 = requires(const M& m, const State3& s) {
  { m.step(s) } -> std::convertible_to<State3>;
  { m.jacobian(s) } -> std::convertible_to<Matrix3>;
};

struct HenonMap {
  HenonParams p;
  State3 step(const State3& s) const { return henon3d_step(s, p); }
  Matrix3 jacobian(const State3& s) const { return henon3d_jacobian(s, p); }
};

struct InverseHenonMap {
  InverseHenonParams p;
  State3 step(const State3& s) const { return henon3d_inverse_step(s, p); }
  Matrix3 jacobian(const State3& s) const { return henon3d_inverse_jacobian(s, p); }
};

struct LimitMap1 {
  double M1, M2, M3;
  State3 step(const State3& s) const { return limit_map_case1(s, M1, M2, M3); }
  Matrix3 jacobian(const State3& s) const {
    return limit_map_case1_jacobian(s, M1, M2, M3);
  }
};

struct LimitMap2 {
  double M1, M2, M3;
  State3 step(const State3& s) const { return limit_map_case2(s, M1, M2, M3); }
  Matrix3 jacobian(const State3& s) const {
    return limit_map_case2_jacobian(s, M1, M2, M3);
  }
};

/// diag(l1, l2, l3); used as an exactly solvable test map.
struct DiagonalLinearMap {
  State3 diag;
  State3 step(const State3& s) const {
    return {diag[0] * s[0], diag[1] * s[1], diag[2] * s[2]};
  }
  Matrix3 jacobian(const State3&) const {
    return {{{diag[0], 0.0, 0.0}, {0.0, diag[1], 0.0}, {0.0, 0.0, diag[2]}}};
  }
};

/// Type-erased map for the command line and other non-hot paths.
struct AnyMap {
  std::function<State3(const State3&)> step_fn;
  std::function<Matrix3(const State3&)> jacobian_fn;
  State3 step(const State3& s) const { return step_fn(s); }
  Matrix3 jacobian(const State3& s) const { return jacobian_fn(s); }

  template <DifferentiableMap3 M>
  static AnyMap from(M m) {
    return {[m](const State3& s) { return m.step(s); },
            [m](const State3& s) { return m.jacobian(s); }};
  }
};

struct OrbitStats {
  bool escaped = false;
  std::size_t escape_iteration = 0;  ///< iterate index at which escape was seen
  std::size_t iterations = 0;        ///< post-transient iterates examined
  double bound = 0.0;                ///< max Euclidean norm over post-transient iterates
  State3 last{};
  std::vector<State3> samples;
};

/// Iterates `transient + n` steps. Post-transient iterates s_1..s_n feed the
/// bound and up to `max_samples` evenly spaced samples.
template <DifferentiableMap3 M>
OrbitStats orbit(const M& map, State3 s, std::size_t n, std::size_t transient,
                 std::size_t max_samples = 1000) {
  OrbitStats st;
  st.last = s;
  if (n == 0) return st;
  for (std::size_t i = 0; i < transient; ++i) {
    s = map.step(s);
    if (escaped(s)) {
      st.escaped = true;
      st.escape_iteration = i + 1;
      st.last = s;
      return st;
    }
  }
  const std::size_t stride = max_samples == 0 ? 0 : std::max<std::size_t>(1, n / max_samples);
  for (std::size_t i = 0; i < n; ++i) {
    s = map.step(s);
    if (escaped(s)) {
      st.escaped = true;
      st.escape_iteration = transient + i + 1;
      break;
    }
    st.bound = std::max(st.bound, norm2(s));
    ++st.iterations;
    if (stride != 0 && i % stride == 0 && st.samples.size() < max_samples)
      st.samples.push_back(s);
  }
  st.last = s;
  return st;
}

struct LyapunovSpectrum {
  std::array<double, 3> exponents{};  ///< nats per iteration, non-increasing
  std::size_t iterations_used = 0;
  std::size_t transient_discarded = 0;

  double sum() const { return exponents[0] + exponents[1] + exponents[2]; }
};

/// Tangent frame carried along an orbit and re-orthonormalised every step.
class TangentFrame {
 public:
  TangentFrame() { reset(); }

  void reset() {
    q_ = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    log_sum_ = {0.0, 0.0, 0.0};
  }

  /// Pushes the frame through `jac` and accumulates the log stretch factors
  /// of a modified Gram-Schmidt QR step.
  void advance(const Matrix3& jac);

  const std::array<double, 3>& log_sums() const { return log_sum_; }

 private:
  Matrix3 q_;  // columns are the frame vectors
  std::array<double, 3> log_sum_;
};

struct EscapeInfo {
  bool escaped = false;
  std::size_t iteration = 0;
};

namespace detail {
LyapunovSpectrum finish_spectrum(const TangentFrame& frame, std::size_t n,
                                 std::size_t transient);
[[noreturn]] void throw_escape(std::size_t iteration);
}  // namespace detail

/// Non-throwing core: returns escape info and writes the spectrum and the
/// final state on success.
template <DifferentiableMap3 M>
EscapeInfo lyapunov_spectrum_into(const M& map, State3& s, std::size_t transient,
                                  std::size_t n, LyapunovSpectrum& out) {
  for (std::size_t i = 0; i < transient; ++i) {
    s = map.step(s);
    if (escaped(s)) return {true, i + 1};
  }
  TangentFrame frame;
  for (std::size_t i = 0; i < n; ++i) {
    frame.advance(map.jacobian(s));
    s = map.step(s);
    if (escaped(s)) return {true, transient + i + 1};
  }
  out = detail::finish_spectrum(frame, n, transient);
  return {};
}

/// Lyapunov spectrum by per-step QR re-orthonormalisation of a tangent frame.
/// Throws ErrorKind::Escape when the orbit diverges.
template <DifferentiableMap3 M>
LyapunovSpectrum lyapunov_spectrum(const M& map, State3 s0, std::size_t transient,
                                   std::size_t n) {
  LyapunovSpectrum out;
  const EscapeInfo e = lyapunov_spectrum_into(map, s0, transient, n, out);
  if (e.escaped) detail::throw_escape(e.iteration);
  return out;
}

/// Spectrum of the two-dimensional Mira map (y, z) -> (z, M1h + M2h z - y^2)
/// by the same QR scheme in the plane. Throws ErrorKind::Escape.
struct MiraSpectrum {
  std::array<double, 2> exponents{};
  std::size_t iterations_used = 0;
  std::size_t transient_discarded = 0;

  double sum() const { return exponents[0] + exponents[1]; }
};

MiraSpectrum mira_lyapunov_spectrum(std::pair<double, double> m, std::pair<double, double> s0,
                                    std::size_t transient, std::size_t n);

enum class AttractorKind {
  Escaped,
  FixedPoint,
  PeriodicSink,
  DiscreteLorenzCandidate,
  OtherChaotic,
  Undetermined,
};

const char* to_string(AttractorKind kind);

struct AttractorClass {
  AttractorKind kind = AttractorKind::Undetermined;
  int period = 0;  ///< set for PeriodicSink and FixedPoint
  LyapunovSpectrum spectrum;
  double orbit_bound = 0.0;
};

struct ClassifyConfig {
  std::size_t transient = 10000;
  std::size_t iterations = 1000000;
  double tolerance = 1e-3;
  double recurrence_tol = 1e-9;
  int max_period = 64;
};

/// Proxy test on exponents alone: expansion, area expansion in the leading
/// pair, and net volume contraction, all beyond `tol`.
bool is_lorenz_candidate(const std::array<double, 3>& exps, double tol);

namespace detail {
AttractorClass decide_class(const LyapunovSpectrum& spec, double bound,
                            int recurrence_period, const ClassifyConfig& cfg);
}

/// Smallest p <= max_period with |f^p(s) - s|_inf <= tol, or 0.
template <DifferentiableMap3 M>
int detect_period(const M& map, const State3& s, int max_period, double tol) {
  State3 x = s;
  for (int p = 1; p <= max_period; ++p) {
    x = map.step(x);
    if (escaped(x)) return 0;
    if (max_abs_diff(x, s) <= tol) return p;
  }
  return 0;
}

template <DifferentiableMap3 M>
AttractorClass classify_attractor(const M& map, State3 s0, const ClassifyConfig& cfg) {
  AttractorClass out;
  if (cfg.iterations == 0) return out;

  LyapunovSpectrum spec;
  State3 s = s0;
  const EscapeInfo e = lyapunov_spectrum_into(map, s, cfg.transient, cfg.iterations, spec);
  if (e.escaped) {
    out.kind = AttractorKind::Escaped;
    return out;
  }
  // Bound over a short post-spectrum window; the spectrum loop itself does
  // not track norms.
  const OrbitStats tail = orbit(map, s, std::min<std::size_t>(cfg.iterations, 4096), 0, 0);
  if (tail.escaped) {
    out.kind = AttractorKind::Escaped;
    return out;
  }
  const int period = detect_period(map, s, cfg.max_period, cfg.recurrence_tol);
  return detail::decide_class(spec, std::max(tail.bound, norm2(s)), period, cfg);
}

}  // namespace dlorenz
