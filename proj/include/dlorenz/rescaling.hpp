#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dlorenz/model_family.hpp"
#include "dlorenz/poly3.hpp"
#include "dlorenz/precision.hpp"
#include "dlorenz/types.hpp"

namespace dlorenz {

/// (M1, M2) of the limit map; M3 is fixed by mu3 through J1 (l1 l2 g)^k.
struct LimitTargets {
  double M1 = 0.0;
  double M2 = 0.0;
};

struct RescaledParams {
  double M1 = 0.0;
  double M2 = 0.0;
  double M3 = 0.0;
  int k = 0;
};

enum class ParameterInversion {
  /// Leading-order inversion of the parameter formulas (corrections dropped).
  LeadingOrder,
  /// Exact inversion for the model at hand: the correction terms are
  /// computed from the model instead of dropped.
  Corrected,
};

/// Largest k with |gamma|^(2k) <= 1e300 for the saddle unfolded by mu3.
int rescaling_k_cap(const Model& base, double mu3);

/// Unfolding parameters that place the rescaled return map at the targets.
/// Throws ErrorKind::FloatRange above the cap, ErrorKind::DegenerateD /
/// DegenerateCoefficients for vanishing denominators.
UnfoldingParamsT<Real> params_from_target(int k, LimitTargets targets, double mu3,
                                          TangencyCase c, const Model& base,
                                          ParameterInversion inv = ParameterInversion::Corrected);

/// mu3 for which J1(mu) (lambda1 lambda2 gamma)^k equals `M3`.
double mu3_for_target_m3(int k, double M3, LimitTargets targets, TangencyCase c,
                         const Model& base);

/// Affine chart Phi_k : (X1, X2, Y) -> physical (x1, x2, y) near M+.
///
/// With xi = x - (x^+ + s) and eta = gamma^k y - y^- - s3, the shift s zeroes
/// the constant terms of the first two components of T_k and its eta-linear
/// term in the third. In (xi, eta) the chart is
///   xi = X1 u1 + X2 u2,   eta = alpha3 Y,   alpha3 = -1 / (d gamma^k),
/// where, with b the eta-column of the linear part A of T_k,
///   CaseII: u1 = alpha3 b,              u2 = A_xx u1
///   CaseI : u2 = alpha3 b,              u1 = -A_xx u2 / M3.
/// To leading order these are the diagonal scalings of the rescaling proof
/// (together with its shear in CaseII); the extra terms cancel the
/// (lambda2/lambda1)^k contributions those scalings leave behind.
struct RescalingChart {
  int k = 0;
  TangencyCase tcase = TangencyCase::CaseI;
  Vec3<Real> shift{};      ///< (s1, s2, s3)
  Mat3<Real> frame{};      ///< columns u1, u2, alpha3 e3 in (xi, eta)
  Vec3<Real> base{};       ///< Phi(0) in physical coordinates
  Mat3<Real> matrix{};     ///< Phi(X) = base + matrix X
  Mat3<Real> inverse{};
  double log10_condition = 0.0;  ///< log10 of max/min column scale

  Vec3<Real> to_physical(const Vec3<Real>& X) const;
  Vec3<Real> to_rescaled(const Vec3<Real>& x) const;
};

/// Both throw ErrorKind::DegenerateCoefficients when a scaling denominator
/// vanishes (CaseI: c1, b2; CaseII: b1, a21').
RescalingChart rescale_coords_case1(int k, const ModelT<Real>& unfolded);
RescalingChart rescale_coords_case2(int k, const ModelT<Real>& unfolded);

/// The diagonal leading-order factors (x1, x2, y-in-Pi- units) of the proof.
struct LeadingOrderScalings {
  double x1 = 0.0;
  double x2 = 0.0;
  double y = 0.0;
};
LeadingOrderScalings leading_order_scalings(int k, const ModelT<Real>& unfolded, TangencyCase c);

struct RescaledMapOptions {
  ParameterInversion inversion = ParameterInversion::Corrected;
  double mu3 = 0.0;
  double box_half = 2.0;
  /// Multiplies alpha3; anything but 1 breaks the rescaling (negative control).
  double sabotage = 1.0;
};

/// R_k = Phi_k^{-1} o T_k o Phi_k for the model unfolded to reach the targets.
class RescaledReturnMap {
 public:
  /// Unfolds `base` via params_from_target; the limit map uses the targets.
  RescaledReturnMap(int k, LimitTargets targets, TangencyCase c, const Model& base,
                    RescaledMapOptions opt = {});
  /// Explicit unfolding; the limit map uses the realised M1, M2 unless
  /// targets are given. opt.inversion and opt.mu3 are ignored.
  RescaledReturnMap(int k, const UnfoldingParamsT<Real>& mu, TangencyCase c, const Model& base,
                    RescaledMapOptions opt = {}, std::optional<LimitTargets> targets = {});

  /// Direct composition in working precision; nullopt if Phi(X) is outside
  /// the strip sigma_k^0.
  std::optional<Vec3<Real>> evaluate_exact(const Vec3<Real>& X) const;
  std::optional<State3> evaluate(const State3& X) const;

  /// R_k as an explicit polynomial map (exact composition, rounded to double).
  const PolyMap3<double>& polynomial() const { return poly_; }
  const PolyMap3<Real>& polynomial_exact() const { return poly_exact_; }

  State3 limit(const State3& X) const;
  Vec3<Real> limit_exact(const Vec3<Real>& X) const;

  int k() const { return k_; }
  TangencyCase tangency_case() const { return case_; }
  const RescalingChart& chart() const { return chart_; }
  const ModelT<Real>& unfolded_model() const { return model_; }
  const UnfoldingParamsT<Real>& mu() const { return mu_; }
  /// Limit parameters: targets for M1, M2 and J1(mu)(l1 l2 g)^k for M3.
  const RescaledParams& params() const { return params_; }
  /// M1, M2 actually realised by the constant / linear coefficients of R_k.
  const RescaledParams& realised() const { return realised_; }
  double box_half() const { return box_half_; }

 private:
  int k_;
  TangencyCase case_;
  double box_half_;
  ModelT<Real> model_;
  Model model_d_;
  Strip strip_;
  UnfoldingParamsT<Real> mu_;
  RescalingChart chart_;
  RescaledParams params_;
  RescaledParams realised_;
  Vec3<Real> powers_;  ///< lambda1^k, lambda2^k, gamma^k
  PolyMap3<Real> poly_exact_;
  PolyMap3<double> poly_;
};

/// Adapter so the Lyapunov machinery can iterate R_k.
struct RescaledPolyMap {
  const PolyMap3<double>* poly;
  State3 step(const State3& s) const { return poly->step(s); }
  Matrix3 jacobian(const State3& s) const { return poly->jacobian(s); }
};

/// Fixed points of the limit map of the given case, both of which lie on
/// Y^2 + (1 - M2 - M3) Y - M1 = 0.
std::vector<State3> limit_fixed_points(TangencyCase c, double M1, double M2, double M3);

/// per_axis^3 points evenly spaced over [-half, half]^3.
std::vector<State3> box_grid(double half, int per_axis);

struct DeviationResult {
  double c0 = 0.0;
  double c1 = 0.0;
  double coverage = 1.0;  ///< fraction of grid points inside the strip
  std::size_t points = 0;
};

/// C0 / C1 distance between two maps on a grid. Both map Vec3<Real> to
/// std::optional<Vec3<Real>>; points where either is undefined (at the point
/// or at a difference stencil node) are excluded. Jacobians are central
/// differences with step `h`.
template <class F, class G>
DeviationResult deviation_between(const F& f, const G& g, const std::vector<State3>& grid,
                                  double h = 1e-5);

/// C0 / C1 distance of R_k from its limit map.
DeviationResult deviation(const RescaledReturnMap& R, const std::vector<State3>& grid,
                          double h = 1e-5);

struct RescalingRecord {
  int k = 0;
  double c0 = 0.0;
  double c1 = 0.0;
  /// | |det DR_k(0)| - |ref| | / |ref| with ref = J1 (lambda1 lambda2 gamma)^k,
  /// J1 taken from the model before unfolding.
  double jacobian_residual = 0.0;
  double det_at_origin = 0.0;
  double reference_det = 0.0;
  double M3 = 0.0;  ///< J1(mu) (lambda1 lambda2 gamma)^k of the unfolded model
  double saddle_jacobian = 0.0;  ///< lambda1 lambda2 gamma
  double coverage = 1.0;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
};

struct RescalingReport {
  TangencyCase tcase = TangencyCase::CaseI;
  LimitTargets targets;
  double mu3 = 0.0;
  std::vector<RescalingRecord> records;
  double fitted_rate = 0.0;
  double predicted_rate = 0.0;
  int k_cap = 0;
  std::size_t fit_points = 0;
};

struct ConvergenceOptions {
  double mu3 = 0.0;
  double box_half = 1.0;
  int grid_per_axis = 5;
  double fd_step = 1e-5;
  ParameterInversion inversion = ParameterInversion::Corrected;
  double sabotage = 1.0;
  int threads = 0;  ///< 0: OpenMP default
};

/// Least-squares slope of log(y) against k, as a geometric rate exp(slope).
/// Values below `floor` are dropped; returns the number of points used.
double fit_geometric_rate(const std::vector<int>& k, const std::vector<double>& y,
                          std::size_t* used = nullptr, double floor = 1e-13);

/// Per-k deviations for k in [kmin, kmax]. Throws ErrorKind::FloatRange
/// above the cap, ErrorKind::EmptyStrip below k0 and
/// ErrorKind::InsufficientRange with fewer than 4 usable k.
RescalingReport convergence_report(int kmin, int kmax, LimitTargets targets, TangencyCase c,
                                   const Model& base, const ConvergenceOptions& opt = {});
/// Single-threaded reference for convergence_report.
RescalingReport convergence_report_serial(int kmin, int kmax, LimitTargets targets,
                                          TangencyCase c, const Model& base,
                                          const ConvergenceOptions& opt = {});

struct EquivalenceCheck {
  double max_error = 0.0;         ///< max one-step conjugacy defect along the orbit
  double trajectory_error = 0.0;  ///< max distance of independently iterated orbits
  std::size_t steps = 0;          ///< steps compared before leaving the radius-100 ball
  bool bounded = true;
};

/// Compares limit map 1 pushed through h(X1, X2, Y) = (X2, -X1/M3, Y) with
/// limit map 2. Throws ErrorKind::SmallM3 when |M3| < 0.01.
EquivalenceCheck case_equivalence_check(double M1, double M2, double M3, std::size_t orbit_length,
                                        State3 s0 = {0.0, 0.0, 0.0});

struct PeriodicOrbitCheck {
  State3 fixed_point{};            ///< fixed point of R_k
  double rescaled_residual = 0.0;  ///< |R_k(X*) - X*|
  double closure_physical = 0.0;   ///< |f^(k+n0)(q) - q| for q = Phi(X*)
  double closure_physical_double = 0.0;  ///< same, iterated in double precision
  double closure_rescaled = 0.0;   ///< same, measured back in rescaled coordinates
  int period = 0;
};

/// Newton-solves R_k(X) = X from `guess`, pulls X back through the chart and
/// closes the corresponding single-round orbit of the full model.
PeriodicOrbitCheck periodic_orbit_correspondence(const RescaledReturnMap& R, State3 guess);

}  // namespace dlorenz

#include "dlorenz/detail/deviation_impl.hpp"
