#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

#include "atlas_internal.hpp"

namespace dlorenz {

namespace {

void check_axis(const AxisRange& a, const char* name) {
  if (a.steps < 1) throw Error(ErrorKind::Config, std::string(name) + ": steps must be >= 1");
  if (!std::isfinite(a.min) || !std::isfinite(a.max))
    throw Error(ErrorKind::Config, std::string(name) + ": bounds must be finite");
  if (a.min > a.max) throw Error(ErrorKind::Config, std::string(name) + ": min > max");
}

double spectral_radius(const FixedPointAnalysis& fp) {
  double r = 0.0;
  for (const auto& m : fp.multipliers) r = std::max(r, std::abs(m));
  return r;
}

/// Least-unstable real fixed point of the Henon map, if any.
std::optional<State3> calmest_fixed_point(const HenonParams& p) {
  const auto fps = fixed_points(p);
  if (fps.empty()) return std::nullopt;
  const auto best = std::min_element(fps.begin(), fps.end(), [](const auto& a, const auto& b) {
    return spectral_radius(a) < spectral_radius(b);
  });
  return best->point;
}

}  // namespace

void SweepConfig::validate() const {
  check_axis(M1, "M1");
  check_axis(M2, "M2");
  check_axis(B, "B");
  if (!(tolerance >= 0.0) || !(recurrence_tol >= 0.0))
    throw Error(ErrorKind::Config, "tolerances must be nonnegative");
  if (max_period < 1) throw Error(ErrorKind::Config, "max_period must be >= 1");
  if (!(ic_jitter >= 0.0)) throw Error(ErrorKind::Config, "ic_jitter must be nonnegative");
}

ClassifyConfig SweepConfig::classify_config() const {
  ClassifyConfig c;
  c.transient = transient;
  c.iterations = iterations;
  c.tolerance = tolerance;
  c.recurrence_tol = recurrence_tol;
  c.max_period = max_period;
  return c;
}

State3 initial_condition(const HenonParams& p, const SweepConfig& cfg, std::size_t cell) {
  State3 s = cfg.seed_point;
  if (cfg.ic == InitialCondition::FixedPointOffset) {
    if (const auto fp = calmest_fixed_point(p)) {
      s = *fp;
      for (double& v : s) v += cfg.ic_offset;
    }
  }
  if (cfg.ic_jitter > 0.0) {
    std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL * (cell + 1));
    std::uniform_real_distribution<double> u(-cfg.ic_jitter, cfg.ic_jitter);
    for (double& v : s) v += u(rng);
  }
  return s;
}

AtlasCell evaluate_cell(const SweepConfig& cfg, int i, int j, int l) {
  AtlasCell cell;
  cell.index = {i, j, l};
  cell.params = {cfg.M1.at(i), cfg.M2.at(j), cfg.B.at(l)};
  try {
    const std::size_t flat = (static_cast<std::size_t>(i) * cfg.M2.steps + j) * cfg.B.steps + l;
    const State3 s0 = initial_condition(cell.params, cfg, flat);
    cell.cls = classify_attractor(HenonMap{cell.params}, s0, cfg.classify_config());
  } catch (const std::exception&) {
    cell.cls = AttractorClass{};
  }
  return cell;
}

std::array<double, 3> Component::distance_to(const HenonParams& p) const {
  const double v[3] = {p.M1, p.M2, p.B};
  const double a[3] = {lo.M1, lo.M2, lo.B};
  const double b[3] = {hi.M1, hi.M2, hi.B};
  std::array<double, 3> d{};
  for (int i = 0; i < 3; ++i) d[i] = std::max({a[i] - v[i], 0.0, v[i] - b[i]});
  return d;
}

bool Component::adjoins(const HenonParams& p, double dist) const {
  const auto d = distance_to(p);
  return d[0] <= dist && d[1] <= dist && d[2] <= dist;
}

namespace {

template <class F>
void for_each_neighbour(const SweepConfig& cfg, const std::array<int, 3>& idx, F&& f) {
  const int n[3] = {cfg.M1.steps, cfg.M2.steps, cfg.B.steps};
  for (int axis = 0; axis < 3; ++axis)
    for (int delta : {-1, 1}) {
      std::array<int, 3> q = idx;
      q[axis] += delta;
      if (q[axis] < 0 || q[axis] >= n[axis]) continue;
      f(q);
    }
}

}  // namespace

std::vector<Component> region_extract(const Atlas& atlas, const CellPredicate& pred) {
  const std::size_t n = atlas.cells.size();
  std::vector<char> match(n), seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) match[i] = pred(atlas.cells[i]) ? 1 : 0;

  std::vector<Component> out;
  for (std::size_t start = 0; start < n; ++start) {
    if (!match[start] || seen[start]) continue;
    Component comp;
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      comp.cells.push_back(cur);
      for_each_neighbour(atlas.cfg, atlas.cells[cur].index, [&](const std::array<int, 3>& q) {
        const std::size_t f = atlas.flat(q[0], q[1], q[2]);
        if (match[f] && !seen[f]) {
          seen[f] = 1;
          queue.push_back(f);
        }
      });
    }
    std::sort(comp.cells.begin(), comp.cells.end());
    comp.index_lo = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                     std::numeric_limits<int>::max()};
    comp.index_hi = {-1, -1, -1};
    for (std::size_t f : comp.cells)
      for (int a = 0; a < 3; ++a) {
        comp.index_lo[a] = std::min(comp.index_lo[a], atlas.cells[f].index[a]);
        comp.index_hi[a] = std::max(comp.index_hi[a], atlas.cells[f].index[a]);
      }
    const auto& c = atlas.cfg;
    comp.lo = {c.M1.at(comp.index_lo[0]), c.M2.at(comp.index_lo[1]), c.B.at(comp.index_lo[2])};
    comp.hi = {c.M1.at(comp.index_hi[0]), c.M2.at(comp.index_hi[1]), c.B.at(comp.index_hi[2])};
    out.push_back(std::move(comp));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Component& a, const Component& b) { return a.size() > b.size(); });
  return out;
}

namespace {

bool is_boundary(const Atlas& atlas, const std::vector<char>& match, const std::array<int, 3>& idx) {
  bool boundary = false;
  for_each_neighbour(atlas.cfg, idx, [&](const std::array<int, 3>& q) {
    if (!match[atlas.flat(q[0], q[1], q[2])]) boundary = true;
  });
  return boundary;
}

std::vector<char> matches(const Atlas& atlas, const CellPredicate& pred) {
  std::vector<char> m(atlas.cells.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = pred(atlas.cells[i]) ? 1 : 0;
  return m;
}

}  // namespace

BoundaryStats boundary_fraction(const Atlas& atlas, const CellPredicate& pred) {
  const auto match = matches(atlas, pred);
  BoundaryStats st;
  for (std::size_t i = 0; i < match.size(); ++i) {
    if (!match[i]) continue;
    ++st.matching;
    if (is_boundary(atlas, match, atlas.cells[i].index)) ++st.boundary;
  }
  return st;
}

RefinementStats compare_refinement(const Atlas& coarse, const Atlas& fine, const CellPredicate& pred) {
  const auto& c = coarse.cfg;
  const auto& f = fine.cfg;
  auto refined = [](const AxisRange& a, const AxisRange& b) {
    return b.steps == 2 * a.steps - 1 && a.min == b.min && a.max == b.max;
  };
  if (!refined(c.M1, f.M1) || !refined(c.M2, f.M2) || !refined(c.B, f.B))
    throw Error(ErrorKind::Config, "fine grid must use 2n-1 steps over the same box");

  const auto cm = matches(coarse, pred);
  RefinementStats st;
  st.coarse = boundary_fraction(coarse, pred);
  for (std::size_t i = 0; i < coarse.cells.size(); ++i) {
    const auto& idx = coarse.cells[i].index;
    const bool fine_match = pred(fine.at(2 * idx[0], 2 * idx[1], 2 * idx[2]));
    if (fine_match == static_cast<bool>(cm[i])) continue;
    // A cell is interior when it and all its neighbours agree.
    bool interior = true;
    for_each_neighbour(c, idx, [&](const std::array<int, 3>& q) {
      if (cm[coarse.flat(q[0], q[1], q[2])] != cm[i]) interior = false;
    });
    if (interior)
      ++st.changed_interior;
    else
      ++st.changed_boundary;
  }
  return st;
}

EscapeMonotonicity escape_monotonicity(const Atlas& atlas) {
  const auto& c = atlas.cfg;
  EscapeMonotonicity st;
  for (int j = 0; j < c.M2.steps; ++j)
    for (int l = 0; l < c.B.steps; ++l) {
      ++st.rows;
      int first = -1, last = -1, bounded = 0;
      for (int i = 0; i < c.M1.steps; ++i) {
        if (atlas.at(i, j, l).cls.kind == AttractorKind::Escaped) continue;
        if (first < 0) first = i;
        last = i;
        ++bounded;
      }
      if (bounded == 0 || last - first + 1 == bounded) ++st.monotone_rows;
    }
  return st;
}

void DeltaKConfig::validate() const {
  if (ks.empty()) throw Error(ErrorKind::Config, "delta-k scan needs at least one k");
  check_axis(M1, "M1");
  check_axis(M2, "M2");
  if (tcase != TangencyCase::CaseI && tcase != TangencyCase::CaseII)
    throw Error(ErrorKind::InvalidCase, "delta-k scan requires CaseI or CaseII");
  if (target_M3 && !(*target_M3 > 0.0))
    throw Error(ErrorKind::Config, "target M3 must be positive");
}

State3 limit_initial_condition(TangencyCase c, double M1, double M2, double M3, double offset) {
  // Fixed points and multipliers carry over through the conjugacies to the
  // Henon map with B = M3.
  const auto fp = calmest_fixed_point({M1, M2, M3});
  if (!fp) return {0.0, 0.0, 0.0};
  State3 s = henon_to_case2(*fp);
  if (c == TangencyCase::CaseI) s = case2_to_case1(s, M3);
  for (double& v : s) v += offset;
  return s;
}

namespace atlas_detail {

SlicePlan plan_slice(const DeltaKConfig& cfg, const Model& base, int k) {
  Model unfolded = base;
  const double mu3 = cfg.target_M3
                         ? mu3_for_target_m3(k, *cfg.target_M3,
                                             {0.5 * (cfg.M1.min + cfg.M1.max), 0.5 * (cfg.M2.min + cfg.M2.max)},
                                             cfg.tcase, base)
                         : cfg.mu3;
  unfolded.saddle.gamma = (1.0 - mu3) / (base.saddle.lambda1 * base.saddle.lambda2);
  const int k0 = min_return_index(unfolded);
  if (k < k0)
    throw Error(ErrorKind::EmptyStrip, "k = " + std::to_string(k) +
                                           " is below the first return index k0 = " + std::to_string(k0));
  const RescaledReturnMap centre(
      k, LimitTargets{0.5 * (cfg.M1.min + cfg.M1.max), 0.5 * (cfg.M2.min + cfg.M2.max)}, cfg.tcase, base,
      RescaledMapOptions{ParameterInversion::Corrected, mu3, 2.0, 1.0});
  return {k, mu3, centre.params().M3};
}

DeltaKCell evaluate_delta_cell(const DeltaKConfig& cfg, const Model& base, const SlicePlan& plan, int i,
                               int j) {
  const LimitTargets t{cfg.M1.at(i), cfg.M2.at(j)};
  const RescaledReturnMap R(plan.k, t, cfg.tcase, base,
                            RescaledMapOptions{ParameterInversion::Corrected, plan.mu3, 2.0, 1.0});
  const RescaledParams& p = R.params();
  ClassifyConfig cc;
  cc.transient = cfg.transient;
  cc.iterations = cfg.iterations;
  cc.tolerance = cfg.tolerance;
  cc.recurrence_tol = cfg.recurrence_tol;
  cc.max_period = cfg.max_period;

  DeltaKCell cell;
  cell.M1 = t.M1;
  cell.M2 = t.M2;
  cell.M3 = p.M3;
  const State3 s0 = limit_initial_condition(cfg.tcase, p.M1, p.M2, p.M3, cfg.ic_offset);
  if (cfg.tcase == TangencyCase::CaseI)
    cell.limit = classify_attractor(LimitMap1{p.M1, p.M2, p.M3}, s0, cc);
  else
    cell.limit = classify_attractor(LimitMap2{p.M1, p.M2, p.M3}, s0, cc);
  cell.rescaled = classify_attractor(RescaledPolyMap{&R.polynomial()}, s0, cc);
  return cell;
}

void finish_slice(DeltaKSlice& slice) {
  std::size_t agree = 0;
  for (const auto& c : slice.cells) {
    if (c.agree()) ++agree;
    const bool a = c.limit.kind == AttractorKind::DiscreteLorenzCandidate;
    const bool b = c.rescaled.kind == AttractorKind::DiscreteLorenzCandidate;
    slice.limit_candidates += a;
    slice.rescaled_candidates += b;
    slice.shared_candidates += a && b;
  }
  slice.agreement = slice.cells.empty() ? 0.0 : static_cast<double>(agree) / slice.cells.size();
  slice.candidate_region_reproduced = slice.limit_candidates > 0 && slice.shared_candidates > 0;
}

}  // namespace atlas_detail

}  // namespace dlorenz
