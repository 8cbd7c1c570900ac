#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dlorenz/core_maps.hpp"
#include "dlorenz/lyapunov.hpp"
#include "dlorenz/model_family.hpp"
#include "dlorenz/rescaling.hpp"

namespace dlorenz {

struct AxisRange {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;

  /// Grid node i; a single-step axis sits at `min`.
  double at(int i) const {
    return steps <= 1 ? min : min + (max - min) * static_cast<double>(i) / (steps - 1);
  }
};

enum class InitialCondition {
  /// Least-unstable real fixed point plus `ic_offset` in every coordinate,
  /// or `seed_point` when no real fixed point exists.
  FixedPointOffset,
  /// Always `seed_point`.
  SeedPoint,
};

struct SweepConfig {
  AxisRange M1{-0.5, 0.5, 50};
  AxisRange M2{0.5, 1.1, 50};
  AxisRange B{0.5, 1.0, 50};
  std::size_t transient = 10000;
  std::size_t iterations = 200000;
  double tolerance = 1e-3;
  double recurrence_tol = 1e-9;
  int max_period = 64;
  InitialCondition ic = InitialCondition::FixedPointOffset;
  double ic_offset = 1e-3;
  State3 seed_point{0.0, 0.0, 0.0};
  /// Seeds a per-cell uniform jitter of size `ic_jitter` on the start point;
  /// with the default jitter of 0 the seed has no effect.
  std::uint64_t seed = 0;
  double ic_jitter = 0.0;
  int threads = 0;  ///< 0: OpenMP default

  /// Throws ErrorKind::Config for empty or inverted axes and bad budgets.
  void validate() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(M1.steps) * M2.steps * B.steps;
  }
  ClassifyConfig classify_config() const;
};

struct AtlasCell {
  std::array<int, 3> index{};  ///< (M1, M2, B) grid indices
  HenonParams params;
  AttractorClass cls;  ///< carries the spectrum
};

/// Cells in row-major order over (M1, M2, B), B fastest.
struct Atlas {
  SweepConfig cfg;
  std::vector<AtlasCell> cells;

  std::size_t flat(int i, int j, int l) const {
    return (static_cast<std::size_t>(i) * cfg.M2.steps + j) * cfg.B.steps + l;
  }
  const AtlasCell& at(int i, int j, int l) const { return cells[flat(i, j, l)]; }
};

/// Start point for the Henon map at `p` under the configured policy.
State3 initial_condition(const HenonParams& p, const SweepConfig& cfg, std::size_t cell);

/// Classifies one grid cell. Never throws: failures become Undetermined.
AtlasCell evaluate_cell(const SweepConfig& cfg, int i, int j, int l);

/// OpenMP sweep; results do not depend on the thread count or schedule.
Atlas sweep_grid(const SweepConfig& cfg);
/// Single-threaded reference for sweep_grid.
Atlas sweep_grid_serial(const SweepConfig& cfg);

using CellPredicate = std::function<bool(const AtlasCell&)>;

inline bool is_lorenz_cell(const AtlasCell& c) {
  return c.cls.kind == AttractorKind::DiscreteLorenzCandidate;
}

struct Component {
  std::vector<std::size_t> cells;  ///< flat indices, ascending
  std::array<int, 3> index_lo{}, index_hi{};
  HenonParams lo, hi;  ///< parameter bounding box

  std::size_t size() const { return cells.size(); }
  /// Per-coordinate distance from p to the bounding box.
  std::array<double, 3> distance_to(const HenonParams& p) const;
  bool adjoins(const HenonParams& p, double dist) const;
};

/// 6-connected components of matching cells, largest first.
std::vector<Component> region_extract(const Atlas& atlas, const CellPredicate& pred);

/// Matching cells with a non-matching 6-neighbour inside the grid.
struct BoundaryStats {
  std::size_t matching = 0;
  std::size_t boundary = 0;
  double fraction() const {
    return matching == 0 ? 0.0 : static_cast<double>(boundary) / static_cast<double>(matching);
  }
};
BoundaryStats boundary_fraction(const Atlas& atlas, const CellPredicate& pred);

/// Compares a grid with its 2x refinement (steps 2n - 1 per axis, so coarse
/// node i is fine node 2i).
struct RefinementStats {
  BoundaryStats coarse;
  std::size_t changed_interior = 0;  ///< interior coarse cells whose fine twin differs
  std::size_t changed_boundary = 0;
};
RefinementStats compare_refinement(const Atlas& coarse, const Atlas& fine, const CellPredicate& pred);

/// Rows along M1 (fixed M2, B) whose non-escaped cells form one interval, so
/// escape spreads monotonically outward in |M1| beyond the bounded range.
struct EscapeMonotonicity {
  std::size_t rows = 0;
  std::size_t monotone_rows = 0;
  double fraction() const {
    return rows == 0 ? 1.0 : static_cast<double>(monotone_rows) / static_cast<double>(rows);
  }
};
EscapeMonotonicity escape_monotonicity(const Atlas& atlas);

// ---------------------------------------------------------------------------
// delta_k scan: classification of the rescaled first-return map.

struct DeltaKConfig {
  std::vector<int> ks{18};
  AxisRange M1{-0.5, 0.5, 20};
  AxisRange M2{0.5, 1.1, 20};
  TangencyCase tcase = TangencyCase::CaseI;
  double mu3 = 0.0;
  /// When set, mu3 is tuned per k so that M3 hits this value at the grid centre.
  std::optional<double> target_M3;
  std::size_t transient = 10000;
  std::size_t iterations = 200000;
  double tolerance = 1e-3;
  double recurrence_tol = 1e-9;
  int max_period = 64;
  double ic_offset = 1e-3;
  int threads = 0;

  void validate() const;
};

struct DeltaKCell {
  double M1 = 0.0, M2 = 0.0, M3 = 0.0;
  AttractorClass limit;
  AttractorClass rescaled;
  bool agree() const { return limit.kind == rescaled.kind; }
};

struct DeltaKSlice {
  int k = 0;
  double mu3 = 0.0;
  double M3 = 0.0;  ///< at the grid centre
  std::vector<DeltaKCell> cells;  ///< M1-major, M2 fastest
  double agreement = 0.0;
  std::size_t limit_candidates = 0;
  std::size_t rescaled_candidates = 0;
  std::size_t shared_candidates = 0;
  /// The limit map has candidates and R_k reproduces at least one of them.
  bool candidate_region_reproduced = false;
};

struct DeltaKReport {
  DeltaKConfig cfg;
  std::vector<DeltaKSlice> slices;
};

/// Start point for a limit map of case `c`: its least-unstable fixed point
/// plus the offset, or the origin.
State3 limit_initial_condition(TangencyCase c, double M1, double M2, double M3, double offset);

/// Throws ErrorKind::EmptyStrip for k below the first return index and the
/// rescaling range errors of params_from_target.
DeltaKReport delta_k_scan(const DeltaKConfig& cfg, const Model& base);
DeltaKReport delta_k_scan_serial(const DeltaKConfig& cfg, const Model& base);

}  // namespace dlorenz
