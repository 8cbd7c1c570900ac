// Single-threaded reference drivers. They visit cells in index order and are
// kept deliberately plain so the OpenMP drivers can be checked against them.

#include "atlas_internal.hpp"

namespace dlorenz {

Atlas sweep_grid_serial(const SweepConfig& cfg) {
  cfg.validate();
  Atlas atlas;
  atlas.cfg = cfg;
  atlas.cells.reserve(cfg.cell_count());
  for (int i = 0; i < cfg.M1.steps; ++i)
    for (int j = 0; j < cfg.M2.steps; ++j)
      for (int l = 0; l < cfg.B.steps; ++l) atlas.cells.push_back(evaluate_cell(cfg, i, j, l));
  return atlas;
}

DeltaKReport delta_k_scan_serial(const DeltaKConfig& cfg, const Model& base) {
  cfg.validate();
  DeltaKReport rep;
  rep.cfg = cfg;
  for (int k : cfg.ks) {
    const auto plan = atlas_detail::plan_slice(cfg, base, k);
    DeltaKSlice slice;
    slice.k = k;
    slice.mu3 = plan.mu3;
    slice.M3 = plan.M3;
    for (int i = 0; i < cfg.M1.steps; ++i)
      for (int j = 0; j < cfg.M2.steps; ++j)
        slice.cells.push_back(atlas_detail::evaluate_delta_cell(cfg, base, plan, i, j));
    atlas_detail::finish_slice(slice);
    rep.slices.push_back(std::move(slice));
  }
  return rep;
}

}  // namespace dlorenz
