#pragma once

// Shared per-cell kernels of the OpenMP and serial atlas drivers.

#include "dlorenz/atlas.hpp"

namespace dlorenz::atlas_detail {

struct SlicePlan {
  int k = 0;
  double mu3 = 0.0;
  double M3 = 0.0;
};

/// Validates k and resolves mu3 for one slice of a delta_k scan.
SlicePlan plan_slice(const DeltaKConfig& cfg, const Model& base, int k);

DeltaKCell evaluate_delta_cell(const DeltaKConfig& cfg, const Model& base, const SlicePlan& plan,
                               int i, int j);

/// Fills the slice statistics once all cells are in place.
void finish_slice(DeltaKSlice& slice);

}  // namespace dlorenz::atlas_detail
