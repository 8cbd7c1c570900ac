#include <exception>

#include <omp.h>

#include "atlas_internal.hpp"

namespace dlorenz {

namespace {

int thread_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace

Atlas sweep_grid(const SweepConfig& cfg) {
  cfg.validate();
  Atlas atlas;
  atlas.cfg = cfg;
  atlas.cells.resize(cfg.cell_count());
  const long n = static_cast<long>(atlas.cells.size());
  const int n2 = cfg.M2.steps, n3 = cfg.B.steps;
  // Escaping cells finish early, so chunks are handed out dynamically; each
  // cell writes only its own slot.
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count(cfg.threads))
  for (long f = 0; f < n; ++f) {
    const int i = static_cast<int>(f / (static_cast<long>(n2) * n3));
    const int j = static_cast<int>((f / n3) % n2);
    const int l = static_cast<int>(f % n3);
    atlas.cells[static_cast<std::size_t>(f)] = evaluate_cell(cfg, i, j, l);
  }
  return atlas;
}

DeltaKReport delta_k_scan(const DeltaKConfig& cfg, const Model& base) {
  cfg.validate();
  DeltaKReport rep;
  rep.cfg = cfg;
  for (int k : cfg.ks) {
    const auto plan = atlas_detail::plan_slice(cfg, base, k);
    DeltaKSlice slice;
    slice.k = k;
    slice.mu3 = plan.mu3;
    slice.M3 = plan.M3;
    const int n1 = cfg.M1.steps, n2 = cfg.M2.steps;
    slice.cells.resize(static_cast<std::size_t>(n1) * n2);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count(cfg.threads))
    for (int f = 0; f < n1 * n2; ++f) {
      try {
        slice.cells[static_cast<std::size_t>(f)] =
            atlas_detail::evaluate_delta_cell(cfg, base, plan, f / n2, f % n2);
      } catch (...) {
#pragma omp critical(dlorenz_delta_k_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    atlas_detail::finish_slice(slice);
    rep.slices.push_back(std::move(slice));
  }
  return rep;
}

}  // namespace dlorenz
