#pragma once

// Eikonal solver for grad W^T D_eps grad W = 1 on an SE(2) grid.
//
// Discretization at node m with Selling stencil {(w_t, e_t)} of its slice and
// cost C:
//
//   sum_t (w_t / C^2) max(0, W[m] - a_t)^2 = 1,  a_t = min(W[m-e_t], W[m+e_t])
//
// The scheme is monotone and causal (the solution exceeds every active a_t),
// so it can be solved in one pass by label setting (fast marching). A
// Gauss-Seidel fixed-point iteration of the same equations is kept as an
// independent oracle.

#include <cstddef>
#include <span>
#include <vector>

#include "se2fm/grid.hpp"
#include "se2fm/kernels.hpp"
#include "se2fm/metric.hpp"
#include "se2fm/selling.hpp"

namespace se2fm {

enum class SolveMode { kFastMarching, kFixedPoint };

struct SolveConfig {
  MetricParams params;
  std::vector<GridIndex> seeds;
  SolveMode mode = SolveMode::kFastMarching;
  double fixed_point_tolerance = 1e-9;
  int max_sweeps = 0;  ///< 0 selects 10 * (nx + ny + ntheta)
};

struct SolveStats {
  std::size_t accepted = 0;
  std::size_t heap_pushes = 0;
  std::size_t stale_pops = 0;
  int sweeps = 0;
  /// Accepted values formed a nondecreasing sequence (fast marching only).
  bool monotone_acceptance = true;
  double seconds = 0.0;
};

/// Solves sum_t w_t max(0, u - a_t)^2 = 1 for u. Terms with zero weight or
/// infinite a_t are ignored; returns +inf when no term is usable.
double local_update(std::span<const double> weights,
                    std::span<const double> neighbor_values);

/// Solve with stencils built for this call.
DistanceField solve(const CostVolume& cost, const SolveConfig& config,
                    SolveStats* stats = nullptr);

/// Solve reusing a stencil cache built for cost.grid and config.params.
DistanceField solve(const CostVolume& cost, const SolveConfig& config,
                    const StencilCache& stencils, SolveStats* stats = nullptr);

struct ResidualReport {
  double max_residual = 0.0;
  std::size_t worst_index = 0;
  std::size_t nodes_checked = 0;
};

/// Max of |sum_t w_t C^-2 max(0, u - a_t)^2 - 1| over finite non-seed nodes
/// (seeds are the nodes holding exactly 0).
double residual(const DistanceField& field, const CostVolume& cost,
                const MetricParams& params);
double residual(const DistanceField& field, const CostVolume& cost,
                const StencilCache& stencils,
                kernels::Backend backend = kernels::best_backend());

/// Residual of a single node, or 0 for seeds and unreached nodes.
double node_residual(const DistanceField& field, const CostVolume& cost,
                     const StencilCache& stencils, const GridIndex& node);

}  // namespace se2fm
