#pragma once

// Selling (obtuse superbase) decomposition of 3x3 SPD matrices:
//   D = sum_t w_t e_t e_t^T,  w_t >= 0,  e_t integer offsets.
// The terms define the causal upwind stencil of the eikonal discretization.

#include <array>
#include <vector>

#include "se2fm/grid.hpp"
#include "se2fm/metric.hpp"

namespace se2fm {

using Offset = std::array<int, 3>;

struct StencilTerm {
  double weight = 0.0;
  Offset offset{};
};

struct SellingStencil {
  std::vector<StencilTerm> terms;  ///< nonzero weights only, at most 6

  SymMat3 reconstruct() const;
  int max_abs_component() const;
};

struct SellingOptions {
  /// b_i^T D b_j <= obtuse_tolerance * trace(D) counts as obtuse; negative
  /// weights within the same band are clamped to zero.
  double obtuse_tolerance = 1e-12;
  int max_flips = 1000;
};

/// Throws Error(kNotPositiveDefinite) for non-SPD input and
/// Error(kConditioning) when the flip budget runs out.
SellingStencil decompose(const SymMat3& d, const SellingOptions& opts = {});

/// H D_eps H with H = diag(1/hx, 1/hy, 1/htheta): the inverse metric in index
/// coordinates, so stencil offsets are grid displacements.
SymMat3 scaled_inverse_metric(double theta, double cost,
                              const MetricParams& params, const GridSpec& grid);

/// Unit-cost stencils for every theta slice of a grid. The weights at a node
/// with cost C are the cached weights times C^-2; offsets never depend on C.
class StencilCache {
 public:
  StencilCache(const GridSpec& grid, const MetricParams& params);

  const SellingStencil& slice(int k) const { return slices_[k]; }
  int ntheta() const { return static_cast<int>(slices_.size()); }

  /// Displacements d such that a node q at slice `k` is read by the stencil
  /// of node q + d. Union over all slices, deduplicated.
  const std::vector<Offset>& dependents(int k) const { return reverse_[k]; }

  int max_abs_component() const;

 private:
  std::vector<SellingStencil> slices_;
  std::vector<std::vector<Offset>> reverse_;
};

}  // namespace se2fm
