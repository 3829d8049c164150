#pragma once

// Geodesic backtracking: integrate gamma' = -D_eps(gamma) grad W(gamma) from a
// start pose down the distance map until a seed is reached.

#include <filesystem>
#include <vector>

#include "se2fm/grid.hpp"
#include "se2fm/metric.hpp"

namespace se2fm {

struct GeodesicPath {
  std::vector<Pose> poses;         ///< start first, seed last
  std::vector<double> arclength;   ///< cumulative metric length per vertex

  double length() const { return arclength.empty() ? 0.0 : arclength.back(); }
};

struct TraceOptions {
  /// Displacement per RK4 step in physical units along the normalized
  /// direction; the index-space displacement is step / min(hx, hy, htheta).
  /// 0 selects 0.25 * min(hx, hy, htheta).
  double step = 0.0;
  /// Termination distance to the nearest seed (Euclidean in (x, y, theta),
  /// theta wrapped). 0 selects one cell diagonal.
  double seed_radius = 0.0;
  /// 0 selects 10 * (nx + ny + ntheta) / 0.25.
  int max_steps = 0;
};

/// Central differences of the interpolated field with half-cell steps.
/// Throws kOutOfDomain near the boundary and kUnreachable on +inf values.
Vec3 gradient_at(const DistanceField& field, const Pose& p);

/// Throws kNonConvergence when the step cap is hit (a spurious local minimum
/// of W), kOutOfDomain / kUnreachable for invalid starts.
GeodesicPath trace(const DistanceField& field, const CostVolume& cost,
                   const MetricParams& params, const Pose& start,
                   const TraceOptions& options = {});

/// Seeds are the nodes where the field is exactly 0.
GeodesicPath trace(const DistanceField& field, const CostVolume& cost,
                   const MetricParams& params, const Pose& start,
                   const std::vector<Pose>& seeds,
                   const TraceOptions& options = {});

/// Header `x,y,theta,arclength`, one row per vertex.
void write_path_csv(const GeodesicPath& path, const std::filesystem::path& out);
void write_path_json(const GeodesicPath& path, const std::filesystem::path& out);

}  // namespace se2fm
