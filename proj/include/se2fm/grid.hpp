#pragma once

// Discrete sampling of SE(2): a regular (x, y) lattice times a periodic
// theta axis, with theta_k = -pi + (k + 1) * htheta so that the last sample is
// exactly theta = pi. Flat storage is x-fastest, then y, then theta.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "se2fm/metric.hpp"

namespace se2fm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GridIndex {
  int i = 0;
  int j = 0;
  int k = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

struct GridSpec {
  int nx = 0;
  int ny = 0;
  int ntheta = 0;
  double hx = 1.0;
  double hy = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  /// Validation grid with step s = pi / n in every direction: x, y in
  /// [-2 pi, 2 pi] (4n + 1 samples each) and theta in [-pi + s, pi] (2n
  /// samples). The origin pose is the node center_index().
  static GridSpec validation(int n);

  /// Throws Error(kInvalidArgument) on non-positive sizes or steps.
  void validate() const;

  double htheta() const;
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(ntheta);
  }
  std::size_t slice_size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }

  int wrap_k(int k) const {
    const int r = k % ntheta;
    return r < 0 ? r + ntheta : r;
  }
  bool in_plane(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }

  /// Flat index of (i, j, k); k is taken modulo ntheta. Throws
  /// Error(kOutOfDomain) for spatial indices outside the grid.
  std::size_t index_of(int i, int j, int k) const;
  std::size_t index_of(const GridIndex& g) const { return index_of(g.i, g.j, g.k); }
  /// Unchecked variant for in-range (i, j) and k in [0, ntheta).
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }
  GridIndex unflatten(std::size_t idx) const;

  double x_of(int i) const { return origin_x + i * hx; }
  double y_of(int j) const { return origin_y + j * hy; }
  /// theta of slice k (wrapped). theta_of(ntheta - 2 - k) == -theta_of(k)
  /// exactly, which keeps mirror-symmetric slices bitwise consistent.
  double theta_of(int k) const;
  Pose pose_of(int i, int j, int k) const;
  Pose pose_of(const GridIndex& g) const { return pose_of(g.i, g.j, g.k); }

  /// Slice whose angle is closest to theta.
  int nearest_k(double theta) const;
  /// Continuous index coordinates (fi, fj, fk) of a pose; fk lies in
  /// [0, ntheta) after wrapping.
  Vec3 continuous_index(const Pose& p) const;
  /// True when (x, y) lies inside the spatial bounding box of the nodes.
  bool contains(double x, double y) const;
  /// Node at (0, 0, 0) for grids centered on the origin; in general the
  /// middle spatial node with the theta = 0 slice (or the closest one).
  GridIndex center_index() const;

  double cell_diagonal() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// External cost on SE(2), one value per node in (0, 1].
struct CostVolume {
  GridSpec grid;
  std::vector<double> values;

  static CostVolume uniform(const GridSpec& grid, double value = 1.0);
  /// Throws kSizeMismatch / kNonPositiveCost / kInvalidArgument.
  void validate() const;

  double at(int i, int j, int k) const { return values[grid.flat(i, j, k)]; }
  double min_value() const;
  double max_value() const;
};

/// Replicates a planar cost image(i, j) (x-fastest, nx * ny values) over all
/// orientations.
CostVolume lift_cost_2d(std::span<const double> image, int image_nx,
                        int image_ny, const GridSpec& grid);

/// Solved distance map; unreached nodes hold +inf.
struct DistanceField {
  GridSpec grid;
  std::vector<double> values;

  static DistanceField unreached(const GridSpec& grid);

  double at(int i, int j, int k) const { return values[grid.flat(i, j, k)]; }
  double& at(int i, int j, int k) { return values[grid.flat(i, j, k)]; }
  double max_finite() const;
  /// All nodes holding exactly zero.
  std::vector<GridIndex> zero_nodes() const;
};

/// Trilinear interpolation of a nodal quantity with theta wrap-around.
/// Exact at nodes; +inf if any of the 8 supporting nodes is +inf. Throws
/// Error(kOutOfDomain) if (x, y) leaves the spatial bounding box.
double interpolate(const GridSpec& grid, std::span<const double> values,
                   const Pose& p);
double interpolate(const DistanceField& field, const Pose& p);
double interpolate(const CostVolume& cost, const Pose& p);

}  // namespace se2fm
