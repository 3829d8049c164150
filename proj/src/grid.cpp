#include "se2fm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

constexpr double kPi = std::numbers::pi;
// Slack for points that sit on the outer face of the domain up to roundoff.
constexpr double kEdgeSlack = 1e-9;

}  // namespace

GridSpec GridSpec::validation(int n) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "validation grid needs n >= 1, got " + std::to_string(n));
  }
  GridSpec g;
  const double s = kPi / n;
  g.nx = 4 * n + 1;
  g.ny = 4 * n + 1;
  g.ntheta = 2 * n;
  g.hx = s;
  g.hy = s;
  g.origin_x = -2 * n * s;
  g.origin_y = -2 * n * s;
  return g;
}

void GridSpec::validate() const {
  if (nx < 1 || ny < 1 || ntheta < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid needs nx, ny >= 1 and ntheta >= 2");
  }
  if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
    throw Error(ErrorCode::kInvalidArgument, "grid steps must be positive");
  }
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw Error(ErrorCode::kInvalidArgument, "grid origin must be finite");
  }
}

double GridSpec::htheta() const { return 2.0 * kPi / ntheta; }

std::size_t GridSpec::index_of(int i, int j, int k) const {
  if (!in_plane(i, j)) {
    throw Error(ErrorCode::kOutOfDomain,
                "spatial index (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") outside " + std::to_string(nx) +
                    "x" + std::to_string(ny));
  }
  return flat(i, j, wrap_k(k));
}

GridIndex GridSpec::unflatten(std::size_t idx) const {
  const std::size_t plane = slice_size();
  const auto k = static_cast<int>(idx / plane);
  const std::size_t rem = idx - static_cast<std::size_t>(k) * plane;
  const auto j = static_cast<int>(rem / nx);
  const auto i = static_cast<int>(rem - static_cast<std::size_t>(j) * nx);
  return {i, j, k};
}

double GridSpec::theta_of(int k) const {
  const int m = 2 * (wrap_k(k) + 1) - ntheta;  // theta = m * pi / ntheta
  if (m == ntheta) return kPi;
  return m * (kPi / ntheta);
}

Pose GridSpec::pose_of(int i, int j, int k) const {
  if (!in_plane(i, j)) {
    throw Error(ErrorCode::kOutOfDomain, "pose_of: spatial index out of range");
  }
  return {x_of(i), y_of(j), theta_of(k)};
}

int GridSpec::nearest_k(double theta) const {
  const double fk = (canonical_angle(theta) + kPi) / htheta() - 1.0;
  return wrap_k(static_cast<int>(std::lround(fk)));
}

Vec3 GridSpec::continuous_index(const Pose& p) const {
  const double fi = (p.x - origin_x) / hx;
  const double fj = (p.y - origin_y) / hy;
  double fk = (canonical_angle(p.theta) + kPi) / htheta() - 1.0;
  fk = std::fmod(fk, static_cast<double>(ntheta));
  if (fk < 0.0) fk += ntheta;
  return {fi, fj, fk};
}

bool GridSpec::contains(double x, double y) const {
  const double fi = (x - origin_x) / hx;
  const double fj = (y - origin_y) / hy;
  return fi >= -kEdgeSlack && fi <= (nx - 1) + kEdgeSlack &&
         fj >= -kEdgeSlack && fj <= (ny - 1) + kEdgeSlack;
}

GridIndex GridSpec::center_index() const {
  return {nx / 2, ny / 2, nearest_k(0.0)};
}

double GridSpec::cell_diagonal() const {
  const double ht = htheta();
  return std::sqrt(hx * hx + hy * hy + ht * ht);
}

CostVolume CostVolume::uniform(const GridSpec& grid, double value) {
  grid.validate();
  CostVolume c{grid, std::vector<double>(grid.size(), value)};
  c.validate();
  return c;
}

void CostVolume::validate() const {
  grid.validate();
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "cost volume holds " + std::to_string(values.size()) +
                    " values, grid needs " + std::to_string(grid.size()));
  }
  for (std::size_t n = 0; n < values.size(); ++n) {
    const double v = values[n];
    if (!(v > 0.0) || v > 1.0 || !std::isfinite(v)) {
      throw Error(ErrorCode::kNonPositiveCost,
                  "cost value " + std::to_string(v) + " at flat index " +
                      std::to_string(n) + " is outside (0, 1]");
    }
  }
}

double CostVolume::min_value() const {
  return values.empty() ? kInf : *std::min_element(values.begin(), values.end());
}

double CostVolume::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

CostVolume lift_cost_2d(std::span<const double> image, int image_nx,
                        int image_ny, const GridSpec& grid) {
  grid.validate();
  if (image_nx != grid.nx || image_ny != grid.ny ||
      image.size() != grid.slice_size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "image " + std::to_string(image_nx) + "x" +
                    std::to_string(image_ny) + " does not match grid " +
                    std::to_string(grid.nx) + "x" + std::to_string(grid.ny));
  }
  CostVolume c{grid, {}};
  c.values.reserve(grid.size());
  for (int k = 0; k < grid.ntheta; ++k) {
    c.values.insert(c.values.end(), image.begin(), image.end());
  }
  c.validate();
  return c;
}

DistanceField DistanceField::unreached(const GridSpec& grid) {
  grid.validate();
  return {grid, std::vector<double>(grid.size(), kInf)};
}

double DistanceField::max_finite() const {
  double m = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

std::vector<GridIndex> DistanceField::zero_nodes() const {
  std::vector<GridIndex> out;
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (values[n] == 0.0) out.push_back(grid.unflatten(n));
  }
  return out;
}

double interpolate(const GridSpec& grid, std::span<const double> values,
                   const Pose& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta) ||
      !grid.contains(p.x, p.y)) {
    throw Error(ErrorCode::kOutOfDomain,
                "interpolation point (" + std::to_string(p.x) + ", " +
                    std::to_string(p.y) + ") outside the spatial domain");
  }
  const Vec3 f = grid.continuous_index(p);
  auto split = [](double v, int n, int& lo, double& t) {
    v = std::clamp(v, 0.0, static_cast<double>(n - 1));
    lo = std::min(static_cast<int>(std::floor(v)), std::max(n - 2, 0));
    t = v - lo;
  };
  int i0, j0;
  double tx, ty;
  split(f[0], grid.nx, i0, tx);
  split(f[1], grid.ny, j0, ty);
  const int i1 = std::min(i0 + 1, grid.nx - 1);
  const int j1 = std::min(j0 + 1, grid.ny - 1);
  int k0 = static_cast<int>(std::floor(f[2]));
  const double tk = f[2] - k0;
  k0 = grid.wrap_k(k0);
  const int k1 = grid.wrap_k(k0 + 1);

  const int is[2] = {i0, i1};
  const int js[2] = {j0, j1};
  const int ks[2] = {k0, k1};
  const double wx[2] = {1.0 - tx, tx};
  const double wy[2] = {1.0 - ty, ty};
  const double wk[2] = {1.0 - tk, tk};
  double acc = 0.0;
  for (int c = 0; c < 2; ++c) {
    for (int b = 0; b < 2; ++b) {
      for (int a = 0; a < 2; ++a) {
        const double v = values[grid.flat(is[a], js[b], ks[c])];
        if (std::isinf(v)) return kInf;
        const double w = wx[a] * wy[b] * wk[c];
        if (w != 0.0) acc += w * v;
      }
    }
  }
  return acc;
}

double interpolate(const DistanceField& field, const Pose& p) {
  return interpolate(field.grid, field.values, p);
}

double interpolate(const CostVolume& cost, const Pose& p) {
  return interpolate(cost.grid, cost.values, p);
}

}  // namespace se2fm
