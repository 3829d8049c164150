#include "se2fm/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include <nlohmann/json.hpp>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

double seed_distance(const Pose& p, const Pose& s) {
  const double dx = p.x - s.x;
  const double dy = p.y - s.y;
  const double dt = angle_diff(p.theta, s.theta);
  return std::sqrt(dx * dx + dy * dy + dt * dt);
}

double nearest_seed(const Pose& p, const std::vector<Pose>& seeds,
                    std::size_t* which) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const double d = seed_distance(p, seeds[s]);
    if (d < best) {
      best = d;
      *which = s;
    }
  }
  return best;
}

Pose advance(const Pose& p, const Vec3& v, double h) {
  return {p.x + h * v[0], p.y + h * v[1], canonical_angle(p.theta + h * v[2])};
}

class DescentField {
 public:
  DescentField(const DistanceField& field, const CostVolume& cost,
               const MetricParams& params)
      : field_(field), cost_(cost), params_(params) {
    const GridSpec& g = field.grid;
    scale_ = {1.0 / g.hx, 1.0 / g.hy, 1.0 / g.htheta()};
    hmin_ = std::min({g.hx, g.hy, g.htheta()});
  }

  // Unit direction of -D grad W, normalized in index space and rescaled so
  // that one unit of "h" moves 1/hmin cells.
  Vec3 direction(const Pose& p) const {
    const Vec3 grad = gradient_at(field_, p);
    const double c = interpolate(cost_, p);
    const Vec3 v = inverse_metric(p.theta, c, params_) * grad;
    const Vec3 vi = {-v[0] * scale_[0], -v[1] * scale_[1], -v[2] * scale_[2]};
    const double norm = std::sqrt(vi[0] * vi[0] + vi[1] * vi[1] + vi[2] * vi[2]);
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::kNonConvergence,
                  "vanishing descent direction (flat distance map)");
    }
    const double f = 1.0 / (norm * hmin_);
    return {vi[0] * f / scale_[0], vi[1] * f / scale_[1], vi[2] * f / scale_[2]};
  }

  double segment_length(const Pose& a, const Pose& b) const {
    const Pose mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y),
                   a.theta + 0.5 * angle_diff(b.theta, a.theta)};
    const Vec3 d = {b.x - a.x, b.y - a.y, angle_diff(b.theta, a.theta)};
    const double c = interpolate(cost_, mid);
    return std::sqrt(metric_norm_sq(d, mid.theta, c, params_));
  }

 private:
  const DistanceField& field_;
  const CostVolume& cost_;
  const MetricParams& params_;
  Vec3 scale_{};
  double hmin_ = 1.0;
};

}  // namespace

Vec3 gradient_at(const DistanceField& field, const Pose& p) {
  const GridSpec& g = field.grid;
  const double hs[3] = {0.5 * g.hx, 0.5 * g.hy, 0.5 * g.htheta()};
  Vec3 grad{};
  for (int axis = 0; axis < 3; ++axis) {
    Pose lo = p, hi = p;
    if (axis == 0) {
      lo.x -= hs[0];
      hi.x += hs[0];
    } else if (axis == 1) {
      lo.y -= hs[1];
      hi.y += hs[1];
    } else {
      lo.theta -= hs[2];
      hi.theta += hs[2];
    }
    const double wl = interpolate(field, lo);
    const double wh = interpolate(field, hi);
    if (!std::isfinite(wl) || !std::isfinite(wh)) {
      throw Error(ErrorCode::kUnreachable,
                  "gradient stencil touches unreached nodes");
    }
    grad[axis] = (wh - wl) / (2.0 * hs[axis]);
  }
  return grad;
}

GeodesicPath trace(const DistanceField& field, const CostVolume& cost,
                   const MetricParams& params, const Pose& start,
                   const TraceOptions& options) {
  std::vector<Pose> seeds;
  for (const auto& n : field.zero_nodes()) seeds.push_back(field.grid.pose_of(n));
  return trace(field, cost, params, start, seeds, options);
}

GeodesicPath trace(const DistanceField& field, const CostVolume& cost,
                   const MetricParams& params, const Pose& start,
                   const std::vector<Pose>& seeds,
                   const TraceOptions& options) {
  params.validate();
  const GridSpec& g = field.grid;
  if (!(g == cost.grid)) {
    throw Error(ErrorCode::kSizeMismatch, "field and cost grids differ");
  }
  if (seeds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trace needs at least one seed");
  }
  const double hmin = std::min({g.hx, g.hy, g.htheta()});
  const double step = options.step > 0.0 ? options.step : 0.25 * hmin;
  const double radius =
      options.seed_radius > 0.0 ? options.seed_radius : g.cell_diagonal();
  const int cap = options.max_steps > 0
                      ? options.max_steps
                      : static_cast<int>(10.0 * (g.nx + g.ny + g.ntheta) / 0.25);

  Pose p = start.canonical();
  const double w0 = interpolate(field, p);
  if (!std::isfinite(w0)) {
    throw Error(ErrorCode::kUnreachable, "start pose has no finite distance");
  }

  const DescentField descent(field, cost, params);
  GeodesicPath path;
  path.poses.push_back(p);
  path.arclength.push_back(0.0);

  auto finish = [&](const Pose& seed) {
    if (seed_distance(path.poses.back(), seed) > 1e-12) {
      const double len = descent.segment_length(path.poses.back(), seed);
      path.poses.push_back(seed);
      path.arclength.push_back(path.arclength.back() + len);
    }
    return path;
  };

  for (int n = 0; n <= cap; ++n) {
    std::size_t which = 0;
    if (nearest_seed(p, seeds, &which) <= radius) return finish(seeds[which]);
    if (n == cap) break;
    // Classic RK4 on the normalized direction field.
    const Vec3 k1 = descent.direction(p);
    const Vec3 k2 = descent.direction(advance(p, k1, 0.5 * step));
    const Vec3 k3 = descent.direction(advance(p, k2, 0.5 * step));
    const Vec3 k4 = descent.direction(advance(p, k3, step));
    Vec3 v;
    for (int c = 0; c < 3; ++c) v[c] = (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) / 6.0;
    const Pose next = advance(p, v, step);
    path.arclength.push_back(path.arclength.back() +
                             descent.segment_length(p, next));
    path.poses.push_back(next);
    p = next;
  }
  throw Error(ErrorCode::kNonConvergence,
              "backtracking did not reach a seed within " +
                  std::to_string(cap) + " steps");
}

void write_path_csv(const GeodesicPath& path, const std::filesystem::path& out) {
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot write " + out.string());
  f << "x,y,theta,arclength\n" << std::setprecision(17);
  for (std::size_t m = 0; m < path.poses.size(); ++m) {
    const Pose& p = path.poses[m];
    f << p.x << ',' << p.y << ',' << p.theta << ',' << path.arclength[m] << '\n';
  }
}

void write_path_json(const GeodesicPath& path, const std::filesystem::path& out) {
  nlohmann::json j;
  j["length"] = path.length();
  auto& verts = j["vertices"] = nlohmann::json::array();
  for (std::size_t m = 0; m < path.poses.size(); ++m) {
    const Pose& p = path.poses[m];
    verts.push_back({{"x", p.x}, {"y", p.y}, {"theta", p.theta},
                     {"arclength", path.arclength[m]}});
  }
  std::ofstream f(out, std::ios::trunc);
  if (!(f << j.dump(2) << '\n')) {
    throw Error(ErrorCode::kIoFailure, "cannot write " + out.string());
  }
}

}  // namespace se2fm
