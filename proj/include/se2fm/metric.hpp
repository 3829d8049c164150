#pragma once

// Continuous geometry of SE(2) = R^2 x S^1: the left-invariant frame and the
// (relaxed) sub-Riemannian metric expressed in the fixed (x, y, theta) frame.
//
// Coordinate order is (x, y, theta) everywhere.

#include <array>
#include <numbers>

namespace se2fm {

using Vec3 = std::array<double, 3>;

/// Wraps an angle into (-pi, pi].
double canonical_angle(double theta);

/// Signed shortest angular difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose canonical() const { return {x, y, canonical_angle(theta)}; }
  Vec3 as_vec() const { return {x, y, theta}; }
};

/// Relaxation parameters of the metric.
///
/// `epsilon` weighs sideways motion by epsilon^-2; the sub-Riemannian case is
/// the limit epsilon -> 0 and is never represented exactly. `beta` trades
/// forward motion against rotation.
struct MetricParams {
  double epsilon = 0.1;
  double beta = 1.0;

  /// Throws Error(kInvalidArgument) unless 0 < epsilon <= 1 and beta > 0.
  void validate() const;
};

/// Symmetric 3x3 matrix stored by its six independent entries.
struct SymMat3 {
  double xx = 0.0, xy = 0.0, xt = 0.0;
  double yy = 0.0, yt = 0.0;
  double tt = 0.0;

  static SymMat3 identity() { return {1.0, 0.0, 0.0, 1.0, 0.0, 1.0}; }
  static SymMat3 diagonal(double a, double b, double c) {
    return {a, 0.0, 0.0, b, 0.0, c};
  }

  double operator()(int r, int c) const;
  Vec3 operator*(const Vec3& v) const;
  double quad(const Vec3& v) const;  ///< v^T A v
  double bilinear(const Vec3& u, const Vec3& v) const;  ///< u^T A v
  double trace() const { return xx + yy + tt; }
  double frobenius_norm() const;
  SymMat3 scaled(double s) const;
  /// Checks positive definiteness by the leading principal minors.
  bool positive_definite() const;
};

SymMat3 operator-(const SymMat3& a, const SymMat3& b);

/// Left-invariant frame (X1 forward, X2 rotation, X3 sideways) at angle theta.
struct Frame {
  Vec3 x1, x2, x3;
};
Frame frame(double theta);

/// Metric tensor M_eps(theta, cost) in fixed coordinates:
/// R diag(C^2 beta^2, C^2, eps^-2 C^2 beta^2) R^T with R = [X1 X2 X3].
SymMat3 metric_matrix(double theta, double cost, const MetricParams& params);

/// Closed-form inverse D_eps = R diag(C^-2 beta^-2, C^-2, eps^2 C^-2 beta^-2) R^T.
/// Never computed by inverting metric_matrix.
SymMat3 inverse_metric(double theta, double cost, const MetricParams& params);

/// The eps -> 0 limit of inverse_metric: a rank-2 matrix spanning {X1, X2}.
SymMat3 sub_riemannian_inverse_metric(double theta, double cost, double beta);

/// G_eps(v, v) = v^T M_eps v.
double metric_norm_sq(const Vec3& v, double theta, double cost,
                      const MetricParams& params);

}  // namespace se2fm
