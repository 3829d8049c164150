#include "se2fm/metric.hpp"

#include <cmath>
#include <string>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

constexpr double kPi = std::numbers::pi;

// sin/cos with exact zeros at multiples of pi/2, so that axis-aligned slices
// produce exactly diagonal tensors.
void sincos_snapped(double theta, double& s, double& c) {
  s = std::sin(theta);
  c = std::cos(theta);
  if (std::abs(s) < 1e-15) s = 0.0;
  if (std::abs(c) < 1e-15) c = 0.0;
}

// R diag(a, b, c) R^T where R has columns X1, X2, X3. X2 = d_theta decouples,
// so only the (x, y) block mixes.
SymMat3 rotate_diag(double theta, double along, double rot, double side) {
  double s, c;
  sincos_snapped(theta, s, c);
  SymMat3 m;
  m.xx = along * c * c + side * s * s;
  m.xy = (along - side) * c * s;
  m.yy = along * s * s + side * c * c;
  m.tt = rot;
  return m;
}

void check_cost(double cost) {
  if (!(cost > 0.0) || !std::isfinite(cost)) {
    throw Error(ErrorCode::kNonPositiveCost,
                "cost must be positive and finite, got " + std::to_string(cost));
  }
}

}  // namespace

double canonical_angle(double theta) {
  double t = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

double angle_diff(double a, double b) { return canonical_angle(a - b); }

void MetricParams::validate() const {
  if (!(epsilon > 0.0) || epsilon > 1.0 || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument,
                "epsilon must lie in (0, 1], got " + std::to_string(epsilon));
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidArgument,
                "beta must be positive, got " + std::to_string(beta));
  }
}

double SymMat3::operator()(int r, int c) const {
  if (r > c) std::swap(r, c);
  switch (r * 3 + c) {
    case 0: return xx;
    case 1: return xy;
    case 2: return xt;
    case 4: return yy;
    case 5: return yt;
    case 8: return tt;
  }
  return 0.0;
}

Vec3 SymMat3::operator*(const Vec3& v) const {
  return {xx * v[0] + xy * v[1] + xt * v[2],
          xy * v[0] + yy * v[1] + yt * v[2],
          xt * v[0] + yt * v[1] + tt * v[2]};
}

double SymMat3::quad(const Vec3& v) const { return bilinear(v, v); }

double SymMat3::bilinear(const Vec3& u, const Vec3& v) const {
  const Vec3 av = (*this) * v;
  return u[0] * av[0] + u[1] * av[1] + u[2] * av[2];
}

double SymMat3::frobenius_norm() const {
  return std::sqrt(xx * xx + yy * yy + tt * tt +
                   2.0 * (xy * xy + xt * xt + yt * yt));
}

SymMat3 SymMat3::scaled(double s) const {
  return {xx * s, xy * s, xt * s, yy * s, yt * s, tt * s};
}

bool SymMat3::positive_definite() const {
  const double m1 = xx;
  const double m2 = xx * yy - xy * xy;
  const double m3 = xx * (yy * tt - yt * yt) - xy * (xy * tt - yt * xt) +
                    xt * (xy * yt - yy * xt);
  return m1 > 0.0 && m2 > 0.0 && m3 > 0.0;
}

SymMat3 operator-(const SymMat3& a, const SymMat3& b) {
  return {a.xx - b.xx, a.xy - b.xy, a.xt - b.xt,
          a.yy - b.yy, a.yt - b.yt, a.tt - b.tt};
}

Frame frame(double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {{c, s, 0.0}, {0.0, 0.0, 1.0}, {-s, c, 0.0}};
}

SymMat3 metric_matrix(double theta, double cost, const MetricParams& params) {
  params.validate();
  check_cost(cost);
  const double b2 = params.beta * params.beta;
  const double e2 = params.epsilon * params.epsilon;
  return rotate_diag(theta, b2, 1.0, b2 / e2).scaled(cost * cost);
}

SymMat3 inverse_metric(double theta, double cost, const MetricParams& params) {
  params.validate();
  check_cost(cost);
  const double ib2 = 1.0 / (params.beta * params.beta);
  const double e2 = params.epsilon * params.epsilon;
  return rotate_diag(theta, ib2, 1.0, e2 * ib2).scaled(1.0 / (cost * cost));
}

SymMat3 sub_riemannian_inverse_metric(double theta, double cost, double beta) {
  check_cost(cost);
  return rotate_diag(theta, 1.0 / (beta * beta), 1.0, 0.0)
      .scaled(1.0 / (cost * cost));
}

double metric_norm_sq(const Vec3& v, double theta, double cost,
                      const MetricParams& params) {
  params.validate();
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double along = v[0] * c + v[1] * s;
  const double side = v[0] * s - v[1] * c;
  const double c2 = cost * cost;
  const double b2 = params.beta * params.beta;
  const double e2 = params.epsilon * params.epsilon;
  return c2 * (b2 * along * along + v[2] * v[2]) + c2 * b2 * side * side / e2;
}

}  // namespace se2fm
