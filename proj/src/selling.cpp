#include "se2fm/selling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

using IVec = std::array<long long, 3>;

Vec3 to_real(const IVec& v) {
  return {static_cast<double>(v[0]), static_cast<double>(v[1]),
          static_cast<double>(v[2])};
}

IVec cross(const IVec& a, const IVec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Offsets are defined up to sign; fix the first nonzero component positive.
Offset canonical_sign(const IVec& v) {
  int sign = 1;
  for (long long c : v) {
    if (c != 0) {
      sign = c > 0 ? 1 : -1;
      break;
    }
  }
  return {static_cast<int>(sign * v[0]), static_cast<int>(sign * v[1]),
          static_cast<int>(sign * v[2])};
}

}  // namespace

SymMat3 SellingStencil::reconstruct() const {
  SymMat3 m{};
  for (const auto& t : terms) {
    const double a = t.offset[0], b = t.offset[1], c = t.offset[2];
    m.xx += t.weight * a * a;
    m.xy += t.weight * a * b;
    m.xt += t.weight * a * c;
    m.yy += t.weight * b * b;
    m.yt += t.weight * b * c;
    m.tt += t.weight * c * c;
  }
  return m;
}

int SellingStencil::max_abs_component() const {
  int m = 0;
  for (const auto& t : terms) {
    for (int c : t.offset) m = std::max(m, std::abs(c));
  }
  return m;
}

SellingStencil decompose(const SymMat3& d, const SellingOptions& opts) {
  if (!d.positive_definite()) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "Selling decomposition needs a positive definite matrix");
  }
  const double tol = opts.obtuse_tolerance * d.trace();

  // Superbase b0 + b1 + b2 + b3 = 0, starting from the canonical basis.
  std::array<IVec, 4> b = {IVec{-1, -1, -1}, IVec{1, 0, 0}, IVec{0, 1, 0},
                           IVec{0, 0, 1}};
  auto dot = [&](int i, int j) { return d.bilinear(to_real(b[i]), to_real(b[j])); };

  int flips = 0;
  for (;;) {
    int fi = -1, fj = -1;
    for (int i = 0; i < 4 && fi < 0; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        if (dot(i, j) > tol) {
          fi = i;
          fj = j;
          break;
        }
      }
    }
    if (fi < 0) break;
    if (++flips > opts.max_flips) {
      throw Error(ErrorCode::kConditioning,
                  "Selling reduction exceeded the flip budget");
    }
    const IVec bi = b[fi];
    for (int k = 0; k < 4; ++k) {
      if (k == fi || k == fj) continue;
      for (int c = 0; c < 3; ++c) b[k][c] += bi[c];
    }
    for (int c = 0; c < 3; ++c) b[fi][c] = -bi[c];
  }

  SellingStencil s;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      double w = -dot(i, j);
      if (w <= tol) {
        if (w < -tol) {
          throw Error(ErrorCode::kConditioning,
                      "Selling reduction ended on a non-obtuse superbase");
        }
        continue;
      }
      int k = 0;
      while (k == i || k == j) ++k;
      int l = k + 1;
      while (l == i || l == j) ++l;
      s.terms.push_back({w, canonical_sign(cross(b[k], b[l]))});
    }
  }
  return s;
}

SymMat3 scaled_inverse_metric(double theta, double cost,
                              const MetricParams& params,
                              const GridSpec& grid) {
  const SymMat3 d = inverse_metric(theta, cost, params);
  const double sx = 1.0 / grid.hx;
  const double sy = 1.0 / grid.hy;
  const double st = 1.0 / grid.htheta();
  return {d.xx * sx * sx, d.xy * sx * sy, d.xt * sx * st,
          d.yy * sy * sy, d.yt * sy * st, d.tt * st * st};
}

StencilCache::StencilCache(const GridSpec& grid, const MetricParams& params) {
  grid.validate();
  params.validate();
  const int nt = grid.ntheta;
  slices_.resize(nt);
  // Slices with theta < 0 are mirrored from theta > 0 through
  // (x, y, theta) -> (x, -y, -theta), so the discrete scheme inherits that
  // symmetry bitwise.
  for (int k = 0; k < nt; ++k) {
    const int mirror = grid.wrap_k(nt - 2 - k);
    if (grid.theta_of(k) < 0.0 && mirror != k) continue;
    slices_[k] = decompose(scaled_inverse_metric(grid.theta_of(k), 1.0, params, grid));
  }
  for (int k = 0; k < nt; ++k) {
    const int mirror = grid.wrap_k(nt - 2 - k);
    if (!(grid.theta_of(k) < 0.0 && mirror != k)) continue;
    SellingStencil s = slices_[mirror];
    for (auto& t : s.terms) {
      t.offset[1] = -t.offset[1];
      t.offset[2] = -t.offset[2];
    }
    slices_[k] = std::move(s);
  }

  reverse_.assign(nt, {});
  auto add = [](std::vector<Offset>& list, const Offset& o) {
    if (std::find(list.begin(), list.end(), o) == list.end()) list.push_back(o);
  };
  for (int k = 0; k < nt; ++k) {
    for (const auto& t : slices_[k].terms) {
      const Offset& e = t.offset;
      // A node m in slice k reads m + e (slice k + e_theta) and m - e.
      add(reverse_[grid.wrap_k(k + e[2])], Offset{-e[0], -e[1], -e[2]});
      add(reverse_[grid.wrap_k(k - e[2])], e);
    }
  }
}

int StencilCache::max_abs_component() const {
  int m = 0;
  for (const auto& s : slices_) m = std::max(m, s.max_abs_component());
  return m;
}

}  // namespace se2fm
