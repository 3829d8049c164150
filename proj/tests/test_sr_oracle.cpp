#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>

#include "se2fm/error.hpp"
#include "se2fm/sr_oracle.hpp"

using namespace se2fm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

using Field = std::function<Vec3(const Vec3&)>;

Vec3 X1(const Vec3& q) { return {std::cos(q[2]), std::sin(q[2]), 0.0}; }
Vec3 X2(const Vec3&) { return {0.0, 0.0, 1.0}; }
Vec3 X3(const Vec3& q) { return {-std::sin(q[2]), std::cos(q[2]), 0.0}; }

// Lie bracket [X, Y] = (DY) X - (DX) Y with central-difference Jacobians.
Vec3 bracket(const Field& X, const Field& Y, const Vec3& q) {
  const double h = 1e-6;
  const Vec3 x = X(q), y = Y(q);
  Vec3 out{0, 0, 0};
  for (int c = 0; c < 3; ++c) {
    Vec3 qp = q, qm = q;
    qp[c] += h;
    qm[c] -= h;
    const Vec3 dy = Y(qp), dym = Y(qm), dx = X(qp), dxm = X(qm);
    for (int r = 0; r < 3; ++r) {
      out[r] += (dy[r] - dym[r]) / (2 * h) * x[c] - (dx[r] - dxm[r]) / (2 * h) * y[c];
    }
  }
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

class Sphere : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { arrivals_ = new ArrivalMap(6.0, SphereOptions{}); }
  static void TearDownTestSuite() { delete arrivals_; }
  static inline ArrivalMap* arrivals_ = nullptr;
};

bool contains_pose(const SphereSample& s, const Pose& p, double tol) {
  for (const auto& e : s.endpoints) {
    if (std::abs(e.pose.x - p.x) < tol && std::abs(e.pose.y - p.y) < tol &&
        std::abs(angle_diff(e.pose.theta, p.theta)) < tol)
      return true;
  }
  return false;
}

}  // namespace

// The shooting equations rest on the frame X1 = (cos, sin, 0), X2 = (0, 0, 1),
// X3 = (-sin, cos, 0). Their brackets are checked numerically here, and the
// momentum equations are re-derived from the canonical Hamiltonian system in
// (x, y, theta, p) with H = (h1^2 + h2^2) / 2, h_i = <p, X_i>.
TEST(Derivation, LieBrackets) {
  std::mt19937 rng(40);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 0; n < 50; ++n) {
    const Vec3 q{u(rng), u(rng), u(rng)};
    const Vec3 b12 = bracket(X1, X2, q), b23 = bracket(X2, X3, q), b13 = bracket(X1, X3, q);
    const Vec3 x1 = X1(q), x3 = X3(q);
    for (int r = 0; r < 3; ++r) {
      EXPECT_NEAR(b12[r], -x3[r], 1e-8);  // [X1, X2] = -X3
      EXPECT_NEAR(b23[r], -x1[r], 1e-8);  // [X2, X3] = -X1
      EXPECT_NEAR(b13[r], 0.0, 1e-8);     // [X1, X3] = 0
    }
  }
}

TEST(Derivation, CanonicalHamiltonianGivesMomentumEquations) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  // z = (x, y, theta, px, py, ptheta)
  auto momenta = [](const std::array<double, 6>& z) {
    const double c = std::cos(z[2]), s = std::sin(z[2]);
    return Vec3{z[3] * c + z[4] * s, z[5], -z[3] * s + z[4] * c};
  };
  auto H = [&](const std::array<double, 6>& z) {
    const Vec3 h = momenta(z);
    return 0.5 * (h[0] * h[0] + h[1] * h[1]);
  };
  const double e = 1e-6;
  for (int n = 0; n < 50; ++n) {
    std::array<double, 6> z{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    std::array<double, 6> grad{};
    for (int c = 0; c < 6; ++c) {
      auto zp = z, zm = z;
      zp[c] += e;
      zm[c] -= e;
      grad[c] = (H(zp) - H(zm)) / (2 * e);
    }
    // q' = dH/dp, p' = -dH/dq
    const std::array<double, 6> zdot{grad[3], grad[4], grad[5], -grad[0], -grad[1], -grad[2]};
    // h' by the chain rule, differentiating h(z) along zdot.
    auto zp = z, zm = z;
    for (int c = 0; c < 6; ++c) {
      zp[c] += e * zdot[c];
      zm[c] -= e * zdot[c];
    }
    const Vec3 hp = momenta(zp), hm = momenta(zm), h = momenta(z);
    const HamiltonianState s{z[0], z[1], z[2], h[0], h[1], h[2]};
    const HamiltonianState f = hamiltonian_rhs(s);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(f[c], zdot[c], 1e-8) << "pose " << c;
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(f[3 + c], (hp[c] - hm[c]) / (2 * e), 1e-7) << "h" << c + 1;
  }
}

TEST(Shoot, StraightLine) {
  const ShotGeodesic g = shoot(0.0, 0.0, 2.0, 1e-3);
  EXPECT_NEAR(g.endpoint.x, 2.0, 1e-12);
  EXPECT_NEAR(g.endpoint.y, 0.0, 1e-12);
  EXPECT_NEAR(g.endpoint.theta, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.t, 2.0);
}

TEST(Shoot, PureRotation) {
  const ShotGeodesic g = shoot(kPi / 2, 0.0, 1.0, 1e-3);
  EXPECT_NEAR(g.endpoint.x, 0.0, 1e-12);
  EXPECT_NEAR(g.endpoint.y, 0.0, 1e-12);
  EXPECT_NEAR(g.endpoint.theta, 1.0, 1e-12);
}

TEST(Shoot, LandsExactlyOnTmax) {
  const ShotGeodesic a = shoot(0.0, 0.0, 1.0005, 1e-3, true);
  EXPECT_NEAR(a.endpoint.x, 1.0005, 1e-12);
  EXPECT_EQ(a.trail.size(), 1001u + 1u);
}

TEST(Shoot, InvalidArguments) {
  EXPECT_EQ(code_of([] { shoot(0.0, 0.0, 0.0, 1e-3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { shoot(0.0, 0.0, 1.0, 0.0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { shoot(0.0, 0.0, 1.0, -1e-3); }), ErrorCode::kInvalidArgument);
}

TEST(Shoot, MomentumConservedOverSixUnits) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> a(0.0, 2 * kPi), c(-6.0, 6.0);
  for (int n = 0; n < 200; ++n) {
    const ShotGeodesic g = shoot(a(rng), c(rng), 6.0, 1e-3, true);
    const auto& s = g.final_state;
    EXPECT_NEAR(s[3] * s[3] + s[4] * s[4], 1.0, 1e-9);
  }
}

TEST(Shoot, MirrorSymmetry) {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> a(0.0, 2 * kPi), c(-6.0, 6.0);
  for (int n = 0; n < 200; ++n) {
    const double al = a(rng), cc = c(rng);
    const Pose p = shoot(al, cc, 4.0, 1e-3).endpoint;
    const Pose q = shoot(-al, -cc, 4.0, 1e-3).endpoint;
    EXPECT_NEAR(p.x, q.x, 1e-9);
    EXPECT_NEAR(p.y, -q.y, 1e-9);
    EXPECT_NEAR(angle_diff(p.theta, -q.theta), 0.0, 1e-9);
  }
}

TEST(Shoot, ConvergesUnderStepRefinement) {
  const Pose a = shoot(0.7, 2.3, 4.0, 1e-2).endpoint;
  const Pose b = shoot(0.7, 2.3, 4.0, 5e-3).endpoint;
  EXPECT_NEAR(a.x, b.x, 1e-7);
  EXPECT_NEAR(a.y, b.y, 1e-7);
  EXPECT_NEAR(angle_diff(a.theta, b.theta), 0.0, 1e-7);
}

TEST(ArrivalBin, CenteredAndWrapped) {
  EXPECT_EQ(arrival_bin({0.0, 0.0, 0.0}, 0.05), (std::array<long long, 3>{0, 0, 0}));
  EXPECT_EQ(arrival_bin({1e-16, -1e-16, 0.0}, 0.05), (std::array<long long, 3>{0, 0, 0}));
  EXPECT_EQ(arrival_bin({0.024, 0.026, 0.0}, 0.05), (std::array<long long, 3>{0, 1, 0}));
  EXPECT_EQ(arrival_bin({0.0, 0.0, kPi}, 0.05), arrival_bin({0.0, 0.0, -kPi}, 0.05));
}

TEST_F(Sphere, RotationEndpointPresent) {
  const SphereSample s = sample_sphere(kPi / 2, SphereOptions{}, *arrivals_);
  EXPECT_TRUE(contains_pose(s, {0.0, 0.0, kPi / 2}, 1e-9));
  EXPECT_GT(s.dropped, 0u);
  EXPECT_EQ(s.shot, 64u * 201u);
  EXPECT_EQ(s.shot, s.endpoints.size() + s.dropped);
}

TEST_F(Sphere, StraightEndpointPresent) {
  const SphereSample s = sample_sphere(2.0, SphereOptions{}, *arrivals_);
  EXPECT_TRUE(contains_pose(s, {2.0, 0.0, 0.0}, 1e-9));
}

TEST_F(Sphere, NonEmptyAtValidationRadii) {
  for (double t : {2.0, 4.0, 6.0}) {
    const SphereSample s = sample_sphere(t, SphereOptions{}, *arrivals_);
    EXPECT_FALSE(s.endpoints.empty()) << "t " << t;
    for (const auto& e : s.endpoints) EXPECT_LE(e.first_arrival, t);
  }
}

TEST_F(Sphere, AxisArrivalsMatchAnalyticDistance) {
  const double b = SphereOptions{}.bin_size;
  for (double v : {0.5, 1.0, 2.0, 3.5, 5.0}) {
    for (double sgn : {-1.0, 1.0}) {
      EXPECT_NEAR(arrivals_->first_arrival({sgn * v, 0.0, 0.0}), v, b) << "x " << sgn * v;
    }
  }
  for (double v : {0.5, 1.0, 2.0, 3.0}) {
    for (double sgn : {-1.0, 1.0}) {
      EXPECT_NEAR(arrivals_->first_arrival({0.0, 0.0, sgn * v}), v, b) << "theta " << sgn * v;
    }
  }
}

TEST_F(Sphere, DropsEndpointsPastCutTime) {
  // Rotating in place by more than pi is never minimal.
  const SphereSample s = sample_sphere(4.0, SphereOptions{}, *arrivals_);
  EXPECT_FALSE(contains_pose(s, {0.0, 0.0, 4.0}, 1e-6));
  EXPECT_TRUE(contains_pose(s, {4.0, 0.0, 0.0}, 1e-9));
}

TEST_F(Sphere, UnreachedBinIsInfinite) {
  EXPECT_TRUE(std::isinf(arrivals_->first_arrival({50.0, 50.0, 0.0})));
  EXPECT_GT(arrivals_->bins(), 0u);
}

TEST(SphereStability, HalvedStepKeepsFirstArrivals) {
  SphereOptions coarse;
  coarse.n_alpha = 32;
  coarse.n_c = 41;
  SphereOptions fine = coarse;
  fine.dt = coarse.dt / 2;
  const ArrivalMap a(3.0, coarse), b(3.0, fine);
  const SphereSample s = sample_sphere(3.0, coarse, a);
  ASSERT_FALSE(s.endpoints.empty());
  for (const auto& e : s.endpoints) {
    EXPECT_LT(std::abs(a.first_arrival(e.pose) - b.first_arrival(e.pose)), coarse.bin_size);
  }
}

TEST(SphereOptionsCheck, InvalidAndEmpty) {
  SphereOptions o;
  o.n_alpha = 0;
  EXPECT_EQ(code_of([&] { sample_sphere(1.0, o); }), ErrorCode::kInvalidArgument);
  o = SphereOptions{};
  o.bin_size = 0.0;
  EXPECT_EQ(code_of([&] { sample_sphere(1.0, o); }), ErrorCode::kInvalidArgument);
  o = SphereOptions{};
  EXPECT_EQ(code_of([&] { sample_sphere(-1.0, o); }), ErrorCode::kInvalidArgument);
}

TEST(MaxRelativeError, Examples) {
  const GridSpec g = GridSpec::validation(10);
  DistanceField f = DistanceField::unreached(g);
  // Analytic values on the x axis (|x|), so (2, 0, 0) interpolates exactly
  // between axis nodes.
  const GridIndex c = g.center_index();
  for (auto& v : f.values) v = 100.0;
  for (int i = 0; i < g.nx; ++i) {
    for (int k : {c.k - 1, c.k, c.k + 1}) {
      for (int j : {c.j - 1, c.j, c.j + 1}) f.at(i, j, k) = std::abs(g.x_of(i));
    }
  }
  SphereSample s;
  s.t = 2.0;
  s.endpoints.push_back({0.0, 0.0, {2.0, 0.0, 0.0}, 2.0});
  SphereError e = max_relative_error(f, s);
  EXPECT_NEAR(e.e_inf, 0.0, 1e-12);
  EXPECT_EQ(e.used, 1u);

  for (auto& v : f.values) v = 2 * s.t;
  s.endpoints.push_back({0.0, 0.0, {-1.0, 0.7, 2.0}, 2.0});
  EXPECT_NEAR(max_relative_error(f, s).e_inf, 1.0, 1e-12);

  f.at(c.i, c.j, c.k) = kInf;
  s.endpoints.push_back({0.0, 0.0, {0.01, 0.01, 0.01}, 2.0});
  e = max_relative_error(f, s);
  EXPECT_EQ(e.excluded, 1u);
  EXPECT_EQ(e.used, 2u);

  SphereSample only_inf;
  only_inf.t = 2.0;
  only_inf.endpoints.push_back({0.0, 0.0, {0.01, 0.01, 0.01}, 2.0});
  EXPECT_EQ(code_of([&] { max_relative_error(f, only_inf); }), ErrorCode::kEmptyResult);

  SphereSample outside;
  outside.t = 20.0;
  outside.endpoints.push_back({0.0, 0.0, {20.0, 0.0, 0.0}, 20.0});
  EXPECT_EQ(code_of([&] { max_relative_error(f, outside); }), ErrorCode::kOutOfDomain);
}

TEST(WriteSphereCsv, Format) {
  SphereSample s;
  s.t = 1.0;
  s.endpoints.push_back({0.5, -1.0, {0.1, 0.2, 0.3}, 0.98});
  const fs::path p = fs::temp_directory_path() / "se2fm_sphere_test.csv";
  write_sphere_csv(s, p);
  std::ifstream in(p);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "alpha,c,x,y,theta,t");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
  EXPECT_EQ(row.substr(row.rfind(',') + 1), "1");
  fs::remove(p);
}
