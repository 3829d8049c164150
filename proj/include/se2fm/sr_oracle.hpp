#pragma once

// Ground truth for uniform cost (C = 1, beta = 1): arclength-parametrized
// sub-Riemannian geodesics from the origin by integrating the Hamiltonian
// system in left-invariant momenta h_i = <lambda, X_i>:
//
//   x' = h1 cos(theta)   y' = h1 sin(theta)   theta' = h2
//   h1' = h2 h3          h2' = -h1 h3         h3' = -h1 h2
//
// obtained from the maximum principle with [X1, X2] = -X3, [X2, X3] = -X1,
// [X1, X3] = 0. h1^2 + h2^2 = 1 is conserved.

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include "se2fm/grid.hpp"
#include "se2fm/metric.hpp"

namespace se2fm {

/// (x, y, theta, h1, h2, h3)
using HamiltonianState = std::array<double, 6>;

HamiltonianState hamiltonian_rhs(const HamiltonianState& s);

struct ShotGeodesic {
  double alpha = 0.0;  ///< initial momentum angle: (h1, h2) = (cos, sin)
  double c = 0.0;      ///< initial h3
  double t = 0.0;
  Pose endpoint;
  HamiltonianState final_state{};
  std::vector<Pose> trail;  ///< one pose per dt step, optional
};

/// RK4 from the origin to t_max (the last step is shortened to land exactly
/// on t_max). Throws kInvalidArgument for non-positive dt or t_max.
ShotGeodesic shoot(double alpha, double c, double t_max, double dt,
                   bool keep_trail = false);

struct SphereOptions {
  int n_alpha = 64;
  int n_c = 201;
  double c_max = 6.0;
  double dt = 1e-3;
  double bin_size = 0.05;
  /// Bins on each side of an endpoint's own bin searched for earlier
  /// arrivals (0 = own bin only).
  int neighborhood = 1;
  /// Number of worker threads for shooting; 0 uses hardware concurrency.
  unsigned threads = 0;
};

struct SphereEndpoint {
  double alpha = 0.0;
  double c = 0.0;
  Pose pose;
  double first_arrival = 0.0;  ///< minimal arrival time into its bin
};

struct SphereSample {
  double t = 0.0;
  std::vector<SphereEndpoint> endpoints;
  std::size_t shot = 0;     ///< geodesics integrated
  std::size_t dropped = 0;  ///< endpoints removed as non-minimal
};

/// Bin key of a pose for minimal-arrival filtering; theta wrapped.
std::array<long long, 3> arrival_bin(const Pose& p, double bin_size);

/// Minimal arrival time of any shot geodesic (over all times <= t_max) into
/// each visited bin.
class ArrivalMap {
 public:
  ArrivalMap(double t_max, const SphereOptions& options);

  /// +inf if no geodesic reaches the bin of p.
  double first_arrival(const Pose& p) const;
  /// Minimum over the (2 radius + 1)^3 block of bins around p.
  double first_arrival_near(const Pose& p, int radius) const;
  std::size_t bins() const;
  double bin_size() const { return bin_size_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double bin_size_;
};

/// Endpoints at radius t that survive minimal-arrival filtering. A geodesic
/// is dropped once any point of its trail at time tau <= t lies in a bin
/// block (options.neighborhood) reached earlier than
/// tau - (2 neighborhood + 1) bin_size sqrt(3). Throws kEmptyResult.
SphereSample sample_sphere(double t, const SphereOptions& options = {});
SphereSample sample_sphere(double t, const SphereOptions& options,
                           const ArrivalMap& arrivals);

struct SphereError {
  double e_inf = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  ///< endpoints whose interpolation touched +inf
};

/// max |W(g) - t| / t over sample endpoints, W tri-linearly interpolated.
/// Throws kOutOfDomain if an endpoint leaves the field, kEmptyResult if every
/// endpoint was excluded.
SphereError max_relative_error(const DistanceField& field,
                               const SphereSample& sample);

/// CSV `alpha,c,x,y,theta,t`.
void write_sphere_csv(const SphereSample& sample,
                      const std::filesystem::path& out);

}  // namespace se2fm
