#include "se2fm/sr_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <thread>
#include <unordered_map>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

using BinKey = std::array<long long, 3>;

struct BinHash {
  std::size_t operator()(const BinKey& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (long long v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using BinTable = std::unordered_map<BinKey, double, BinHash>;

HamiltonianState axpy(const HamiltonianState& s, const HamiltonianState& k,
                      double h) {
  HamiltonianState r;
  for (int n = 0; n < 6; ++n) r[n] = s[n] + h * k[n];
  return r;
}

HamiltonianState rk4_step(const HamiltonianState& s, double h) {
  const HamiltonianState k1 = hamiltonian_rhs(s);
  const HamiltonianState k2 = hamiltonian_rhs(axpy(s, k1, 0.5 * h));
  const HamiltonianState k3 = hamiltonian_rhs(axpy(s, k2, 0.5 * h));
  const HamiltonianState k4 = hamiltonian_rhs(axpy(s, k3, h));
  HamiltonianState r;
  for (int n = 0; n < 6; ++n) {
    r[n] = s[n] + h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
  }
  return r;
}

Pose pose_of_state(const HamiltonianState& s) {
  return {s[0], s[1], canonical_angle(s[2])};
}

struct Momentum {
  double alpha;
  double c;
};

std::vector<Momentum> momentum_grid(const SphereOptions& o) {
  if (o.n_alpha < 1 || o.n_c < 1 || !(o.c_max >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid momentum grid");
  }
  std::vector<Momentum> out;
  out.reserve(static_cast<std::size_t>(o.n_alpha) * o.n_c);
  for (int a = 0; a < o.n_alpha; ++a) {
    const double alpha = 2.0 * std::numbers::pi * a / o.n_alpha;
    for (int n = 0; n < o.n_c; ++n) {
      const double c = o.n_c == 1 ? 0.0 : -o.c_max + 2.0 * o.c_max * n / (o.n_c - 1);
      out.push_back({alpha, c});
    }
  }
  return out;
}

unsigned worker_count(const SphereOptions& o, std::size_t jobs) {
  unsigned n = o.threads != 0 ? o.threads : std::thread::hardware_concurrency();
  n = std::max(1u, n);
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(index) for index in [0, jobs) across workers; fn receives the
// worker id for thread-local accumulation.
template <typename Fn>
void parallel_for(std::size_t jobs, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t n = 0; n < jobs; ++n) fn(0u, n);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t n = w; n < jobs; n += workers) fn(w, n);
    });
  }
  for (auto& t : pool) t.join();
}

void validate_times(double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0) || !std::isfinite(t_max) ||
      !std::isfinite(dt)) {
    throw Error(ErrorCode::kInvalidArgument, "shooting needs t_max > 0, dt > 0");
  }
}

}  // namespace

HamiltonianState hamiltonian_rhs(const HamiltonianState& s) {
  const double th = s[2], h1 = s[3], h2 = s[4], h3 = s[5];
  return {h1 * std::cos(th), h1 * std::sin(th), h2,
          h2 * h3,           -h1 * h3,          -h1 * h2};
}

ShotGeodesic shoot(double alpha, double c, double t_max, double dt,
                   bool keep_trail) {
  validate_times(t_max, dt);
  ShotGeodesic g;
  g.alpha = alpha;
  g.c = c;
  g.t = t_max;
  HamiltonianState s = {0.0, 0.0, 0.0, std::cos(alpha), std::sin(alpha), c};
  if (keep_trail) g.trail.push_back(pose_of_state(s));
  const auto steps = static_cast<long long>(std::floor(t_max / dt));
  for (long long n = 0; n < steps; ++n) {
    s = rk4_step(s, dt);
    if (keep_trail) g.trail.push_back(pose_of_state(s));
  }
  const double rest = t_max - static_cast<double>(steps) * dt;
  if (rest > 1e-15 * t_max) {
    s = rk4_step(s, rest);
    if (keep_trail) g.trail.push_back(pose_of_state(s));
  }
  g.final_state = s;
  g.endpoint = pose_of_state(s);
  return g;
}

// Bins are centered on multiples of bin_size, so axis poses such as (x, 0, 0)
// or (0, 0, theta) never straddle a bin face through roundoff.
BinKey arrival_bin(const Pose& p, double bin_size) {
  return {static_cast<long long>(std::floor(p.x / bin_size + 0.5)),
          static_cast<long long>(std::floor(p.y / bin_size + 0.5)),
          static_cast<long long>(
              std::floor(canonical_angle(p.theta) / bin_size + 0.5))};
}

struct ArrivalMap::Impl {
  BinTable table;
};

ArrivalMap::ArrivalMap(double t_max, const SphereOptions& options)
    : bin_size_(options.bin_size) {
  validate_times(t_max, options.dt);
  if (!(options.bin_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bin_size must be positive");
  }
  const auto momenta = momentum_grid(options);
  const unsigned workers = worker_count(options, momenta.size());
  std::vector<BinTable> partial(workers);
  const auto steps = static_cast<long long>(std::ceil(t_max / options.dt - 1e-9));

  parallel_for(momenta.size(), workers, [&](unsigned w, std::size_t n) {
    BinTable& table = partial[w];
    HamiltonianState s = {0.0, 0.0, 0.0, std::cos(momenta[n].alpha),
                          std::sin(momenta[n].alpha), momenta[n].c};
    BinKey last{};
    bool have_last = false;
    for (long long step = 0; step <= steps; ++step) {
      const double t = static_cast<double>(step) * options.dt;
      const BinKey key = arrival_bin(pose_of_state(s), options.bin_size);
      if (!have_last || key != last) {
        auto [it, inserted] = table.try_emplace(key, t);
        if (!inserted && t < it->second) it->second = t;
        last = key;
        have_last = true;
      }
      s = rk4_step(s, options.dt);
    }
  });

  auto impl = std::make_shared<Impl>();
  impl->table = std::move(partial[0]);
  for (unsigned w = 1; w < workers; ++w) {
    for (const auto& [key, t] : partial[w]) {
      auto [it, inserted] = impl->table.try_emplace(key, t);
      if (!inserted && t < it->second) it->second = t;
    }
  }
  impl_ = std::move(impl);
}

double ArrivalMap::first_arrival(const Pose& p) const {
  const auto it = impl_->table.find(arrival_bin(p, bin_size_));
  return it == impl_->table.end() ? kInf : it->second;
}

double ArrivalMap::first_arrival_near(const Pose& p, int radius) const {
  const BinKey center = arrival_bin(p, bin_size_);
  // The theta bins wrap at +-pi.
  const auto theta_bins = static_cast<long long>(
      std::floor(std::numbers::pi / bin_size_ + 0.5));
  double best = kInf;
  for (int a = -radius; a <= radius; ++a) {
    for (int b = -radius; b <= radius; ++b) {
      for (int c = -radius; c <= radius; ++c) {
        BinKey key = {center[0] + a, center[1] + b, center[2] + c};
        if (key[2] > theta_bins) key[2] -= 2 * theta_bins;
        if (key[2] < -theta_bins) key[2] += 2 * theta_bins;
        const auto it = impl_->table.find(key);
        if (it != impl_->table.end() && it->second < best) best = it->second;
      }
    }
  }
  return best;
}

std::size_t ArrivalMap::bins() const { return impl_->table.size(); }

SphereSample sample_sphere(double t, const SphereOptions& options) {
  const ArrivalMap arrivals(t, options);
  return sample_sphere(t, options, arrivals);
}

SphereSample sample_sphere(double t, const SphereOptions& options,
                           const ArrivalMap& arrivals) {
  validate_times(t, options.dt);
  if (options.neighborhood < 0) {
    throw Error(ErrorCode::kInvalidArgument, "neighborhood must be >= 0");
  }
  const auto momenta = momentum_grid(options);
  const double slack =
      (2 * options.neighborhood + 1) * options.bin_size * std::sqrt(3.0);
  const auto steps = static_cast<long long>(std::floor(t / options.dt));

  struct Outcome {
    bool kept = false;
    SphereEndpoint endpoint;
  };
  std::vector<Outcome> outcomes(momenta.size());

  // A geodesic stops being minimizing for good once some point of its trail
  // is reached clearly earlier by another geodesic, so the whole trail up to
  // t is screened, not only the endpoint.
  parallel_for(momenta.size(), worker_count(options, momenta.size()),
               [&](unsigned, std::size_t n) {
    const Momentum& m = momenta[n];
    HamiltonianState s = {0.0, 0.0, 0.0, std::cos(m.alpha), std::sin(m.alpha), m.c};
    BinKey last{};
    bool have_last = false;
    auto dominated = [&](double tau) {
      const Pose p = pose_of_state(s);
      const BinKey key = arrival_bin(p, options.bin_size);
      if (have_last && key == last) return false;
      last = key;
      have_last = true;
      return arrivals.first_arrival_near(p, options.neighborhood) < tau - slack;
    };
    for (long long step = 0; step < steps; ++step) {
      if (dominated(static_cast<double>(step) * options.dt)) return;
      s = rk4_step(s, options.dt);
    }
    const double rest = t - static_cast<double>(steps) * options.dt;
    if (rest > 1e-15 * t) s = rk4_step(s, rest);
    have_last = false;
    if (dominated(t)) return;
    const Pose end = pose_of_state(s);
    outcomes[n].kept = true;
    outcomes[n].endpoint = {m.alpha, m.c, end,
                            std::min(arrivals.first_arrival(end), t)};
  });

  SphereSample out;
  out.t = t;
  out.shot = momenta.size();
  for (const auto& o : outcomes) {
    if (o.kept) {
      out.endpoints.push_back(o.endpoint);
    } else {
      ++out.dropped;
    }
  }
  if (out.endpoints.empty()) {
    throw Error(ErrorCode::kEmptyResult,
                "no minimal endpoints survived filtering at t = " + std::to_string(t));
  }
  return out;
}

SphereError max_relative_error(const DistanceField& field,
                               const SphereSample& sample) {
  if (!(sample.t > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sphere radius must be positive");
  }
  SphereError err;
  for (const auto& e : sample.endpoints) {
    const double w = interpolate(field, e.pose);
    if (!std::isfinite(w)) {
      ++err.excluded;
      continue;
    }
    err.e_inf = std::max(err.e_inf, std::abs(w - sample.t) / sample.t);
    ++err.used;
  }
  if (err.used == 0) {
    throw Error(ErrorCode::kEmptyResult,
                "every sphere endpoint touched an unreached node");
  }
  return err;
}

void write_sphere_csv(const SphereSample& sample,
                      const std::filesystem::path& out) {
  std::ofstream f(out, std::ios::trunc);
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot write " + out.string());
  f << "alpha,c,x,y,theta,t\n" << std::setprecision(17);
  for (const auto& e : sample.endpoints) {
    f << e.alpha << ',' << e.c << ',' << e.pose.x << ',' << e.pose.y << ','
      << e.pose.theta << ',' << sample.t << '\n';
  }
}

}  // namespace se2fm
