#include "se2fm/eikonal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>

#include "se2fm/error.hpp"

namespace se2fm {

namespace {

constexpr int kMaxTerms = kernels::kMaxTerms;

// Core of local_update on already-filtered terms; `order` is scratch.
double solve_quadratic(int n, const double* w, const double* a) {
  int order[kMaxTerms];
  for (int t = 0; t < n; ++t) order[t] = t;
  // Insertion sort by (a, term index): deterministic under ties.
  for (int p = 1; p < n; ++p) {
    const int cur = order[p];
    int q = p;
    while (q > 0 && a[order[q - 1]] > a[cur]) {
      order[q] = order[q - 1];
      --q;
    }
    order[q] = cur;
  }
  const double a0 = a[order[0]];
  double sw = 0.0, swb = 0.0, swbb = 0.0;
  double u = kInf;
  for (int p = 0; p < n; ++p) {
    const int t = order[p];
    if (u <= a[t]) break;
    const double b = a[t] - a0;
    sw += w[t];
    swb += w[t] * b;
    swbb += w[t] * b * b;
    // sw v^2 - 2 swb v + swbb - 1 = 0, larger root; v = u - a0.
    const double disc = swb * swb - sw * (swbb - 1.0);
    u = a0 + (swb + std::sqrt(disc > 0.0 ? disc : 0.0)) / sw;
  }
  return u;
}

// Per-slice stencil flattened for the hot loops.
struct SliceStencil {
  int n = 0;
  int dx[kMaxTerms] = {};
  int dy[kMaxTerms] = {};
  int dk[kMaxTerms] = {};
  double w[kMaxTerms] = {};
};

class Discretization {
 public:
  Discretization(const CostVolume& cost, const StencilCache& cache)
      : grid_(cost.grid), cost_(cost.values), slices_(grid_.ntheta) {
    for (int k = 0; k < grid_.ntheta; ++k) {
      const auto& terms = cache.slice(k).terms;
      if (terms.size() > static_cast<std::size_t>(kMaxTerms)) {
        throw Error(ErrorCode::kConditioning, "stencil has more than 6 terms");
      }
      for (const auto& t : terms) {
        if (std::abs(t.offset[2]) >= grid_.ntheta) {
          throw Error(ErrorCode::kConditioning,
                      "stencil offset wraps the theta axis more than once");
        }
      }
      SliceStencil& s = slices_[k];
      s.n = static_cast<int>(terms.size());
      for (int t = 0; t < s.n; ++t) {
        s.dx[t] = terms[t].offset[0];
        s.dy[t] = terms[t].offset[1];
        s.dk[t] = terms[t].offset[2];
        s.w[t] = terms[t].weight;
      }
    }
  }

  // Discrete update of node (i, j, k) reading neighbor values from `values`.
  double update(const std::vector<double>& values, int i, int j, int k) const {
    const SliceStencil& s = slices_[k];
    const double ic2 = inverse_cost_sq(i, j, k);
    double w[kMaxTerms];
    double a[kMaxTerms];
    int n = 0;
    for (int t = 0; t < s.n; ++t) {
      const double am = neighbor(values, i - s.dx[t], j - s.dy[t], k - s.dk[t]);
      const double ap = neighbor(values, i + s.dx[t], j + s.dy[t], k + s.dk[t]);
      const double at = ap < am ? ap : am;
      if (at == kInf) continue;
      w[n] = s.w[t] * ic2;
      a[n] = at;
      ++n;
    }
    if (n == 0) return kInf;
    return solve_quadratic(n, w, a);
  }

  double residual_at(const std::vector<double>& values, int i, int j,
                     int k) const {
    const double u = values[grid_.flat(i, j, k)];
    if (!std::isfinite(u) || u == 0.0) return 0.0;
    const SliceStencil& s = slices_[k];
    const double ic2 = inverse_cost_sq(i, j, k);
    double acc = 0.0;
    for (int t = 0; t < s.n; ++t) {
      const double am = neighbor(values, i - s.dx[t], j - s.dy[t], k - s.dk[t]);
      const double ap = neighbor(values, i + s.dx[t], j + s.dy[t], k + s.dk[t]);
      const double at = ap < am ? ap : am;
      double d = u - at;
      d = d > 0.0 ? d : 0.0;
      acc += s.w[t] * ic2 * d * d;
    }
    return std::abs(acc - 1.0);
  }

  const SliceStencil& slice(int k) const { return slices_[k]; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<double>& cost() const { return cost_; }

 private:
  double inverse_cost_sq(int i, int j, int k) const {
    const double c = cost_[grid_.flat(i, j, k)];
    return 1.0 / (c * c);
  }

  // Stencil offsets are far smaller than ntheta, so one correction wraps k.
  int wrap_near(int k) const {
    if (k < 0) return k + grid_.ntheta;
    if (k >= grid_.ntheta) return k - grid_.ntheta;
    return k;
  }

  double neighbor(const std::vector<double>& values, int i, int j, int k) const {
    if (!grid_.in_plane(i, j)) return kInf;
    return values[grid_.flat(i, j, wrap_near(k))];
  }

  const GridSpec& grid_;
  const std::vector<double>& cost_;
  std::vector<SliceStencil> slices_;
};

void validate_config(const CostVolume& cost, const SolveConfig& config) {
  config.params.validate();
  cost.validate();
  if (config.seeds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "solve needs at least one seed");
  }
  for (const auto& s : config.seeds) {
    if (!cost.grid.in_plane(s.i, s.j) || s.k < 0 || s.k >= cost.grid.ntheta) {
      throw Error(ErrorCode::kOutOfDomain,
                  "seed (" + std::to_string(s.i) + ", " + std::to_string(s.j) +
                      ", " + std::to_string(s.k) + ") outside the grid");
    }
  }
  if (config.mode == SolveMode::kFixedPoint &&
      !(config.fixed_point_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "fixed-point tolerance must be positive");
  }
}

DistanceField fast_marching(const Discretization& disc,
                            const StencilCache& cache,
                            const SolveConfig& config, SolveStats& stats) {
  const GridSpec& g = disc.grid();
  DistanceField out = DistanceField::unreached(g);
  std::vector<double>& accepted = out.values;  // +inf until accepted
  std::vector<double> tentative(g.size(), kInf);

  using Entry = std::pair<double, std::uint64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (const auto& s : config.seeds) {
    const std::size_t idx = g.flat(s.i, s.j, s.k);
    if (tentative[idx] == 0.0) continue;
    tentative[idx] = 0.0;
    heap.emplace(0.0, idx);
    ++stats.heap_pushes;
  }

  double last = 0.0;
  while (!heap.empty()) {
    const auto [key, idx] = heap.top();
    heap.pop();
    if (accepted[idx] != kInf || key != tentative[idx]) {
      ++stats.stale_pops;
      continue;
    }
    accepted[idx] = key;
    ++stats.accepted;
    if (key < last) stats.monotone_acceptance = false;
    last = key;

    const GridIndex p = g.unflatten(idx);
    for (const Offset& d : cache.dependents(p.k)) {
      const int i = p.i + d[0];
      const int j = p.j + d[1];
      if (!g.in_plane(i, j)) continue;
      int k = p.k + d[2];
      if (k < 0) {
        k += g.ntheta;
      } else if (k >= g.ntheta) {
        k -= g.ntheta;
      }
      const std::size_t m = g.flat(i, j, k);
      if (accepted[m] != kInf) continue;
      const double u = disc.update(accepted, i, j, k);
      if (u < tentative[m]) {
        tentative[m] = u;
        heap.emplace(u, m);
        ++stats.heap_pushes;
      }
    }
  }
  return out;
}

DistanceField fixed_point(const Discretization& disc, const SolveConfig& config,
                          SolveStats& stats) {
  const GridSpec& g = disc.grid();
  DistanceField out = DistanceField::unreached(g);
  std::vector<double>& w = out.values;
  std::vector<std::uint8_t> is_seed(g.size(), 0);
  for (const auto& s : config.seeds) {
    const std::size_t idx = g.flat(s.i, s.j, s.k);
    w[idx] = 0.0;
    is_seed[idx] = 1;
  }
  const int cap = config.max_sweeps > 0 ? config.max_sweeps
                                        : 10 * (g.nx + g.ny + g.ntheta);
  for (int sweep = 0; sweep < cap; ++sweep) {
    // Cycle through the 8 axis-direction combinations.
    const bool fwd_i = (sweep & 1) == 0;
    const bool fwd_j = (sweep & 2) == 0;
    const bool fwd_k = (sweep & 4) == 0;
    double max_change = 0.0;
    for (int kk = 0; kk < g.ntheta; ++kk) {
      const int k = fwd_k ? kk : g.ntheta - 1 - kk;
      for (int jj = 0; jj < g.ny; ++jj) {
        const int j = fwd_j ? jj : g.ny - 1 - jj;
        for (int ii = 0; ii < g.nx; ++ii) {
          const int i = fwd_i ? ii : g.nx - 1 - ii;
          const std::size_t idx = g.flat(i, j, k);
          if (is_seed[idx]) continue;
          const double u = disc.update(w, i, j, k);
          if (u < w[idx]) {
            const double change = w[idx] - u;  // +inf on first reach
            if (change > max_change) max_change = change;
            w[idx] = u;
          }
        }
      }
    }
    stats.sweeps = sweep + 1;
    if (max_change <= config.fixed_point_tolerance) return out;
  }
  throw Error(ErrorCode::kIterationCap,
              "fixed-point iteration did not converge in " +
                  std::to_string(cap) + " sweeps");
}

}  // namespace

double local_update(std::span<const double> weights,
                    std::span<const double> neighbor_values) {
  if (weights.size() != neighbor_values.size() ||
      weights.size() > static_cast<std::size_t>(kMaxTerms)) {
    throw Error(ErrorCode::kInvalidArgument,
                "local_update needs matching weight/value lists of <= 6 terms");
  }
  double w[kMaxTerms];
  double a[kMaxTerms];
  int n = 0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (weights[t] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "negative stencil weight");
    }
    if (weights[t] == 0.0 || !std::isfinite(neighbor_values[t])) continue;
    w[n] = weights[t];
    a[n] = neighbor_values[t];
    ++n;
  }
  if (n == 0) return kInf;
  return solve_quadratic(n, w, a);
}

DistanceField solve(const CostVolume& cost, const SolveConfig& config,
                    SolveStats* stats) {
  config.params.validate();
  cost.grid.validate();
  const StencilCache cache(cost.grid, config.params);
  return solve(cost, config, cache, stats);
}

DistanceField solve(const CostVolume& cost, const SolveConfig& config,
                    const StencilCache& stencils, SolveStats* stats) {
  validate_config(cost, config);
  if (stencils.ntheta() != cost.grid.ntheta) {
    throw Error(ErrorCode::kInvalidArgument,
                "stencil cache does not match the grid");
  }
  const auto t0 = std::chrono::steady_clock::now();
  SolveStats local;
  const Discretization disc(cost, stencils);
  DistanceField field = config.mode == SolveMode::kFastMarching
                            ? fast_marching(disc, stencils, config, local)
                            : fixed_point(disc, config, local);
  local.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  if (stats != nullptr) *stats = local;
  return field;
}

double residual(const DistanceField& field, const CostVolume& cost,
                const MetricParams& params) {
  const StencilCache cache(cost.grid, params);
  return residual(field, cost, cache);
}

double residual(const DistanceField& field, const CostVolume& cost,
                const StencilCache& stencils, kernels::Backend backend) {
  const GridSpec& g = field.grid;
  if (!(g == cost.grid) || field.values.size() != g.size() ||
      cost.values.size() != g.size()) {
    throw Error(ErrorCode::kSizeMismatch, "field and cost grids differ");
  }
  const Discretization disc(cost, stencils);
  const std::vector<double>& w = field.values;
  const std::vector<double> inf_row(static_cast<std::size_t>(g.nx), kInf);

  double worst = 0.0;
  for (int k = 0; k < g.ntheta; ++k) {
    const SliceStencil& s = disc.slice(k);
    int margin = 0;
    for (int t = 0; t < s.n; ++t) margin = std::max(margin, std::abs(s.dx[t]));
    const int lo = std::min(margin, g.nx);
    const int hi = std::max(g.nx - margin, lo);
    for (int j = 0; j < g.ny; ++j) {
      kernels::ResidualRow row;
      const std::size_t base = g.flat(0, j, k);
      row.u = w.data() + base;
      row.cost = cost.values.data() + base;
      row.n_terms = s.n;
      for (int t = 0; t < s.n; ++t) {
        const int jm = j - s.dy[t];
        const int jp = j + s.dy[t];
        if (jm >= 0 && jm < g.ny) {
          row.minus[t] = w.data() + g.flat(0, jm, g.wrap_k(k - s.dk[t]));
          row.minus_shift[t] = -s.dx[t];
        } else {
          row.minus[t] = inf_row.data();
        }
        if (jp >= 0 && jp < g.ny) {
          row.plus[t] = w.data() + g.flat(0, jp, g.wrap_k(k + s.dk[t]));
          row.plus_shift[t] = s.dx[t];
        } else {
          row.plus[t] = inf_row.data();
        }
        row.weight[t] = s.w[t];
      }
      if (hi > lo) {
        worst = std::max(worst, kernels::residual_row(backend, row, lo, hi));
      }
      for (int i = 0; i < lo; ++i) {
        worst = std::max(worst, disc.residual_at(w, i, j, k));
      }
      for (int i = hi; i < g.nx; ++i) {
        worst = std::max(worst, disc.residual_at(w, i, j, k));
      }
    }
  }
  return worst;
}

double node_residual(const DistanceField& field, const CostVolume& cost,
                     const StencilCache& stencils, const GridIndex& node) {
  const Discretization disc(cost, stencils);
  return disc.residual_at(field.values, node.i, node.j,
                          field.grid.wrap_k(node.k));
}

}  // namespace se2fm
