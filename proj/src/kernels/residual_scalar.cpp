#include <cmath>

#include "se2fm/kernels.hpp"

namespace se2fm::kernels {

double residual_row_scalar(const ResidualRow& row, int begin, int end) {
  double worst = 0.0;
  for (int i = begin; i < end; ++i) {
    const double u = row.u[i];
    if (!std::isfinite(u) || u == 0.0) continue;
    const double c = row.cost[i];
    const double ic2 = 1.0 / (c * c);
    double acc = 0.0;
    for (int t = 0; t < row.n_terms; ++t) {
      const double am = row.minus[t][i + row.minus_shift[t]];
      const double ap = row.plus[t][i + row.plus_shift[t]];
      const double a = ap < am ? ap : am;
      double d = u - a;
      d = d > 0.0 ? d : 0.0;
      acc += row.weight[t] * ic2 * d * d;
    }
    const double r = std::abs(acc - 1.0);
    if (r > worst) worst = r;
  }
  return worst;
}

}  // namespace se2fm::kernels
