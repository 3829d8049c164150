#pragma once

// Row kernels for the discrete eikonal residual
//
//   r(u) = | sum_t w_t C^-2 max(0, u - min(W[m - e_t], W[m + e_t]))^2 - 1 |
//
// evaluated along an x-row whose nodes share one stencil. A scalar reference
// and an AVX2 variant are provided; both sum terms in the same order and
// produce bitwise identical results.

#include <cstdint>
#include <span>

namespace se2fm::kernels {

enum class Backend { kScalar, kAvx2 };

const char* to_string(Backend b);

/// True if the binary carries the AVX2 kernel and the CPU supports it.
bool avx2_available();

/// AVX2 when available, unless the environment sets SE2FM_FORCE_SCALAR.
Backend best_backend();

inline constexpr int kMaxTerms = 6;

/// One x-row of residual work. For term t the neighbors of node i are
/// minus[t][i + minus_shift[t]] and plus[t][i + plus_shift[t]]; rows outside
/// the domain point at a row of +inf.
struct ResidualRow {
  const double* u = nullptr;
  const double* cost = nullptr;
  int n_terms = 0;
  const double* minus[kMaxTerms] = {};
  const double* plus[kMaxTerms] = {};
  int minus_shift[kMaxTerms] = {};
  int plus_shift[kMaxTerms] = {};
  double weight[kMaxTerms] = {};
};

/// Max residual over nodes i in [begin, end) that are finite and nonzero
/// (zero marks a seed). Returns 0 for an empty range.
double residual_row_scalar(const ResidualRow& row, int begin, int end);
double residual_row_avx2(const ResidualRow& row, int begin, int end);

double residual_row(Backend backend, const ResidualRow& row, int begin,
                    int end);

}  // namespace se2fm::kernels
