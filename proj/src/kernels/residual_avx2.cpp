#include "se2fm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define SE2FM_HAVE_AVX2_KERNEL 1
#include <immintrin.h>
#else
#define SE2FM_HAVE_AVX2_KERNEL 0
#endif

namespace se2fm::kernels {

#if SE2FM_HAVE_AVX2_KERNEL

__attribute__((target("avx2"))) double residual_row_avx2(
    const ResidualRow& row, int begin, int end) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inf = _mm256_set1_pd(__builtin_inf());
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d worst = zero;

  int i = begin;
  for (; i + 4 <= end; i += 4) {
    const __m256d u = _mm256_loadu_pd(row.u + i);
    const __m256d c = _mm256_loadu_pd(row.cost + i);
    const __m256d ic2 = _mm256_div_pd(one, _mm256_mul_pd(c, c));
    __m256d acc = zero;
    for (int t = 0; t < row.n_terms; ++t) {
      const __m256d am = _mm256_loadu_pd(row.minus[t] + i + row.minus_shift[t]);
      const __m256d ap = _mm256_loadu_pd(row.plus[t] + i + row.plus_shift[t]);
      // min(ap, am) with the scalar tie order: ap < am ? ap : am
      const __m256d a = _mm256_blendv_pd(am, ap, _mm256_cmp_pd(ap, am, _CMP_LT_OQ));
      __m256d d = _mm256_sub_pd(u, a);
      d = _mm256_blendv_pd(zero, d, _mm256_cmp_pd(d, zero, _CMP_GT_OQ));
      const __m256d w = _mm256_set1_pd(row.weight[t]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(w, ic2), d), d));
    }
    __m256d r = _mm256_and_pd(_mm256_sub_pd(acc, one), abs_mask);
    // Skip unreached (inf) and seed (0) nodes.
    const __m256d live = _mm256_and_pd(_mm256_cmp_pd(u, inf, _CMP_LT_OQ),
                                       _mm256_cmp_pd(u, zero, _CMP_NEQ_OQ));
    r = _mm256_and_pd(r, live);
    worst = _mm256_max_pd(worst, r);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst);
  double result = lanes[0];
  for (int l = 1; l < 4; ++l) result = lanes[l] > result ? lanes[l] : result;
  if (i < end) {
    const double tail = residual_row_scalar(row, i, end);
    result = tail > result ? tail : result;
  }
  return result;
}

bool avx2_available() { return __builtin_cpu_supports("avx2"); }

#else

double residual_row_avx2(const ResidualRow& row, int begin, int end) {
  return residual_row_scalar(row, begin, end);
}

bool avx2_available() { return false; }

#endif

}  // namespace se2fm::kernels
