#include <cstdlib>

#include "se2fm/kernels.hpp"

namespace se2fm::kernels {

const char* to_string(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

Backend best_backend() {
  if (std::getenv("SE2FM_FORCE_SCALAR") != nullptr) return Backend::kScalar;
  return avx2_available() ? Backend::kAvx2 : Backend::kScalar;
}

double residual_row(Backend backend, const ResidualRow& row, int begin,
                    int end) {
  if (backend == Backend::kAvx2 && avx2_available()) {
    return residual_row_avx2(row, begin, end);
  }
  return residual_row_scalar(row, begin, end);
}

}  // namespace se2fm::kernels
