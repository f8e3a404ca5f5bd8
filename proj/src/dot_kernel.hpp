#pragma once

#include <cstddef>

namespace vpralign::detail {

// Chunk length for blocked dot products. Sums are accumulated chunk by chunk
// in index order; changing this changes every distance bit pattern.
inline constexpr std::size_t kDotChunk = 256;

inline double dot_chunk(const double* x, const double* y, std::size_t len) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    a0 += x[k] * y[k];
    a1 += x[k + 1] * y[k + 1];
    a2 += x[k + 2] * y[k + 2];
    a3 += x[k + 3] * y[k + 3];
  }
  for (; k < len; ++k) a0 += x[k] * y[k];
  return (a0 + a1) + (a2 + a3);
}

}  // namespace vpralign::detail
