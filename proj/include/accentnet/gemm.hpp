#ifndef ACCENTNET_GEMM_HPP
#define ACCENTNET_GEMM_HPP

#include <cstddef>

namespace accentnet {

// Row-major matrix kernels shared by matmul, conv2d (im2col) and the mel
// filterbank product. The ikj ordering keeps the inner loop contiguous so the
// compiler can vectorize it.

// c[m x n] = (accumulate ? c : 0) + a[m x k] * b[k x n]
template <typename T>
void gemm(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
          bool accumulate = false) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] = T(0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const T av = arow[l];
      if (av == T(0)) continue;
      const T* brow = b + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m x n] (+)= a[m x k] * b[n x k]^T
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate = false) {
  for (std::size_t i = 0; i < m; ++i) {
    const T* arow = a + i * k;
    T* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const T* brow = b + j * k;
      T acc = T(0);
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

// c[m x n] (+)= a[k x m]^T * b[k x n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate = false) {
  if (!accumulate) {
    for (std::size_t i = 0; i < m * n; ++i) c[i] = T(0);
  }
  for (std::size_t l = 0; l < k; ++l) {
    const T* arow = a + l * m;
    const T* brow = b + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const T av = arow[i];
      if (av == T(0)) continue;
      T* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace accentnet

#endif
