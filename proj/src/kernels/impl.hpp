#pragma once

#include "scrambler/kernels.hpp"

namespace scrambler::kernels {

namespace scalar {
void cgemm(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
           const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
void convolve_truncated(const double* a, const double* b, double* out, std::size_t n);
void periodic_norm_accumulate(const cplx* x, std::size_t len, std::size_t period, double* acc);
double norm_sq(const cplx* x, std::size_t n);
}  // namespace scalar

namespace avx2 {
void cgemm(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
           const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
void convolve_truncated(const double* a, const double* b, double* out, std::size_t n);
void periodic_norm_accumulate(const cplx* x, std::size_t len, std::size_t period, double* acc);
double norm_sq(const cplx* x, std::size_t n);
}  // namespace avx2

}  // namespace scrambler::kernels
