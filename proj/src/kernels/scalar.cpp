#include "impl.hpp"

#include <algorithm>

namespace scrambler::kernels::scalar {

// std::complex multiplication carries NaN-recovery branches; the kernels
// work on the raw (re, im) pairs instead.

void cgemm(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
           const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = reinterpret_cast<double*>(c + i * ldc);
        std::fill(crow, crow + 2 * n, 0.0);
        for (std::size_t p = 0; p < k; ++p) {
            double ar = a[i * lda + p].real();
            double ai = a[i * lda + p].imag();
            const double* brow = reinterpret_cast<const double*>(b + p * ldb);
            for (std::size_t j = 0; j < n; ++j) {
                double br = brow[2 * j];
                double bi = brow[2 * j + 1];
                crow[2 * j] += ar * br - ai * bi;
                crow[2 * j + 1] += ar * bi + ai * br;
            }
        }
    }
}

void convolve_truncated(const double* a, const double* b, double* out, std::size_t n) {
    std::fill(out, out + n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double ak = a[k];
        if (ak == 0.0) continue;
        double* o = out + k;
        std::size_t len = n - k;
        for (std::size_t j = 0; j < len; ++j) o[j] += ak * b[j];
    }
}

void periodic_norm_accumulate(const cplx* x, std::size_t len, std::size_t period, double* acc) {
    for (std::size_t base = 0; base < len; base += period) {
        for (std::size_t m = 0; m < period; ++m) {
            double re = x[base + m].real();
            double im = x[base + m].imag();
            acc[m] += re * re + im * im;
        }
    }
}

double norm_sq(const cplx* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

}  // namespace scrambler::kernels::scalar
