#include "impl.hpp"

#include <algorithm>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace scrambler::kernels::avx2 {

namespace {

// Two complex numbers per register: (re0, im0, re1, im1).
inline __m256d swap_re_im(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

}  // namespace

void cgemm(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
           const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
    const std::size_t n8 = n - n % 8;
    const std::size_t n2 = n - n % 2;
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = reinterpret_cast<const double*>(a + i * lda);
        double* crow = reinterpret_cast<double*>(c + i * ldc);

        std::size_t j = 0;
        for (; j < n8; j += 8) {
            // acc_r holds ar*b, acc_i holds ai*swap(b); addsub combines them.
            __m256d r0 = _mm256_setzero_pd(), r1 = r0, r2 = r0, r3 = r0;
            __m256d i0 = r0, i1 = r0, i2 = r0, i3 = r0;
            for (std::size_t p = 0; p < k; ++p) {
                __m256d ar = _mm256_broadcast_sd(arow + 2 * p);
                __m256d ai = _mm256_broadcast_sd(arow + 2 * p + 1);
                const double* bp = reinterpret_cast<const double*>(b + p * ldb + j);
                __m256d b0 = _mm256_loadu_pd(bp);
                __m256d b1 = _mm256_loadu_pd(bp + 4);
                __m256d b2 = _mm256_loadu_pd(bp + 8);
                __m256d b3 = _mm256_loadu_pd(bp + 12);
                r0 = _mm256_fmadd_pd(ar, b0, r0);
                r1 = _mm256_fmadd_pd(ar, b1, r1);
                r2 = _mm256_fmadd_pd(ar, b2, r2);
                r3 = _mm256_fmadd_pd(ar, b3, r3);
                i0 = _mm256_fmadd_pd(ai, swap_re_im(b0), i0);
                i1 = _mm256_fmadd_pd(ai, swap_re_im(b1), i1);
                i2 = _mm256_fmadd_pd(ai, swap_re_im(b2), i2);
                i3 = _mm256_fmadd_pd(ai, swap_re_im(b3), i3);
            }
            _mm256_storeu_pd(crow + 2 * j, _mm256_addsub_pd(r0, i0));
            _mm256_storeu_pd(crow + 2 * j + 4, _mm256_addsub_pd(r1, i1));
            _mm256_storeu_pd(crow + 2 * j + 8, _mm256_addsub_pd(r2, i2));
            _mm256_storeu_pd(crow + 2 * j + 12, _mm256_addsub_pd(r3, i3));
        }
        for (; j < n2; j += 2) {
            __m256d r0 = _mm256_setzero_pd(), i0 = r0;
            for (std::size_t p = 0; p < k; ++p) {
                __m256d ar = _mm256_broadcast_sd(arow + 2 * p);
                __m256d ai = _mm256_broadcast_sd(arow + 2 * p + 1);
                __m256d b0 = _mm256_loadu_pd(reinterpret_cast<const double*>(b + p * ldb + j));
                r0 = _mm256_fmadd_pd(ar, b0, r0);
                i0 = _mm256_fmadd_pd(ai, swap_re_im(b0), i0);
            }
            _mm256_storeu_pd(crow + 2 * j, _mm256_addsub_pd(r0, i0));
        }
        for (; j < n; ++j) {
            double re = 0.0, im = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                double ar = arow[2 * p], ai = arow[2 * p + 1];
                const cplx& bv = b[p * ldb + j];
                re += ar * bv.real() - ai * bv.imag();
                im += ar * bv.imag() + ai * bv.real();
            }
            crow[2 * j] = re;
            crow[2 * j + 1] = im;
        }
    }
}

void convolve_truncated(const double* a, const double* b, double* out, std::size_t n) {
    std::fill(out, out + n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double ak = a[k];
        if (ak == 0.0) continue;
        __m256d av = _mm256_set1_pd(ak);
        double* o = out + k;
        std::size_t len = n - k;
        std::size_t len4 = len - len % 4;
        std::size_t j = 0;
        for (; j < len4; j += 4) {
            __m256d ov = _mm256_loadu_pd(o + j);
            _mm256_storeu_pd(o + j, _mm256_fmadd_pd(av, _mm256_loadu_pd(b + j), ov));
        }
        for (; j < len; ++j) o[j] += ak * b[j];
    }
}

void periodic_norm_accumulate(const cplx* x, std::size_t len, std::size_t period, double* acc) {
    if (period < 4 || period % 4 != 0) {
        for (std::size_t base = 0; base < len; base += period)
            for (std::size_t m = 0; m < period; ++m) acc[m] += std::norm(x[base + m]);
        return;
    }
    for (std::size_t base = 0; base < len; base += period) {
        const double* xr = reinterpret_cast<const double*>(x + base);
        for (std::size_t m = 0; m < period; m += 4) {
            __m256d v0 = _mm256_loadu_pd(xr + 2 * m);
            __m256d v1 = _mm256_loadu_pd(xr + 2 * m + 4);
            // (|z0|^2, |z2|^2, |z1|^2, |z3|^2) -> natural order
            __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
            h = _mm256_permute4x64_pd(h, 0b11011000);
            _mm256_storeu_pd(acc + m, _mm256_add_pd(_mm256_loadu_pd(acc + m), h));
        }
    }
}

double norm_sq(const cplx* x, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(x);
    std::size_t len = 2 * n;
    std::size_t len8 = len - len % 8;
    __m256d s0 = _mm256_setzero_pd(), s1 = s0;
    std::size_t i = 0;
    for (; i < len8; i += 8) {
        __m256d v0 = _mm256_loadu_pd(p + i);
        __m256d v1 = _mm256_loadu_pd(p + i + 4);
        s0 = _mm256_fmadd_pd(v0, v0, s0);
        s1 = _mm256_fmadd_pd(v1, v1, s1);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(s0, s1));
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < len; ++i) s += p[i] * p[i];
    return s;
}

}  // namespace scrambler::kernels::avx2

#endif
