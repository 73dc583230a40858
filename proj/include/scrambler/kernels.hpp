#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; an AVX2+FMA variant is selected at runtime when the CPU
// supports it. SCRAMBLER_SIMD=scalar|avx2 overrides the choice.

#include <complex>
#include <cstddef>
#include <string_view>

namespace scrambler::kernels {

using cplx = std::complex<double>;

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    // c[m x n] = a[m x k] * b[k x n], row-major with leading dimensions.
    void (*cgemm)(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                  const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);

    // out[s] = sum_{j<=s} a[j] b[s-j] for s < n (product of truncated series).
    void (*convolve_truncated)(const double* a, const double* b, double* out, std::size_t n);

    // acc[m] += sum_r |x[r*period + m]|^2 for m < period; len % period == 0.
    void (*periodic_norm_accumulate)(const cplx* x, std::size_t len, std::size_t period,
                                     double* acc);

    double (*norm_sq)(const cplx* x, std::size_t n);
};

bool cpu_supports(Isa isa);

// nullptr when the ISA is unavailable on this machine or not compiled in.
const KernelTable* table(Isa isa);

// The table chosen for this process (cached on first use).
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace scrambler::kernels
