#include <cstdlib>
#include <string>

#include "impl.hpp"

namespace scrambler::kernels {

namespace {

const KernelTable kScalar{Isa::kScalar,
                          "scalar",
                          &scalar::cgemm,
                          &scalar::convolve_truncated,
                          &scalar::periodic_norm_accumulate,
                          &scalar::norm_sq};

#if defined(SCRAMBLER_HAVE_AVX2_TU)
const KernelTable kAvx2{Isa::kAvx2,
                        "avx2",
                        &avx2::cgemm,
                        &avx2::convolve_truncated,
                        &avx2::periodic_norm_accumulate,
                        &avx2::norm_sq};
#endif

const KernelTable& choose() {
    const char* forced = std::getenv("SCRAMBLER_SIMD");
    if (forced != nullptr) {
        std::string want(forced);
        if (want == "scalar") return kScalar;
        if (want == "avx2" && table(Isa::kAvx2) != nullptr) return *table(Isa::kAvx2);
    }
    if (const KernelTable* t = table(Isa::kAvx2)) return *t;
    return kScalar;
}

}  // namespace

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::kScalar:
            return true;
        case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* table(Isa isa) {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::kScalar:
            return &kScalar;
        case Isa::kAvx2:
#if defined(SCRAMBLER_HAVE_AVX2_TU)
            return &kAvx2;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable& active() {
    static const KernelTable& chosen = choose();
    return chosen;
}

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

}  // namespace scrambler::kernels
