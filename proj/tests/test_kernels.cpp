#include <doctest.h>

#include <random>
#include <vector>

#include "scrambler/kernels.hpp"

using namespace scrambler::kernels;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {nd(gen), nd(gen)};
    return v;
}

// Plain triple loop, independent of both kernel tables.
void naive_gemm(std::size_t m, std::size_t n, std::size_t k, const cplx* a, const cplx* b, cplx* c) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t l = 0; l < k; ++l) s += a[i * k + l] * b[l * n + j];
            c[i * n + j] = s;
        }
}

std::vector<const KernelTable*> available() {
    std::vector<const KernelTable*> out{table(Isa::kScalar)};
    if (auto* t = table(Isa::kAvx2)) out.push_back(t);
    return out;
}

}  // namespace

TEST_CASE("scalar table always exists") {
    REQUIRE(table(Isa::kScalar) != nullptr);
    CHECK(cpu_supports(Isa::kScalar));
    CHECK(isa_name(Isa::kScalar) == "scalar");
    CHECK(isa_name(Isa::kAvx2) == "avx2");
    const KernelTable& act = active();
    CHECK((act.isa == Isa::kScalar || cpu_supports(act.isa)));
}

TEST_CASE("cgemm matches the naive product for every table and shape") {
    std::mt19937_64 gen(1);
    for (const KernelTable* t : available()) {
        for (std::size_t m : {1u, 2u, 3u, 7u, 16u})
            for (std::size_t n : {1u, 2u, 5u, 8u, 33u})
                for (std::size_t k : {1u, 4u, 9u}) {
                    auto a = random_complex(m * k, gen), b = random_complex(k * n, gen);
                    std::vector<cplx> ref(m * n), got(m * n, cplx(99.0, 99.0));
                    naive_gemm(m, n, k, a.data(), b.data(), ref.data());
                    t->cgemm(m, n, k, a.data(), k, b.data(), n, got.data(), n);
                    double worst = 0.0;
                    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - got[i]));
                    CHECK_MESSAGE(worst < 1e-12, t->name << " m=" << m << " n=" << n << " k=" << k);
                }
    }
}

TEST_CASE("cgemm honours leading dimensions") {
    std::mt19937_64 gen(2);
    for (const KernelTable* t : available()) {
        const std::size_t m = 5, n = 6, k = 3, lda = 7, ldb = 9, ldc = 11;
        auto a = random_complex(m * lda, gen), b = random_complex(k * ldb, gen);
        std::vector<cplx> c(m * ldc, cplx(-5.0, 0.0));
        t->cgemm(m, n, k, a.data(), lda, b.data(), ldb, c.data(), ldc);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx s = 0.0;
                for (std::size_t l = 0; l < k; ++l) s += a[i * lda + l] * b[l * ldb + j];
                CHECK(std::abs(c[i * ldc + j] - s) < 1e-12);
            }
            for (std::size_t j = n; j < ldc; ++j) CHECK(c[i * ldc + j] == cplx(-5.0, 0.0));
        }
    }
}

TEST_CASE("truncated convolution") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (const KernelTable* t : available()) {
        for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 17u, 64u, 129u}) {
            std::vector<double> a(n), b(n), out(n);
            for (std::size_t i = 0; i < n; ++i) a[i] = nd(gen), b[i] = nd(gen);
            t->convolve_truncated(a.data(), b.data(), out.data(), n);
            for (std::size_t s = 0; s < n; ++s) {
                double ref = 0.0;
                for (std::size_t j = 0; j <= s; ++j) ref += a[j] * b[s - j];
                CHECK(std::abs(out[s] - ref) < 1e-12 * (1.0 + std::abs(ref)));
            }
        }
    }
}

TEST_CASE("periodic norm accumulation and norm") {
    std::mt19937_64 gen(4);
    for (const KernelTable* t : available()) {
        for (std::size_t period : {1u, 2u, 3u, 4u, 8u, 12u}) {
            std::size_t rows = 5;
            auto x = random_complex(period * rows, gen);
            std::vector<double> acc(period, 1.0), ref(period, 1.0);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t m = 0; m < period; ++m) ref[m] += std::norm(x[r * period + m]);
            t->periodic_norm_accumulate(x.data(), x.size(), period, acc.data());
            for (std::size_t m = 0; m < period; ++m) CHECK(std::abs(acc[m] - ref[m]) < 1e-12 * ref[m]);
        }
        for (std::size_t n : {0u, 1u, 3u, 8u, 101u}) {
            auto x = random_complex(n, gen);
            double ref = 0.0;
            for (auto v : x) ref += std::norm(v);
            CHECK(std::abs(t->norm_sq(x.data(), n) - ref) <= 1e-12 * (1.0 + ref));
        }
    }
}

TEST_CASE("scalar and avx2 agree bit-for-bit-close on the same inputs") {
    const KernelTable* s = table(Isa::kScalar);
    const KernelTable* v = table(Isa::kAvx2);
    if (!v) {
        MESSAGE("AVX2 not available; equivalence check skipped");
        return;
    }
    std::mt19937_64 gen(5);
    auto a = random_complex(64 * 64, gen), b = random_complex(64 * 64, gen);
    std::vector<cplx> c1(64 * 64), c2(64 * 64);
    s->cgemm(64, 64, 64, a.data(), 64, b.data(), 64, c1.data(), 64);
    v->cgemm(64, 64, 64, a.data(), 64, b.data(), 64, c2.data(), 64);
    for (std::size_t i = 0; i < c1.size(); ++i) CHECK(std::abs(c1[i] - c2[i]) < 1e-12);
}
