// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include "cr_orient/kernels.hpp"

#include <immintrin.h>

namespace cr_orient::kernels {
namespace {

inline __m256i tail_mask(int r) {
    alignas(32) static const long long lanes[8] = {-1, -1, -1, -1, 0, 0, 0, 0};
    return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(lanes + 4 - r));
}

// 4 x 8 block of C, full k loop.
inline void micro_4x8(int k, double alpha, const double* a, int lda, const double* b,
                      int ldb, double* c, int ldc) {
    __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
    __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
    __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
    __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
    const double* a0 = a;
    const double* a1 = a + lda;
    const double* a2 = a + 2L * lda;
    const double* a3 = a + 3L * lda;
    for (int p = 0; p < k; ++p) {
        const double* bp = b + static_cast<long>(p) * ldb;
        const __m256d b0 = _mm256_loadu_pd(bp);
        const __m256d b1 = _mm256_loadu_pd(bp + 4);
        __m256d x = _mm256_broadcast_sd(a0 + p);
        c00 = _mm256_fmadd_pd(x, b0, c00);
        c01 = _mm256_fmadd_pd(x, b1, c01);
        x = _mm256_broadcast_sd(a1 + p);
        c10 = _mm256_fmadd_pd(x, b0, c10);
        c11 = _mm256_fmadd_pd(x, b1, c11);
        x = _mm256_broadcast_sd(a2 + p);
        c20 = _mm256_fmadd_pd(x, b0, c20);
        c21 = _mm256_fmadd_pd(x, b1, c21);
        x = _mm256_broadcast_sd(a3 + p);
        c30 = _mm256_fmadd_pd(x, b0, c30);
        c31 = _mm256_fmadd_pd(x, b1, c31);
    }
    const __m256d al = _mm256_set1_pd(alpha);
    auto store = [&](double* row, __m256d lo, __m256d hi) {
        _mm256_storeu_pd(row, _mm256_fmadd_pd(al, lo, _mm256_loadu_pd(row)));
        _mm256_storeu_pd(row + 4, _mm256_fmadd_pd(al, hi, _mm256_loadu_pd(row + 4)));
    };
    store(c, c00, c01);
    store(c + ldc, c10, c11);
    store(c + 2L * ldc, c20, c21);
    store(c + 3L * ldc, c30, c31);
}

// one row of C, columns [j0, n) handled in 4-wide strips with a masked tail
inline void row_strip(int n, int k, double alpha, const double* a, const double* b, int ldb,
                      double* c) {
    int j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int p = 0; p < k; ++p)
            acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + p),
                                  _mm256_loadu_pd(b + static_cast<long>(p) * ldb + j), acc);
        _mm256_storeu_pd(c + j,
                         _mm256_fmadd_pd(_mm256_set1_pd(alpha), acc, _mm256_loadu_pd(c + j)));
    }
    if (j < n) {
        const __m256i m = tail_mask(n - j);
        __m256d acc = _mm256_setzero_pd();
        for (int p = 0; p < k; ++p)
            acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + p),
                                  _mm256_maskload_pd(b + static_cast<long>(p) * ldb + j, m),
                                  acc);
        const __m256d old = _mm256_maskload_pd(c + j, m);
        _mm256_maskstore_pd(c + j, m, _mm256_fmadd_pd(_mm256_set1_pd(alpha), acc, old));
    }
}

void gemm_nn_avx2(int m, int n, int k, double alpha, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc) {
    if (m <= 0 || n <= 0 || k <= 0) return;
    constexpr int kc = 256;
    for (int p0 = 0; p0 < k; p0 += kc) {
        const int kb = (k - p0 < kc) ? k - p0 : kc;
        const double* ap = a + p0;
        const double* bp = b + static_cast<long>(p0) * ldb;
        const int n8 = n - n % 8;
        int i = 0;
        for (; i + 4 <= m; i += 4) {
            const double* ai = ap + static_cast<long>(i) * lda;
            double* ci = c + static_cast<long>(i) * ldc;
            for (int j = 0; j < n8; j += 8) micro_4x8(kb, alpha, ai, lda, bp + j, ldb, ci + j, ldc);
            if (n8 < n)
                for (int r = 0; r < 4; ++r)
                    row_strip(n - n8, kb, alpha, ai + static_cast<long>(r) * lda, bp + n8, ldb,
                              ci + static_cast<long>(r) * ldc + n8);
        }
        for (; i < m; ++i)
            row_strip(n, kb, alpha, ap + static_cast<long>(i) * lda, bp, ldb,
                      c + static_cast<long>(i) * ldc);
    }
}

double dot_avx2(int n, const double* x, const double* y) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
    }
    if (i + 4 <= n) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
        i += 4;
    }
    s0 = _mm256_add_pd(s0, s1);
    __m128d lo = _mm256_castpd256_pd128(s0);
    __m128d hi = _mm256_extractf128_pd(s0, 1);
    lo = _mm_add_pd(lo, hi);
    double s = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_avx2(int n, double a, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

bool avx2_compiled() { return true; }

const Table& avx2_table() {
    static const Table t{gemm_nn_avx2, dot_avx2, axpy_avx2};
    return t;
}

}  // namespace cr_orient::kernels
