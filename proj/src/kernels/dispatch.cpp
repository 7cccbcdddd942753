#include "cr_orient/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <vector>

namespace cr_orient::kernels {

#ifndef CR_ORIENT_HAVE_AVX2
bool avx2_compiled() { return false; }
const Table& avx2_table() { return scalar_table(); }
#endif

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return avx2_compiled() && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() {
    static const Backend b = [] {
        const char* env = std::getenv("CR_ORIENT_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
        return avx2_available() ? Backend::avx2 : Backend::scalar;
    }();
    return b;
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const Table& active() {
    static const Table& t = active_backend() == Backend::avx2 ? avx2_table() : scalar_table();
    return t;
}

void gemm_nn(int m, int n, int k, double alpha, const double* a, int lda, const double* b,
             int ldb, double* c, int ldc) {
    active().gemm_nn(m, n, k, alpha, a, lda, b, ldb, c, ldc);
}

void gemm_nt(int m, int n, int k, double alpha, const double* a, int lda, const double* b,
             int ldb, double* c, int ldc) {
    if (m <= 0 || n <= 0 || k <= 0) return;
    std::vector<double> bt(static_cast<size_t>(k) * n);
    for (int j = 0; j < n; ++j)
        for (int p = 0; p < k; ++p) bt[static_cast<size_t>(p) * n + j] = b[static_cast<long>(j) * ldb + p];
    active().gemm_nn(m, n, k, alpha, a, lda, bt.data(), n, c, ldc);
}

void gemm_tn(int m, int n, int k, double alpha, const double* a, int lda, const double* b,
             int ldb, double* c, int ldc) {
    if (m <= 0 || n <= 0 || k <= 0) return;
    std::vector<double> at(static_cast<size_t>(m) * k);
    for (int p = 0; p < k; ++p)
        for (int i = 0; i < m; ++i) at[static_cast<size_t>(i) * k + p] = a[static_cast<long>(p) * lda + i];
    active().gemm_nn(m, n, k, alpha, at.data(), k, b, ldb, c, ldc);
}

double dot(int n, const double* x, const double* y) { return active().dot(n, x, y); }

void axpy(int n, double a, const double* x, double* y) { active().axpy(n, a, x, y); }

}  // namespace cr_orient::kernels
