#pragma once

// Dense double-precision kernels with a scalar reference and an AVX2/FMA
// variant. All matrices are row-major with explicit leading dimensions.

#include <string_view>

namespace cr_orient::kernels {

enum class Backend { scalar, avx2 };

struct Table {
    // C += alpha * A * B, A is m x k, B is k x n.
    void (*gemm_nn)(int m, int n, int k, double alpha, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc);
    double (*dot)(int n, const double* x, const double* y);
    // y += a * x
    void (*axpy)(int n, double a, const double* x, double* y);
};

const Table& scalar_table();
const Table& avx2_table();  // falls back to scalar when not compiled in

bool avx2_compiled();
bool avx2_available();

// Backend picked once from CPU features; CR_ORIENT_SIMD=scalar forces the
// reference path.
Backend active_backend();
std::string_view backend_name(Backend b);
const Table& active();

void gemm_nn(int m, int n, int k, double alpha, const double* a, int lda,
             const double* b, int ldb, double* c, int ldc);
// C += alpha * A * B^T, A is m x k, B is n x k.
void gemm_nt(int m, int n, int k, double alpha, const double* a, int lda,
             const double* b, int ldb, double* c, int ldc);
// C += alpha * A^T * B, A is k x m, B is k x n.
void gemm_tn(int m, int n, int k, double alpha, const double* a, int lda,
             const double* b, int ldb, double* c, int ldc);
double dot(int n, const double* x, const double* y);
void axpy(int n, double a, const double* x, double* y);

}  // namespace cr_orient::kernels
