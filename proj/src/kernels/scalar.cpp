#include "cr_orient/kernels.hpp"

namespace cr_orient::kernels {
namespace {

void gemm_nn_ref(int m, int n, int k, double alpha, const double* a, int lda,
                 const double* b, int ldb, double* c, int ldc) {
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<long>(i) * ldc;
        const double* ai = a + static_cast<long>(i) * lda;
        for (int p = 0; p < k; ++p) {
            const double s = alpha * ai[p];
            if (s == 0.0) continue;
            const double* bp = b + static_cast<long>(p) * ldb;
            for (int j = 0; j < n; ++j) ci[j] += s * bp[j];
        }
    }
}

double dot_ref(int n, const double* x, const double* y) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_ref(int n, double a, const double* x, double* y) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const Table& scalar_table() {
    static const Table t{gemm_nn_ref, dot_ref, axpy_ref};
    return t;
}

}  // namespace cr_orient::kernels
