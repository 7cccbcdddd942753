#include "cr_orient/dense.hpp"

#include "cr_orient/kernels.hpp"

#include <cmath>
#include <string>

namespace cr_orient::dense {
namespace {

constexpr int nb = 32;

void check(bool ok, const char* what) {
    if (!ok) throw InputError(std::string("dense: shape mismatch in ") + what);
}

int ld(const RowMat& m) { return static_cast<int>(m.cols()); }

}  // namespace

void add_product(RowMat& c, const RowMat& a, const RowMat& b, double alpha) {
    check(a.cols() == b.rows() && c.rows() == a.rows() && c.cols() == b.cols(), "add_product");
    kernels::gemm_nn(a.rows(), b.cols(), a.cols(), alpha, a.data(), ld(a), b.data(), ld(b),
                     c.data(), ld(c));
}

void add_product_nt(RowMat& c, const RowMat& a, const RowMat& b, double alpha) {
    check(a.cols() == b.cols() && c.rows() == a.rows() && c.cols() == b.rows(), "add_product_nt");
    kernels::gemm_nt(a.rows(), b.rows(), a.cols(), alpha, a.data(), ld(a), b.data(), ld(b),
                     c.data(), ld(c));
}

void add_product_tn(RowMat& c, const RowMat& a, const RowMat& b, double alpha) {
    check(a.rows() == b.rows() && c.rows() == a.cols() && c.cols() == b.cols(), "add_product_tn");
    kernels::gemm_tn(a.cols(), b.cols(), a.rows(), alpha, a.data(), ld(a), b.data(), ld(b),
                     c.data(), ld(c));
}

void cholesky_lower(RowMat& a) {
    check(a.rows() == a.cols(), "cholesky_lower");
    const int n = static_cast<int>(a.rows());
    const int lda = n;
    double* p = a.data();
    for (int k0 = 0; k0 < n; k0 += nb) {
        const int kb = std::min(nb, n - k0);
        // diagonal block, already updated by previous panels
        for (int i = k0; i < k0 + kb; ++i) {
            double* ri = p + static_cast<long>(i) * lda;
            for (int j = k0; j <= i; ++j) {
                const double* rj = p + static_cast<long>(j) * lda;
                double v = ri[j] - kernels::dot(j - k0, ri + k0, rj + k0);
                if (j == i) {
                    if (!(v > 0.0)) throw NumericalError("cholesky: matrix not positive definite");
                    ri[j] = std::sqrt(v);
                } else {
                    ri[j] = v / rj[j];
                }
            }
        }
        const int rest = n - k0 - kb;
        if (rest == 0) break;
        // panel below the diagonal block
        for (int i = k0 + kb; i < n; ++i) {
            double* ri = p + static_cast<long>(i) * lda;
            for (int j = k0; j < k0 + kb; ++j) {
                const double* rj = p + static_cast<long>(j) * lda;
                ri[j] = (ri[j] - kernels::dot(j - k0, ri + k0, rj + k0)) / rj[j];
            }
        }
        // trailing update A22 -= L21 L21^T
        kernels::gemm_nt(rest, rest, kb, -1.0, p + static_cast<long>(k0 + kb) * lda + k0, lda,
                         p + static_cast<long>(k0 + kb) * lda + k0, lda,
                         p + static_cast<long>(k0 + kb) * lda + k0 + kb, lda);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) p[static_cast<long>(i) * lda + j] = 0.0;
}

void solve_right_lower_t(const RowMat& l, RowMat& x) {
    check(l.rows() == l.cols() && x.cols() == l.rows(), "solve_right_lower_t");
    const int n = static_cast<int>(l.rows());
    const int m = static_cast<int>(x.rows());
    const double* lp = l.data();
    double* xp = x.data();
    for (int k0 = 0; k0 < n; k0 += nb) {
        const int kb = std::min(nb, n - k0);
        if (k0 > 0)
            kernels::gemm_nt(m, kb, k0, -1.0, xp, n, lp + static_cast<long>(k0) * n, n, xp + k0, n);
        for (int r = 0; r < m; ++r) {
            double* xr = xp + static_cast<long>(r) * n;
            for (int j = k0; j < k0 + kb; ++j) {
                const double* lj = lp + static_cast<long>(j) * n;
                xr[j] = (xr[j] - kernels::dot(j - k0, xr + k0, lj + k0)) / lj[j];
            }
        }
    }
}

void solve_lower(const RowMat& l, RowMat& b) {
    check(l.rows() == l.cols() && b.rows() == l.rows(), "solve_lower");
    const int n = static_cast<int>(l.rows());
    const int p = static_cast<int>(b.cols());
    for (int k = 0; k < n; ++k) {
        double* bk = b.data() + static_cast<long>(k) * p;
        const double* lk = l.data() + static_cast<long>(k) * n;
        for (int j = 0; j < k; ++j)
            if (lk[j] != 0.0) kernels::axpy(p, -lk[j], b.data() + static_cast<long>(j) * p, bk);
        const double inv = 1.0 / lk[k];
        for (int c = 0; c < p; ++c) bk[c] *= inv;
    }
}

void solve_lower_t(const RowMat& l, RowMat& b) {
    check(l.rows() == l.cols() && b.rows() == l.rows(), "solve_lower_t");
    const int n = static_cast<int>(l.rows());
    const int p = static_cast<int>(b.cols());
    for (int k = n - 1; k >= 0; --k) {
        double* bk = b.data() + static_cast<long>(k) * p;
        const double* lk = l.data() + static_cast<long>(k) * n;
        const double inv = 1.0 / lk[k];
        for (int c = 0; c < p; ++c) bk[c] *= inv;
        for (int j = 0; j < k; ++j)
            if (lk[j] != 0.0) kernels::axpy(p, -lk[j], bk, b.data() + static_cast<long>(j) * p);
    }
}

int BlockTridiagonal::size() const {
    int s = 0;
    for (const auto& d : diag) s += static_cast<int>(d.rows());
    return s;
}

BlockCholesky::BlockCholesky(BlockTridiagonal mat) {
    const size_t nblk = mat.diag.size();
    if (nblk == 0) throw InputError("BlockCholesky: empty matrix");
    if (mat.lower.size() + 1 != nblk) throw InputError("BlockCholesky: block count mismatch");
    offset_.resize(nblk + 1, 0);
    for (size_t j = 0; j < nblk; ++j)
        offset_[j + 1] = offset_[j] + static_cast<int>(mat.diag[j].rows());
    total_ = offset_.back();
    l_ = std::move(mat.diag);
    m_ = std::move(mat.lower);
    for (size_t j = 0; j < nblk; ++j) {
        cholesky_lower(l_[j]);
        if (j + 1 == nblk) break;
        solve_right_lower_t(l_[j], m_[j]);
        add_product_nt(l_[j + 1], m_[j], m_[j], -1.0);
    }
}

RowMat BlockCholesky::solve(const RowMat& b) const {
    if (b.rows() != total_) throw InputError("BlockCholesky::solve: size mismatch");
    const int p = static_cast<int>(b.cols());
    const size_t nblk = l_.size();
    std::vector<RowMat> y(nblk);
    for (size_t j = 0; j < nblk; ++j) {
        y[j] = b.middleRows(offset_[j], offset_[j + 1] - offset_[j]);
        if (j > 0) add_product(y[j], m_[j - 1], y[j - 1], -1.0);
        solve_lower(l_[j], y[j]);
    }
    for (size_t jj = nblk; jj-- > 0;) {
        if (jj + 1 < nblk) add_product_tn(y[jj], m_[jj], y[jj + 1], -1.0);
        solve_lower_t(l_[jj], y[jj]);
    }
    RowMat x(total_, p);
    for (size_t j = 0; j < nblk; ++j) x.middleRows(offset_[j], y[j].rows()) = y[j];
    return x;
}

}  // namespace cr_orient::dense
