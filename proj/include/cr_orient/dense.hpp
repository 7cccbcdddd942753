#pragma once

// Row-major dense routines on top of the SIMD kernels.

#include "cr_orient/common.hpp"

#include <vector>

namespace cr_orient::dense {

// C += alpha * A * B (and transposed variants); shapes are checked.
void add_product(RowMat& c, const RowMat& a, const RowMat& b, double alpha = 1.0);
void add_product_nt(RowMat& c, const RowMat& a, const RowMat& b, double alpha = 1.0);
void add_product_tn(RowMat& c, const RowMat& a, const RowMat& b, double alpha = 1.0);

// In-place lower Cholesky (upper triangle zeroed). Throws NumericalError on
// a non-positive pivot.
void cholesky_lower(RowMat& a);

// X := X * L^{-T}
void solve_right_lower_t(const RowMat& l, RowMat& x);
// B := L^{-1} B
void solve_lower(const RowMat& l, RowMat& b);
// B := L^{-T} B
void solve_lower_t(const RowMat& l, RowMat& b);

// Symmetric positive definite block-tridiagonal matrix.
struct BlockTridiagonal {
    std::vector<RowMat> diag;   // D_j
    std::vector<RowMat> lower;  // block (j+1, j)
    int size() const;
};

class BlockCholesky {
public:
    explicit BlockCholesky(BlockTridiagonal m);
    // Solves (L L^T) X = B for B of shape size() x p.
    RowMat solve(const RowMat& b) const;
    int size() const { return total_; }

private:
    std::vector<RowMat> l_;
    std::vector<RowMat> m_;  // lower block times L_j^{-T}
    std::vector<int> offset_;
    int total_ = 0;
};

}  // namespace cr_orient::dense
