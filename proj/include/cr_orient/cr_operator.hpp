#pragma once

// Discretized Cauchy-Riemann operators d_s - J d_t - S(s, t) on the half
// cylinder [0, L] x T (Re u(0, t) = 0) and on the full cylinder [-L, L] x T.

#include "cr_orient/analytic_oracles.hpp"
#include "cr_orient/dense.hpp"
#include "cr_orient/symplectic_path.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cr_orient {

enum class Domain { half, full };

class OperatorField {
public:
    using Coefficient = std::function<Mat(double s, double t)>;

    // S(s, t) = S for all s; the asymptotic loops are the same constant matrix
    static OperatorField constant(const Mat& s, Domain d);
    // S(s, .) equals s_plus(.) exactly for s >= asymptotic_from
    static OperatorField half(int n, Coefficient c, SymmetricLoop s_plus, double asymptotic_from,
                              std::string name = "field");
    // S(s, .) equals s_minus for s <= -asymptotic_from and s_plus for s >= asymptotic_from
    static OperatorField full(int n, Coefficient c, SymmetricLoop s_minus, SymmetricLoop s_plus,
                              double asymptotic_from, std::string name = "field");

    int n() const { return n_; }
    Domain domain() const { return domain_; }
    const std::string& name() const { return name_; }
    double asymptotic_from() const { return asym_; }
    const SymmetricLoop& s_plus() const { return plus_; }
    const SymmetricLoop& s_minus() const;
    Mat operator()(double s, double t) const;
    // true when S(s, .) is exactly the asymptotic loop at this s
    bool asymptotic_at(double s) const;

private:
    OperatorField(int n, Domain d, Coefficient c, SymmetricLoop plus, std::optional<SymmetricLoop> minus,
                  double asym, std::string name);
    int n_;
    Domain domain_;
    Coefficient c_;
    SymmetricLoop plus_;
    std::optional<SymmetricLoop> minus_;
    double asym_;
    std::string name_;
};

OperatorField build_T_r(double r);

// U D_S U^{-1}: coefficient (d_s U)U^{-1} - J (d_t U)U^{-1} + U S U^{-1} on the half cylinder.
// Requires U = I for s >= u.support_end().
OperatorField conjugated_field(const UnitaryField& u, const OperatorField& base);

// full-cylinder field blending s_minus into s_plus over s in [-1/2, 1/2]
OperatorField interpolating_field(const SymmetricLoop& s_minus, const SymmetricLoop& s_plus);

struct Discretization {
    int K = 16;
    double L = 8.0;
    int Ns = 200;  // s-intervals on [0, L]
    void validate() const;
};

struct ColumnInfo {
    int node = 0;       // s-grid index
    int frequency = 0;  // k >= 0
    bool sine = false;  // cos / sin partner of frequency k (k = 0 is the constant)
    int component = 0;  // 0..2n-1, q components first
};

class DiscretizedOperator {
public:
    int rows() const { return row_offset_.back(); }
    int cols() const { return col_offset_.back(); }
    int n() const { return n_; }
    int modes() const { return 2 * K_ + 1; }
    int node_count() const { return static_cast<int>(s_.size()); }
    Domain domain() const { return domain_; }
    double h() const { return h_; }
    const std::vector<double>& s_nodes() const { return s_; }
    const Discretization& discretization() const { return disc_; }
    // cols - rows; equals the Fredholm index for a full-rank realization
    int structural_index() const { return cols() - rows(); }

    RowMat apply(const RowMat& x) const;
    RowMat apply_t(const RowMat& y) const;
    RowMat to_dense() const;
    dense::BlockTridiagonal row_gram() const;

    ColumnInfo column_info(int col) const;
    // coefficient vector of u (values in C^n) in column coordinates
    Vec discretize(const std::function<CVec(double, double)>& u) const;
    // unweighted real Galerkin coefficients at node j (2n * modes entries)
    Vec node_coefficients(const Vec& x, int j) const;
    // u(s_j, t) reconstructed from a coefficient vector
    CVec evaluate(const Vec& x, int j, double t) const;

    friend DiscretizedOperator assemble_half_cylinder(const OperatorField&, const Discretization&);
    friend DiscretizedOperator assemble_full_cylinder(const OperatorField&, const Discretization&);

private:
    struct RowBlock {
        std::shared_ptr<const RowMat> left;   // acts on node j
        std::shared_ptr<const RowMat> right;  // acts on node j + 1
    };
    int n_ = 0, K_ = 0;
    double h_ = 0.0;
    Domain domain_ = Domain::half;
    Discretization disc_;
    std::vector<double> s_, w_;
    std::vector<int> col_offset_, row_offset_;
    std::vector<RowBlock> blocks_;
};

DiscretizedOperator assemble_half_cylinder(const OperatorField& field, const Discretization& disc);
DiscretizedOperator assemble_full_cylinder(const OperatorField& field, const Discretization& disc);
DiscretizedOperator assemble(const OperatorField& field, const Discretization& disc);

struct TolPolicy {
    double gap = 1e3;            // required ratio sigma_{d+1} / sigma_d
    double floor_rel = 1e-13;    // singular values below floor_rel * sigma_max are clamped
    int max_iterations = 40;
    double ritz_tol = 1e-2;     // relative settling of the first value above the gap
    unsigned long long seed = 0x5eed;
};

struct KernelFrame {
    Mat basis;                      // cols x d, orthonormal
    std::vector<double> singular;   // smallest right singular values, ascending
    double gap_ratio = 0.0;         // sigma_{d+1} / max(sigma_d, floor)
    double sigma_max = 0.0;
    int dim() const { return static_cast<int>(basis.cols()); }
};

struct KernelAnalysis {
    KernelFrame kernel;
    Mat cokernel;                   // rows x c, orthonormal
    std::vector<double> left_singular;
    double left_gap_ratio = 0.0;
    int index() const { return kernel.dim() - static_cast<int>(cokernel.cols()); }
    bool surjective() const { return cokernel.cols() == 0; }
};

// Throws NumericalError("no clear spectral gap ...") when no 1e3 gap is found.
KernelAnalysis analyze_kernel(const DiscretizedOperator& a, const TolPolicy& tol = {});
KernelFrame numerical_kernel(const DiscretizedOperator& a, const TolPolicy& tol = {});
int fredholm_index_estimate(const DiscretizedOperator& a, const TolPolicy& tol = {});

// deterministic ordering and sign of an orthonormal basis of a subspace
Mat canonical_frame(const Mat& basis);

// largest principal angle between two column spans
double max_principal_angle(const Mat& a, const Mat& b);

}  // namespace cr_orient
