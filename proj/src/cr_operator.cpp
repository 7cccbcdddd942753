#include "cr_orient/cr_operator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace cr_orient {

namespace {

constexpr double fd_step = 1e-5;

Mat square_checked(Mat s, const char* where) {
    if (s.rows() != s.cols()) throw InputError(std::string(where) + ": coefficient must be square");
    return s;
}

}  // namespace

OperatorField::OperatorField(int n, Domain d, Coefficient c, SymmetricLoop plus,
                             std::optional<SymmetricLoop> minus, double asym, std::string name)
    : n_(n), domain_(d), c_(std::move(c)), plus_(std::move(plus)), minus_(std::move(minus)),
      asym_(asym), name_(std::move(name)) {
    if (n_ < 1) throw InputError("OperatorField: n must be positive");
    if (plus_.n() != n_ || (minus_ && minus_->n() != n_))
        throw InputError("OperatorField: asymptotic loop dimension mismatch");
}

OperatorField OperatorField::constant(const Mat& s, Domain d) {
    auto loop = SymmetricLoop::constant(s);
    const int n = loop.n();
    std::optional<SymmetricLoop> minus;
    if (d == Domain::full) minus = loop;
    return OperatorField(n, d, [s](double, double) { return s; }, loop, minus,
                         -std::numeric_limits<double>::infinity(), "constant");
}

OperatorField OperatorField::half(int n, Coefficient c, SymmetricLoop s_plus, double asymptotic_from,
                                  std::string name) {
    return OperatorField(n, Domain::half, std::move(c), std::move(s_plus), std::nullopt,
                         asymptotic_from, std::move(name));
}

OperatorField OperatorField::full(int n, Coefficient c, SymmetricLoop s_minus, SymmetricLoop s_plus,
                                  double asymptotic_from, std::string name) {
    return OperatorField(n, Domain::full, std::move(c), std::move(s_plus), std::move(s_minus),
                         asymptotic_from, std::move(name));
}

const SymmetricLoop& OperatorField::s_minus() const {
    if (!minus_) throw InputError("OperatorField: half-cylinder field has no negative end");
    return *minus_;
}

Mat OperatorField::operator()(double s, double t) const {
    Mat m = square_checked(c_(s, t), "OperatorField");
    if (m.rows() != 2 * n_) throw InputError("OperatorField: coefficient has wrong size");
    return m;
}

bool OperatorField::asymptotic_at(double s) const {
    if (domain_ == Domain::half) return s >= asym_;
    return std::abs(s) >= asym_;
}

OperatorField build_T_r(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw InputError("build_T_r: r must lie in [0, 1]");
    auto c = [r](double s, double t) { return realify(t_r_coefficient(r, s, t)); };
    std::ostringstream name;
    name << "T_" << r;
    return OperatorField::half(2, c, SymmetricLoop::constant(-pi * Mat::Identity(4, 4)),
                               std::max(0.0, 1.0 - r), name.str());
}

OperatorField conjugated_field(const UnitaryField& u, const OperatorField& base) {
    if (base.domain() != Domain::half) throw InputError("conjugated_field: base must live on the half cylinder");
    if (u.n() != base.n()) throw InputError("conjugated_field: dimension mismatch");
    const Mat j = complex_structure(base.n());
    auto c = [u, base, j](double s, double t) -> Mat {
        const UnitarySample x = u(s, t);
        const CMat inv = x.value.adjoint();
        const Mat ur = realify(x.value);
        // the d_s term is antisymmetric; only the asymptotic loop has to be symmetric
        return Mat(realify(x.ds * inv) - j * realify(x.dt * inv) + ur * base(s, t) * ur.transpose());
    };
    return OperatorField::half(base.n(), c, base.s_plus(),
                               std::max(base.asymptotic_from(), u.support_end()),
                               u.name() + "*" + base.name());
}

OperatorField interpolating_field(const SymmetricLoop& s_minus, const SymmetricLoop& s_plus) {
    if (s_minus.n() != s_plus.n()) throw InputError("interpolating_field: dimension mismatch");
    auto c = [s_minus, s_plus](double s, double t) -> Mat {
        const double b = cutoff_phi((s + 0.5) / 2.0);
        return (1.0 - b) * s_minus(t) + b * s_plus(t);
    };
    return OperatorField::full(s_plus.n(), c, s_minus, s_plus, 0.5, "interpolation");
}

void Discretization::validate() const {
    if (K < 4) throw InputError("Discretization: K must be at least 4");
    if (Ns < 8 * K) throw InputError("Discretization: Ns must be at least 8K");
    if (!(L >= 4.0)) throw InputError("Discretization: L must be at least 4");
}

namespace {

// Fourier-Galerkin data in the real basis {1, sqrt2 cos 2 pi k t, sqrt2 sin 2 pi k t}.
struct Galerkin {
    int n, K, M, N, Nt;
    Mat basis_at_quad;  // M x Nt
    Mat dt_part;        // kron(Dt, -J)

    Galerkin(int n_, int K_) : n(n_), K(K_), M(2 * K_ + 1), N(2 * n_ * (2 * K_ + 1)), Nt(4 * K_ + 8) {
        basis_at_quad.resize(M, Nt);
        for (int q = 0; q < Nt; ++q) basis_at_quad.col(q) = basis(static_cast<double>(q) / Nt);
        Mat dt = Mat::Zero(M, M);
        for (int k = 1; k <= K; ++k) {
            dt(2 * k, 2 * k - 1) = -2 * pi * k;
            dt(2 * k - 1, 2 * k) = 2 * pi * k;
        }
        const Mat mj = -complex_structure(n);
        dt_part = Mat::Zero(N, N);
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
                if (dt(a, b) != 0.0) dt_part.block(a * 2 * n, b * 2 * n, 2 * n, 2 * n) = dt(a, b) * mj;
    }

    Vec basis(double t) const {
        Vec v(M);
        v(0) = 1.0;
        for (int k = 1; k <= K; ++k) {
            v(2 * k - 1) = std::sqrt(2.0) * std::cos(2 * pi * k * t);
            v(2 * k) = std::sqrt(2.0) * std::sin(2 * pi * k * t);
        }
        return v;
    }

    // Galerkin matrix of multiplication by S(t)
    Mat project(const std::vector<Mat>& s) const {
        const int d = 2 * n;
        bool constant = true;
        for (int q = 1; q < Nt && constant; ++q) constant = (s[q] - s[0]).cwiseAbs().maxCoeff() == 0.0;
        Mat g = Mat::Zero(N, N);
        if (constant) {
            for (int m = 0; m < M; ++m) g.block(m * d, m * d, d, d) = s[0];
            return g;
        }
        Vec f(Nt);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                for (int q = 0; q < Nt; ++q) f(q) = s[q](a, b);
                const Mat gab = basis_at_quad * f.asDiagonal() * basis_at_quad.transpose() / Nt;
                for (int m1 = 0; m1 < M; ++m1)
                    for (int m2 = 0; m2 < M; ++m2) g(m1 * d + a, m2 * d + b) = gab(m1, m2);
            }
        return g;
    }

    Mat op(const std::function<Mat(double)>& s_of_t) const {
        std::vector<Mat> s(Nt);
        for (int q = 0; q < Nt; ++q) s[q] = s_of_t(static_cast<double>(q) / Nt);
        return dt_part - project(s);
    }
};

void check_asymptotic_loop(const SymmetricLoop& loop, const char* which) {
    const SymplecticPath g = integrate_symplectic_path(loop, 512);
    if (!is_nondegenerate(g))
        throw InputError(std::string("assemble: asymptotic loop at ") + which + " is degenerate");
}

void check_asymptotic_defect(const OperatorField& f, const SymmetricLoop& loop, double s, int nt,
                             const char* which) {
    double defect = 0.0;
    for (int q = 0; q < nt; ++q) {
        const double t = static_cast<double>(q) / nt;
        defect = std::max(defect, (f(s, t) - loop(t)).cwiseAbs().maxCoeff());
    }
    if (defect > 1e-10) {
        std::ostringstream msg;
        msg << "assemble: coefficient differs from the asymptotic loop at s = " << s << " by " << defect
            << "; increase L";
        throw InputError(msg.str());
    }
}

// Eigenvectors of the symmetric asymptotic operator with eigenvalue of the given sign.
Mat spectral_rows(const Mat& a, bool negative) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()));
    const Vec& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::vector<int> pick;
    for (int i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) < 1e-9 * scale)
            throw InputError("assemble: truncated asymptotic operator has a zero eigenvalue");
        if ((ev(i) < 0) == negative) pick.push_back(i);
    }
    Mat p(a.rows(), static_cast<int>(pick.size()));
    for (size_t i = 0; i < pick.size(); ++i) p.col(static_cast<int>(i)) = es.eigenvectors().col(pick[i]);
    return p.transpose();
}

// Per-node Pade factors I -+ h/2 F + h^2/12 (F' + F^2), F = -A(s).
struct NodeFactors {
    std::shared_ptr<const Mat> plus;   // I + h/2 F + h^2/12 G
    std::shared_ptr<const Mat> minus;  // I - h/2 F + h^2/12 G
};

class NodeBuilder {
public:
    NodeBuilder(const OperatorField& f, const Galerkin& g, double h) : f_(f), g_(g), h_(h) {}

    NodeFactors at(double s) {
        const bool asym = f_.asymptotic_at(s) && f_.asymptotic_at(s - fd_step) && f_.asymptotic_at(s + fd_step);
        if (asym) {
            const bool right = s > 0 || f_.domain() == Domain::half;
            NodeFactors& cache = right ? plus_cache_ : minus_cache_;
            if (!cache.plus) {
                const SymmetricLoop& loop = right ? f_.s_plus() : f_.s_minus();
                cache = make(g_.op([&](double t) { return loop(t); }), Mat::Zero(g_.N, g_.N));
            }
            return cache;
        }
        const Mat a = a_at(s);
        const double lo = (f_.domain() == Domain::half) ? std::max(0.0, s - fd_step) : s - fd_step;
        const Mat da = (a_at(s + fd_step) - a_at(lo)) / (s + fd_step - lo);
        return make(a, da);
    }

private:
    Mat a_at(double s) const {
        return g_.op([&](double t) { return f_(s, t); });
    }
    NodeFactors make(const Mat& a, const Mat& da) const {
        const Mat f = -a;
        const Mat gg = -da + f * f;
        const Mat id = Mat::Identity(g_.N, g_.N);
        return NodeFactors{std::make_shared<const Mat>(id + 0.5 * h_ * f + h_ * h_ / 12.0 * gg),
                           std::make_shared<const Mat>(id - 0.5 * h_ * f + h_ * h_ / 12.0 * gg)};
    }
    const OperatorField& f_;
    const Galerkin& g_;
    double h_;
    NodeFactors plus_cache_, minus_cache_;
};

// Reuses scaled copies when the same factor and scale repeat.
class ScaledCache {
public:
    std::shared_ptr<const RowMat> get(const std::shared_ptr<const Mat>& m, double scale,
                                      const std::vector<int>* keep = nullptr) {
        if (!keep && m == last_src_ && scale == last_scale_) return last_;
        RowMat out;
        if (keep) {
            out.resize(m->rows(), static_cast<int>(keep->size()));
            for (size_t c = 0; c < keep->size(); ++c) out.col(static_cast<int>(c)) = scale * m->col((*keep)[c]);
            return std::make_shared<const RowMat>(std::move(out));
        }
        out = scale * (*m);
        last_src_ = m;
        last_scale_ = scale;
        last_ = std::make_shared<const RowMat>(std::move(out));
        return last_;
    }

private:
    std::shared_ptr<const Mat> last_src_;
    double last_scale_ = 0.0;
    std::shared_ptr<const RowMat> last_;
};

RowMat stack(const RowMat& top, const RowMat& bottom) {
    RowMat out(top.rows() + bottom.rows(), std::max(top.cols(), bottom.cols()));
    out << top, bottom;
    return out;
}

}  // namespace

DiscretizedOperator assemble_half_cylinder(const OperatorField& field, const Discretization& disc) {
    disc.validate();
    if (field.domain() != Domain::half) throw InputError("assemble_half_cylinder: field is not a half-cylinder field");
    const int n = field.n(), K = disc.K, Ns = disc.Ns;
    const Galerkin g(n, K);
    const int N = g.N;
    const double h = disc.L / Ns;

    check_asymptotic_loop(field.s_plus(), "+infinity");
    check_asymptotic_defect(field, field.s_plus(), disc.L, g.Nt, "+infinity");

    DiscretizedOperator op;
    op.n_ = n;
    op.K_ = K;
    op.h_ = h;
    op.domain_ = Domain::half;
    op.disc_ = disc;
    op.s_.resize(Ns + 1);
    op.w_.assign(Ns + 1, h);
    op.w_[0] = op.w_[Ns] = h / 2;
    for (int j = 0; j <= Ns; ++j) op.s_[j] = j * h;

    std::vector<int> keep;  // p components at s = 0
    for (int i = 0; i < N; ++i)
        if (i % (2 * n) >= n) keep.push_back(i);

    op.col_offset_.assign(1, 0);
    for (int j = 0; j <= Ns; ++j) op.col_offset_.push_back(op.col_offset_.back() + (j == 0 ? n * g.M : N));

    NodeBuilder nodes(field, g, h);
    ScaledCache lcache, rcache;
    const double sh = std::sqrt(h) / h;
    NodeFactors cur = nodes.at(0.0);
    const Mat neg = spectral_rows(g.op([&](double t) { return field.s_plus()(t); }), true);

    op.row_offset_.assign(1, 0);
    for (int j = 0; j < Ns; ++j) {
        NodeFactors next = nodes.at(op.s_[j + 1]);
        DiscretizedOperator::RowBlock b;
        b.left = lcache.get(cur.plus, -sh / std::sqrt(op.w_[j]), j == 0 ? &keep : nullptr);
        b.right = rcache.get(next.minus, sh / std::sqrt(op.w_[j + 1]));
        if (j == Ns - 1) {
            b.left = std::make_shared<const RowMat>(stack(*b.left, RowMat::Zero(neg.rows(), b.left->cols())));
            RowMat spec = neg / (h * std::sqrt(op.w_[Ns]));
            b.right = std::make_shared<const RowMat>(stack(*b.right, spec));
        }
        op.row_offset_.push_back(op.row_offset_.back() + static_cast<int>(b.left->rows()));
        op.blocks_.push_back(std::move(b));
        cur = next;
    }
    return op;
}

DiscretizedOperator assemble_full_cylinder(const OperatorField& field, const Discretization& disc) {
    disc.validate();
    if (field.domain() != Domain::full) throw InputError("assemble_full_cylinder: field is not a full-cylinder field");
    const int n = field.n(), K = disc.K, Ns = 2 * disc.Ns;
    const Galerkin g(n, K);
    const int N = g.N;
    const double h = disc.L / disc.Ns;

    check_asymptotic_loop(field.s_plus(), "+infinity");
    check_asymptotic_loop(field.s_minus(), "-infinity");
    check_asymptotic_defect(field, field.s_plus(), disc.L, g.Nt, "+infinity");
    check_asymptotic_defect(field, field.s_minus(), -disc.L, g.Nt, "-infinity");

    DiscretizedOperator op;
    op.n_ = n;
    op.K_ = K;
    op.h_ = h;
    op.domain_ = Domain::full;
    op.disc_ = disc;
    op.s_.resize(Ns + 1);
    op.w_.assign(Ns + 1, h);
    op.w_[0] = op.w_[Ns] = h / 2;
    for (int j = 0; j <= Ns; ++j) op.s_[j] = -disc.L + j * h;
    op.col_offset_.assign(1, 0);
    for (int j = 0; j <= Ns; ++j) op.col_offset_.push_back(op.col_offset_.back() + N);

    NodeBuilder nodes(field, g, h);
    ScaledCache lcache, rcache;
    const double sh = std::sqrt(h) / h;
    const Mat pos = spectral_rows(g.op([&](double t) { return field.s_minus()(t); }), false);
    const Mat neg = spectral_rows(g.op([&](double t) { return field.s_plus()(t); }), true);
    NodeFactors cur = nodes.at(op.s_[0]);

    op.row_offset_.assign(1, 0);
    for (int j = 0; j < Ns; ++j) {
        NodeFactors next = nodes.at(op.s_[j + 1]);
        DiscretizedOperator::RowBlock b;
        b.left = lcache.get(cur.plus, -sh / std::sqrt(op.w_[j]));
        b.right = rcache.get(next.minus, sh / std::sqrt(op.w_[j + 1]));
        if (j == 0) {
            RowMat spec = pos / (h * std::sqrt(op.w_[0]));
            b.left = std::make_shared<const RowMat>(stack(spec, *b.left));
            b.right = std::make_shared<const RowMat>(stack(RowMat::Zero(pos.rows(), N), *b.right));
        }
        if (j == Ns - 1) {
            b.left = std::make_shared<const RowMat>(stack(*b.left, RowMat::Zero(neg.rows(), N)));
            RowMat spec = neg / (h * std::sqrt(op.w_[Ns]));
            b.right = std::make_shared<const RowMat>(stack(*b.right, spec));
        }
        op.row_offset_.push_back(op.row_offset_.back() + static_cast<int>(b.left->rows()));
        op.blocks_.push_back(std::move(b));
        cur = next;
    }
    return op;
}

DiscretizedOperator assemble(const OperatorField& field, const Discretization& disc) {
    return field.domain() == Domain::half ? assemble_half_cylinder(field, disc)
                                          : assemble_full_cylinder(field, disc);
}

RowMat DiscretizedOperator::apply(const RowMat& x) const {
    if (x.rows() != cols()) throw InputError("DiscretizedOperator::apply: size mismatch");
    RowMat y = RowMat::Zero(rows(), x.cols());
    for (size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        RowMat yj = RowMat::Zero(b.left->rows(), x.cols());
        RowMat x0 = x.middleRows(col_offset_[j], b.left->cols());
        RowMat x1 = x.middleRows(col_offset_[j + 1], b.right->cols());
        dense::add_product(yj, *b.left, x0);
        dense::add_product(yj, *b.right, x1);
        y.middleRows(row_offset_[j], yj.rows()) = yj;
    }
    return y;
}

RowMat DiscretizedOperator::apply_t(const RowMat& y) const {
    if (y.rows() != rows()) throw InputError("DiscretizedOperator::apply_t: size mismatch");
    RowMat x = RowMat::Zero(cols(), y.cols());
    for (size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        RowMat yj = y.middleRows(row_offset_[j], b.left->rows());
        RowMat x0 = RowMat::Zero(b.left->cols(), y.cols());
        RowMat x1 = RowMat::Zero(b.right->cols(), y.cols());
        dense::add_product_tn(x0, *b.left, yj);
        dense::add_product_tn(x1, *b.right, yj);
        x.middleRows(col_offset_[j], x0.rows()) += x0;
        x.middleRows(col_offset_[j + 1], x1.rows()) += x1;
    }
    return x;
}

RowMat DiscretizedOperator::to_dense() const {
    RowMat a = RowMat::Zero(rows(), cols());
    for (size_t j = 0; j < blocks_.size(); ++j) {
        const auto& b = blocks_[j];
        a.block(row_offset_[j], col_offset_[j], b.left->rows(), b.left->cols()) = *b.left;
        a.block(row_offset_[j], col_offset_[j + 1], b.right->rows(), b.right->cols()) += *b.right;
    }
    return a;
}

dense::BlockTridiagonal DiscretizedOperator::row_gram() const {
    dense::BlockTridiagonal g;
    const size_t nb = blocks_.size();
    g.diag.resize(nb);
    g.lower.resize(nb > 0 ? nb - 1 : 0);
    std::map<std::pair<const RowMat*, const RowMat*>, size_t> seen_diag, seen_lower;
    for (size_t j = 0; j < nb; ++j) {
        const auto& b = blocks_[j];
        const auto key = std::make_pair(b.left.get(), b.right.get());
        if (auto it = seen_diag.find(key); it != seen_diag.end()) {
            g.diag[j] = g.diag[it->second];
        } else {
            RowMat d = RowMat::Zero(b.left->rows(), b.left->rows());
            dense::add_product_nt(d, *b.left, *b.left);
            dense::add_product_nt(d, *b.right, *b.right);
            g.diag[j] = std::move(d);
            seen_diag.emplace(key, j);
        }
        if (j + 1 < nb) {
            const auto& c = blocks_[j + 1];
            const auto lkey = std::make_pair(c.left.get(), b.right.get());
            if (auto it = seen_lower.find(lkey); it != seen_lower.end()) {
                g.lower[j] = g.lower[it->second];
            } else {
                RowMat e = RowMat::Zero(c.left->rows(), b.right->rows());
                dense::add_product_nt(e, *c.left, *b.right);
                g.lower[j] = std::move(e);
                seen_lower.emplace(lkey, j);
            }
        }
    }
    return g;
}

ColumnInfo DiscretizedOperator::column_info(int col) const {
    if (col < 0 || col >= cols()) throw InputError("column_info: column out of range");
    const auto it = std::upper_bound(col_offset_.begin(), col_offset_.end(), col);
    const int node = static_cast<int>(it - col_offset_.begin()) - 1;
    int local = col - col_offset_[node];
    int slot, comp;
    if (domain_ == Domain::half && node == 0) {
        slot = local / n_;
        comp = n_ + local % n_;
    } else {
        slot = local / (2 * n_);
        comp = local % (2 * n_);
    }
    ColumnInfo info;
    info.node = node;
    info.frequency = (slot + 1) / 2;
    info.sine = slot > 0 && slot % 2 == 0;
    info.component = comp;
    return info;
}

Vec DiscretizedOperator::discretize(const std::function<CVec(double, double)>& u) const {
    const Galerkin g(n_, K_);
    Vec x = Vec::Zero(cols());
    Mat vals(2 * n_, g.Nt);
    for (int j = 0; j < node_count(); ++j) {
        for (int q = 0; q < g.Nt; ++q) {
            const CVec v = u(s_[j], static_cast<double>(q) / g.Nt);
            if (v.size() != n_) throw InputError("discretize: function has wrong dimension");
            vals.col(q).head(n_) = v.real();
            vals.col(q).tail(n_) = v.imag();
        }
        const Mat coef = vals * g.basis_at_quad.transpose() / g.Nt;  // 2n x M
        const double sw = std::sqrt(w_[j]);
        for (int m = 0; m < g.M; ++m)
            for (int c = 0; c < 2 * n_; ++c) {
                if (domain_ == Domain::half && j == 0) {
                    if (c >= n_) x(col_offset_[0] + m * n_ + (c - n_)) = sw * coef(c, m);
                } else {
                    x(col_offset_[j] + m * 2 * n_ + c) = sw * coef(c, m);
                }
            }
    }
    return x;
}

Vec DiscretizedOperator::node_coefficients(const Vec& x, int j) const {
    if (x.size() != cols() || j < 0 || j >= node_count()) throw InputError("node_coefficients: bad arguments");
    const int M = modes();
    Vec c = Vec::Zero(2 * n_ * M);
    const double inv = 1.0 / std::sqrt(w_[j]);
    if (domain_ == Domain::half && j == 0) {
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < n_; ++k) c(m * 2 * n_ + n_ + k) = inv * x(col_offset_[0] + m * n_ + k);
    } else {
        c = inv * x.segment(col_offset_[j], 2 * n_ * M);
    }
    return c;
}

CVec DiscretizedOperator::evaluate(const Vec& x, int j, double t) const {
    const Vec c = node_coefficients(x, j);
    Vec b(modes());
    b(0) = 1.0;
    for (int k = 1; k <= K_; ++k) {
        b(2 * k - 1) = std::sqrt(2.0) * std::cos(2 * pi * k * t);
        b(2 * k) = std::sqrt(2.0) * std::sin(2 * pi * k * t);
    }
    Vec v = Vec::Zero(2 * n_);
    for (int m = 0; m < modes(); ++m) v += b(m) * c.segment(m * 2 * n_, 2 * n_);
    CVec out(n_);
    for (int k = 0; k < n_; ++k) out(k) = cplx(v(k), v(n_ + k));
    return out;
}

namespace {

RowMat random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    RowMat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

RowMat orthonormalize(const RowMat& m) {
    Eigen::HouseholderQR<Mat> qr{Mat(m)};
    return RowMat(qr.householderQ() * Mat::Identity(m.rows(), m.cols()));
}

// sqrt of a Gershgorin bound on the row Gram
double sigma_bound(const dense::BlockTridiagonal& g) {
    const int nb = static_cast<int>(g.diag.size());
    double best = 0.0;
    for (int j = 0; j < nb; ++j) {
        Vec rs = g.diag[j].cwiseAbs().rowwise().sum();
        if (j > 0) rs += g.lower[j - 1].cwiseAbs().rowwise().sum();
        if (j + 1 < nb) rs += g.lower[j].cwiseAbs().colwise().sum().transpose();
        best = std::max(best, rs.maxCoeff());
    }
    return std::sqrt(best);
}

// first index i with sigma_i / sigma_{i-1} >= gap, sigma_{-1} = floor; -1 if none
int first_gap(const std::vector<double>& sigma, double floor, double gap) {
    double prev = floor;
    for (size_t i = 0; i < sigma.size(); ++i) {
        const double v = std::max(sigma[i], floor);
        if (v / prev >= gap) return static_cast<int>(i);
        prev = v;
    }
    return -1;
}

}  // namespace

KernelAnalysis analyze_kernel(const DiscretizedOperator& a, const TolPolicy& tol) {
    std::mt19937_64 rng(tol.seed);
    dense::BlockTridiagonal gram = a.row_gram();
    const double smax = sigma_bound(gram);
    const double floor = tol.floor_rel * smax;
    double dmax = 0.0;
    for (const auto& d : gram.diag) dmax = std::max(dmax, d.diagonal().maxCoeff());
    double tau = 1e-12 * dmax;
    std::optional<dense::BlockCholesky> chol;
    for (int attempt = 0; attempt < 4 && !chol; ++attempt) {
        dense::BlockTridiagonal shifted = gram;
        for (auto& d : shifted.diag) d.diagonal().array() += tau;
        try {
            chol.emplace(std::move(shifted));
        } catch (const NumericalError&) {
            tau *= 100.0;
        }
    }
    if (!chol) throw NumericalError("analyze_kernel: row Gram factorization failed");

    // left singular subspace of the smallest singular values
    int p = std::min(6, a.rows());
    KernelAnalysis out;
    int c = -1;
    RowMat y;
    std::vector<double> sigma;
    for (;;) {
        y = orthonormalize(random_matrix(a.rows(), p, rng));
        std::vector<double> prev(p, -1.0);
        for (int it = 0; it < tol.max_iterations; ++it) {
            RowMat z = orthonormalize(chol->solve(y));
            const RowMat b = a.apply_t(z);
            Eigen::JacobiSVD<Mat> svd(Mat(b), Eigen::ComputeThinV);
            // ascending
            const Vec sv = svd.singularValues().reverse();
            const Mat v = svd.matrixV().rowwise().reverse();
            y = RowMat(Mat(z) * v);
            sigma.assign(sv.data(), sv.data() + sv.size());
            // only the value above the gap has to settle; the cluster below is certified by size
            const int at = first_gap(sigma, floor, tol.gap);
            const bool done = it >= 2 && at >= 0 && at < p - 1 &&
                              std::abs(sigma[at] - prev[at]) <= tol.ritz_tol * sigma[at];
            prev = sigma;
            if (done) break;
        }
        c = first_gap(sigma, floor, tol.gap);
        if (c >= 0 && c < p - 1) break;
        if (c < 0 && sigma.back() > floor) {
            std::ostringstream msg;
            msg << "no clear spectral gap among the smallest left singular values (sigma_max " << smax << ")";
            throw NumericalError(msg.str());
        }
        if (p >= a.rows()) throw NumericalError("no clear spectral gap: operator is numerically zero");
        p = std::min(2 * p, a.rows());
    }
    out.left_singular = sigma;
    out.left_gap_ratio = std::max(sigma[c], floor) / (c == 0 ? floor : std::max(sigma[c - 1], floor));
    out.cokernel = Mat(y.leftCols(c));

    const int d = a.cols() - a.rows() + c;
    if (d < 0) throw NumericalError("analyze_kernel: negative kernel dimension");
    KernelFrame& kf = out.kernel;
    kf.sigma_max = smax;
    if (d == 0) {
        kf.basis = Mat(a.cols(), 0);
        kf.gap_ratio = std::max(sigma[c], floor) / floor;
    } else {
        const int m = std::min(d + 2, a.cols());
        RowMat x = random_matrix(a.cols(), m, rng);
        for (int rep = 0; rep < 2; ++rep) x -= a.apply_t(chol->solve(a.apply(x)));
        Eigen::JacobiSVD<Mat> proj(Mat(x), Eigen::ComputeThinU);
        Mat q = proj.matrixU().leftCols(d);
        // refine once more on the orthonormal frame
        RowMat qr = RowMat(q);
        qr -= a.apply_t(chol->solve(a.apply(qr)));
        q = Mat(orthonormalize(qr));
        Eigen::JacobiSVD<Mat> rr(Mat(a.apply(RowMat(q))), Eigen::ComputeThinV);
        const Vec sv = rr.singularValues().reverse();
        kf.singular.assign(sv.data(), sv.data() + sv.size());
        const double top = std::max(kf.singular.back(), floor);
        kf.gap_ratio = std::max(sigma[c], floor) / top;
        if (kf.gap_ratio < tol.gap) {
            std::ostringstream msg;
            msg << "no clear spectral gap: kernel residual " << kf.singular.back() << " vs sigma " << sigma[c];
            throw NumericalError(msg.str());
        }
        kf.basis = canonical_frame(q);
    }
    for (int i = c; i < static_cast<int>(sigma.size()); ++i) kf.singular.push_back(sigma[i]);
    return out;
}

KernelFrame numerical_kernel(const DiscretizedOperator& a, const TolPolicy& tol) {
    return analyze_kernel(a, tol).kernel;
}

int fredholm_index_estimate(const DiscretizedOperator& a, const TolPolicy& tol) {
    return analyze_kernel(a, tol).index();
}

Mat canonical_frame(const Mat& input) {
    const int d = static_cast<int>(input.cols());
    if (d == 0) return input;
    const Mat basis = Mat(orthonormalize(RowMat(input)));
    Eigen::ColPivHouseholderQR<Mat> qr(basis.transpose());
    const auto perm = qr.colsPermutation().indices();
    std::vector<int> pivots(perm.data(), perm.data() + d);
    std::sort(pivots.begin(), pivots.end());
    Mat sub(d, d);
    for (int i = 0; i < d; ++i) sub.row(i) = basis.row(pivots[i]);
    Mat f = basis * sub.inverse();  // equals the identity on the pivot rows
    for (int k = 0; k < d; ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < k; ++i) f.col(k) -= f.col(i).dot(f.col(k)) * f.col(i);
        f.col(k).normalize();
        Eigen::Index at;
        f.col(k).cwiseAbs().maxCoeff(&at);
        if (f(at, k) < 0) f.col(k) *= -1.0;
    }
    return f;
}

double max_principal_angle(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw InputError("max_principal_angle: ambient dimension mismatch");
    if (a.cols() != b.cols()) return pi / 2;
    if (a.cols() == 0) return 0.0;
    const Mat qa = Mat(orthonormalize(RowMat(a)));
    const Mat qb = Mat(orthonormalize(RowMat(b)));
    const Mat r = qb - qa * (qa.transpose() * qb);
    Eigen::JacobiSVD<Mat> svd(r);
    return std::asin(std::min(1.0, svd.singularValues()(0)));
}

}  // namespace cr_orient
