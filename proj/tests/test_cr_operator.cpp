#include "doctest.h"

#include "cr_orient/cr_operator.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace cr_orient;

namespace {

const Discretization base{16, 8.0, 200};
const Discretization small{4, 4.0, 32};

OperatorField scalar_field(double c, int n) {
    return OperatorField::constant(c * pi * Mat::Identity(2 * n, 2 * n), Domain::half);
}

int cz_of(const SymmetricLoop& loop) {
    return conley_zehnder_index(integrate_symplectic_path(loop, 2048)).value;
}

Mat as_column(const Vec& v) {
    Mat m(v.size(), 1);
    m.col(0) = v;
    return m;
}

// relative L2 distance after sign alignment and normalization
double aligned_error(const Vec& a, const Vec& b) {
    Vec x = a / a.norm(), y = b / b.norm();
    if (x.dot(y) < 0) y = -y;
    return (x - y).norm();
}

Mat oracle_span(const DiscretizedOperator& op, const KernelPair& kp) {
    Mat m(op.cols(), 2);
    m.col(0) = op.discretize([&](double s, double t) { return kp.u(s, t).value; });
    m.col(1) = op.discretize([&](double s, double t) { return kp.v(s, t).value; });
    return m;
}

}  // namespace

TEST_CASE("discretization rules") {
    CHECK_NOTHROW(base.validate());
    CHECK_THROWS_AS((Discretization{3, 8.0, 200}.validate()), InputError);
    CHECK_THROWS_AS((Discretization{16, 8.0, 100}.validate()), InputError);
    CHECK_THROWS_AS((Discretization{16, 3.0, 200}.validate()), InputError);
}

TEST_CASE("degenerate or unsettled asymptotics are rejected") {
    CHECK_THROWS_AS(assemble(scalar_field(-2.0, 1), small), InputError);
    CHECK_THROWS_AS(assemble(scalar_field(0.0, 1), small), InputError);
    // coefficient still moving at s = L
    auto drifting = OperatorField::half(
        1, [](double s, double) { return Mat(-pi * (1.0 + 0.1 * std::exp(-s)) * Mat::Identity(2, 2)); },
        SymmetricLoop::constant(-pi * Mat::Identity(2, 2)), 1e9);
    CHECK_THROWS_AS(assemble(drifting, small), InputError);
}

TEST_CASE("block storage agrees with the dense matrix") {
    auto op = assemble(build_T_r(0.3), small);
    const RowMat a = op.to_dense();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    RowMat x(op.cols(), 3), y(op.rows(), 2);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    for (int i = 0; i < y.size(); ++i) y.data()[i] = g(rng);
    CHECK((op.apply(x) - a * x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((op.apply_t(y) - a.transpose() * y).cwiseAbs().maxCoeff() < 1e-9);

    const auto gram = op.row_gram();
    const RowMat full = a * a.transpose();
    int off = 0;
    for (int j = 0; j < static_cast<int>(gram.diag.size()); ++j) {
        const int r = static_cast<int>(gram.diag[j].rows());
        CHECK((gram.diag[j] - full.block(off, off, r, r)).cwiseAbs().maxCoeff() < 1e-8);
        if (j + 1 < static_cast<int>(gram.diag.size())) {
            const int r2 = static_cast<int>(gram.diag[j + 1].rows());
            CHECK((gram.lower[j] - full.block(off + r, off, r2, r)).cwiseAbs().maxCoeff() < 1e-8);
        }
        off += r;
    }
}

TEST_CASE("column back-map") {
    auto op = assemble(scalar_field(-1.0, 2), small);
    const ColumnInfo first = op.column_info(0);
    CHECK(first.node == 0);
    CHECK(first.component == 2);  // q components are eliminated at s = 0
    CHECK(first.frequency == 0);
    const int m = op.modes();
    const ColumnInfo c = op.column_info(2 * m + 4 * 3 + 1);  // node 1, slot 3, component 1
    CHECK(c.node == 1);
    CHECK(c.frequency == 2);
    CHECK_FALSE(c.sine);
    CHECK(c.component == 1);
    CHECK(op.column_info(op.cols() - 1).node == op.node_count() - 1);
}

TEST_CASE("scalar examples: kernel, cokernel and index = -CZ") {
    struct Case {
        double c;
        int n, ker, coker;
    };
    for (const Case k : {Case{-1, 1, 1, 0}, Case{-3, 1, 3, 0}, Case{-1, 2, 2, 0}, Case{1, 1, 0, 1}}) {
        CAPTURE(k.c);
        CAPTURE(k.n);
        auto op = assemble(scalar_field(k.c, k.n), base);
        const auto an = analyze_kernel(op);
        CHECK(an.kernel.dim() == k.ker);
        CHECK(an.cokernel.cols() == k.coker);
        CHECK(an.kernel.gap_ratio >= 1e3);
        CHECK(an.index() == op.structural_index());
        CHECK(an.index() == -cz_of(SymmetricLoop::constant(k.c * pi * Mat::Identity(2 * k.n, 2 * k.n))));
    }
}

TEST_CASE("oracle e^{-pi s} i: accuracy and fourth-order refinement") {
    auto run = [](int ns) {
        auto op = assemble(scalar_field(-1.0, 1), Discretization{16, 8.0, ns});
        const KernelFrame kf = numerical_kernel(op);
        REQUIRE(kf.dim() == 1);
        const Vec exact = op.discretize([](double s, double) {
            CVec v(1);
            v(0) = cplx(0.0, std::exp(-pi * s));
            return v;
        });
        const Vec x = kf.basis.col(0);
        // Re u(0, t) vanishes identically
        double re0 = 0.0;
        for (int q = 0; q < 16; ++q) re0 = std::max(re0, std::abs(op.evaluate(x, 0, q / 16.0)(0).real()));
        CHECK(re0 <= 1e-10);
        CHECK(std::abs(x.norm() - 1.0) < 1e-12);
        return aligned_error(x, exact);
    };
    const auto t0 = std::chrono::steady_clock::now();
    const double e1 = run(200);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double e2 = run(400);
    MESSAGE("rel L2 error " << e1 << " -> " << e2 << ", solve " << secs << " s");
    CHECK(e1 <= 1e-3);
    CHECK(e2 <= e1 / 4.0);
}

TEST_CASE("index theorem on random t-dependent asymptotic loops") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    int checked = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const double c = (trial % 3 == 0) ? -1.0 : (trial % 3 == 1 ? -3.0 : 1.0);
        const double a = u(rng), b = u(rng), d = u(rng);
        auto loop = SymmetricLoop::closed_form(1, [=](double t) {
            Mat s(2, 2);
            const double x = a * std::cos(2 * pi * t) + d, y = b * std::sin(2 * pi * t);
            s << c * pi + x, y, y, c * pi - x;
            return s;
        });
        const SymplecticPath g = integrate_symplectic_path(loop, 2048);
        if (!is_nondegenerate(g)) continue;
        auto field = OperatorField::half(1, [loop](double, double t) { return loop(t); }, loop, 0.0, "loop");
        auto op = assemble(field, Discretization{8, 6.0, 64});
        CAPTURE(trial);
        CHECK(fredholm_index_estimate(op) == -conley_zehnder_index(g).value);
        ++checked;
    }
    CHECK(checked >= 4);
}

TEST_CASE("full cylinder index is mu(S-) - mu(S+)") {
    const auto m1 = SymmetricLoop::constant(-pi * Mat::Identity(2, 2));
    const auto m3 = SymmetricLoop::constant(-3 * pi * Mat::Identity(2, 2));
    const auto p1 = SymmetricLoop::constant(pi * Mat::Identity(2, 2));
    const Discretization d{8, 6.0, 64};
    CHECK(fredholm_index_estimate(assemble(interpolating_field(m1, m3), d)) == cz_of(m1) - cz_of(m3));
    CHECK(fredholm_index_estimate(assemble(interpolating_field(m3, m1), d)) == cz_of(m3) - cz_of(m1));
    CHECK(fredholm_index_estimate(assemble(interpolating_field(p1, m1), d)) == cz_of(p1) - cz_of(m1));
    CHECK(fredholm_index_estimate(assemble(interpolating_field(m1, m1), d)) == 0);
}

TEST_CASE("T_r kernel matches the explicit pair") {
    for (double r : {0.0, 0.5, 1.0}) {
        CAPTURE(r);
        auto op = assemble(build_T_r(r), base);
        const KernelFrame kf = numerical_kernel(op);
        REQUIRE(kf.dim() == 2);
        CHECK(max_principal_angle(kf.basis, oracle_span(op, kernel_pair(r))) <= 1e-2);
    }
}

TEST_CASE("kernel dimension is stable under resolution changes") {
    for (double r : {0.2, 0.7}) {
        const int coarse = numerical_kernel(assemble(build_T_r(r), Discretization{8, 4.0, 64})).dim();
        const int fine = numerical_kernel(assemble(build_T_r(r), base)).dim();
        CHECK(coarse == 2);
        CHECK(fine == coarse);
    }
}

TEST_CASE("canonical frame depends only on the span") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Mat v(30, 3);
    for (int i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
    Mat q = Eigen::HouseholderQR<Mat>(v).householderQ() * Mat::Identity(30, 3);
    Mat rot(3, 3);
    for (int i = 0; i < 9; ++i) rot.data()[i] = g(rng);
    const Mat f1 = canonical_frame(q);
    const Mat f2 = canonical_frame(q * rot);
    CHECK((f1 - f2).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f1.transpose() * f1 - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_principal_angle(q, q * rot) < 1e-10);
    CHECK(max_principal_angle(q.leftCols(2), q.rightCols(2)) == doctest::Approx(pi / 2));
}

TEST_CASE("principal angle resolves small rotations") {
    Mat a = Mat::Zero(4, 1), b = Mat::Zero(4, 1);
    a(0, 0) = 1;
    const double th = 1e-9;
    b(0, 0) = std::cos(th);
    b(1, 0) = std::sin(th);
    CHECK(max_principal_angle(a, b) == doctest::Approx(th).epsilon(1e-6));
    CHECK(max_principal_angle(as_column(Vec::Unit(4, 0)), as_column(Vec::Unit(4, 2))) == doctest::Approx(pi / 2));
}
