#include "doctest.h"

#include "cr_orient/analytic_oracles.hpp"

#include <cmath>
#include <random>

using namespace cr_orient;

namespace {

const cplx I1(0, 1);

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// fourth-order central difference of W in s or t
CMat fd_w(double s, double t, bool in_s) {
    const double h = 1e-3;
    auto f = [&](double d) { return in_s ? build_W(s + d, t) : build_W(s, t + d); };
    return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12 * h);
}

// Largest principal angle between the column spans of two real matrices.
double max_principal_angle(const Mat& a, const Mat& b) {
    Eigen::HouseholderQR<Mat> qa(a), qb(b);
    Mat ua = qa.householderQ() * Mat::Identity(a.rows(), a.cols());
    Mat ub = qb.householderQ() * Mat::Identity(b.rows(), b.cols());
    const Mat resid = ub - ua * (ua.transpose() * ub);
    const double sn = Eigen::JacobiSVD<Mat>(resid).singularValues()(0);
    return std::asin(std::min(1.0, sn));
}

}  // namespace

TEST_CASE("cutoff plateaus, monotonicity and derivatives") {
    for (double s : {-3.0, -0.1, 0.0}) CHECK(cutoff_phi(s) == 0.0);
    for (double s : {0.5, 0.7, 9.0}) CHECK(cutoff_phi(s) == 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = -0.1 + 0.7 * i / 1000.0;
        CHECK(cutoff_phi(s) >= prev);
        prev = cutoff_phi(s);
        const double h = 1e-6;
        CHECK(std::abs((cutoff_phi(s + h) - cutoff_phi(s - h)) / (2 * h) - cutoff_phi_d1(s)) < 1e-6);
        CHECK(std::abs((cutoff_phi_d1(s + h) - cutoff_phi_d1(s - h)) / (2 * h) - cutoff_phi_d2(s)) <
              1e-4);
    }
}

TEST_CASE("W special values") {
    for (double t : {0.0, 0.13, 0.5, 0.77}) {
        CMat r(2, 2);
        r << std::cos(2 * pi * t), -std::sin(2 * pi * t), std::sin(2 * pi * t), std::cos(2 * pi * t);
        CHECK(max_abs(build_W(0.0, t) - r) < 1e-15);
        CHECK(max_abs(build_W(1.0, t) - CMat::Identity(2, 2)) == 0.0);
        CHECK(max_abs(build_W(3.5, t) - CMat::Identity(2, 2)) == 0.0);
        CMat h = CMat::Zero(2, 2);
        h(0, 0) = -I1;
        h(1, 1) = I1;
        CHECK(max_abs(build_W(0.5, t) - h) < 1e-15);
    }
}

TEST_CASE("W unitarity, branch continuity and endpoint") {
    const auto w = w_field();
    for (int i = 0; i <= 200; ++i)
        for (int j = 0; j < 16; ++j) {
            const double s = 1.2 * i / 200.0, t = j / 16.0;
            const CMat m = build_W(s, t);
            CHECK(max_abs(m.adjoint() * m - CMat::Identity(2, 2)) <= 1e-12);
        }
    for (int j = 0; j < 16; ++j) {
        const double t = j / 16.0;
        CHECK(max_abs(build_W(0.5 - 1e-13, t) - build_W(0.5 + 1e-13, t)) < 1e-12);
        // arctan chart: s = tan(x), x -> pi/2
        CHECK(max_abs(w(std::tan(pi / 2 - 1e-9), t).value - w.at_infinity()) == 0.0);
    }
}

TEST_CASE("closed-form W derivatives agree with finite differences") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> us(0.01, 1.2), ut(0.0, 1.0);
    const auto w = w_field();
    for (int k = 0; k < 200; ++k) {
        double s = us(rng);
        if (std::abs(s - 0.5) < 0.01 || std::abs(s - 1.0) < 0.01) continue;
        const double t = ut(rng);
        const auto u = w(s, t);
        CHECK(max_abs(u.ds - fd_w(s, t, true)) < 1e-7);
        CHECK(max_abs(u.dt - fd_w(s, t, false)) < 1e-7);
    }
}

TEST_CASE("T_r asymptotics") {
    for (double t : {0.0, 0.3, 0.9}) {
        for (double s : {0.0, 0.4, 2.0})
            CHECK(max_abs(t_r_coefficient(1.0, s, t) + pi * CMat::Identity(2, 2)) < 1e-15);
        for (double r : {0.0, 0.3, 0.6}) {
            CHECK(max_abs(t_r_coefficient(r, 1.0 - r, t) + pi * CMat::Identity(2, 2)) < 1e-15);
            CHECK(max_abs(t_r_coefficient(r, 1.5 - r, t) + pi * CMat::Identity(2, 2)) < 1e-15);
        }
    }
}

TEST_CASE("D_T0 equals W D_{-pi I} W^{-1} on smooth test functions") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> us(0.0, 1.5), ut(0.0, 1.0);
    const auto w = w_field();
    for (int trial = 0; trial < 20; ++trial) {
        // f = sum_k c_k e^{2 pi i k t} e^{-a_k s} with Re f(0, t) = 0 arranged by pairing
        CVec c[3];
        double a[3];
        for (int k = 0; k < 3; ++k) {
            c[k] = CVec(2);
            c[k] << cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
            a[k] = 1.0 + std::abs(g(rng));
        }
        auto f = [&](double s, double t, CVec& v, CVec& vs, CVec& vt) {
            v = CVec::Zero(2);
            vs = CVec::Zero(2);
            vt = CVec::Zero(2);
            for (int k = 0; k < 3; ++k) {
                const cplx e = std::exp(2 * pi * I1 * double(k) * t) * std::exp(-a[k] * s);
                v += c[k] * e;
                vs += -a[k] * c[k] * e;
                vt += 2 * pi * I1 * double(k) * c[k] * e;
            }
        };
        for (int p = 0; p < 25; ++p) {
            const double s = us(rng), t = ut(rng);
            CVec v, vs, vt;
            f(s, t, v, vs, vt);
            const auto u = w(s, t);
            const CVec wf = u.value * v;
            const CVec wfs = u.ds * v + u.value * vs;
            const CVec wft = u.dt * v + u.value * vt;
            const CVec lhs = wfs - I1 * wft - t_r_coefficient(0.0, s, t) * wf;
            const CVec rhs = u.value * (vs - I1 * vt + pi * v);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("kernel pair coefficients at the special parameters") {
    auto k0 = kernel_pair_lemma42(0.0);
    CVec e(2);
    e << I1, I1;
    CHECK((k0.u.a0() - e).norm() == 0.0);
    e << -I1, I1;
    CHECK((k0.v.a0() - e).norm() == 0.0);
    CHECK(k0.u.a1().norm() == 0.0);
    CHECK(k0.v.a1().norm() == 0.0);

    auto kh = kernel_pair_lemma42(0.5);
    auto kh3 = kernel_pair_lemma43(0.5);
    e << 1, -1;
    CHECK((kh.u.a0() - e).norm() == 0.0);
    CHECK((kh3.u.a0() - e).norm() == 0.0);
    e << 1, 1;
    CHECK((kh.v.a0() - e).norm() == 0.0);
    CHECK((kh3.v.a0() - e).norm() == 0.0);
    CHECK(kh.u.a1().norm() == 0.0);

    auto k1 = kernel_pair_lemma43(1.0);
    e << -I1, -I1;
    CHECK((k1.u.a0() - e).norm() < 1e-15);
    e << -I1, I1;
    CHECK((k1.v.a0() - e).norm() < 1e-15);

    CHECK_THROWS_AS(kernel_pair_lemma42(0.6), InputError);
    CHECK_THROWS_AS(kernel_pair_lemma43(0.4), InputError);
}

TEST_CASE("kernel pairs solve the PDE and the boundary condition on a 21-point grid") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> us(0.0, 3.0), ut(0.0, 1.0);
    double worst = 0.0, worst_bc = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double r = i / 20.0;
        const auto kp = kernel_pair(r);
        for (const auto* f : {&kp.u, &kp.v}) {
            for (int p = 0; p < 1000; ++p)
                worst = std::max(worst, kernel_residual(*f, us(rng), ut(rng)).cwiseAbs().maxCoeff());
            for (int j = 0; j < 64; ++j)
                worst_bc = std::max(worst_bc, (*f)(0.0, j / 64.0).value.real().cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst <= 1e-10);
    CHECK(worst_bc <= 1e-10);
}

TEST_CASE("endpoint relation W u1 = -u0 and W v1 = v0") {
    const auto k0 = kernel_pair(0.0), k1 = kernel_pair(1.0);
    double worst = 0.0;
    for (int i = 0; i <= 50; ++i)
        for (int j = 0; j < 20; ++j) {
            const double s = 3.0 * i / 50.0, t = j / 20.0;
            const CMat w = build_W(s, t);
            worst = std::max(worst, (w * k1.u(s, t).value + k0.u(s, t).value).cwiseAbs().maxCoeff());
            worst = std::max(worst, (w * k1.v(s, t).value - k0.v(s, t).value).cwiseAbs().maxCoeff());
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("truncated boundary system reproduces the closed-form kernel span") {
    // w = sum_{k=0..8} c_k e^{2 pi i k t} e^{-(2k+1) pi s} solves the conjugated
    // equation; the kernel is W_r w subject to Re(W(r, t) w(0, t)) = 0.
    const int modes = 9, nt = 96;
    for (double r : {0.0, 0.1, 0.2, 0.25, 0.35, 0.5}) {
        Mat sys(2 * nt, 4 * modes);
        for (int j = 0; j < nt; ++j) {
            const double t = j / double(nt);
            const CMat w = build_W(r, t);
            for (int k = 0; k < modes; ++k) {
                const cplx e = std::exp(2 * pi * I1 * double(k) * t);
                for (int comp = 0; comp < 2; ++comp) {
                    // real and imaginary part of c_k[comp]
                    const CVec colr = w.col(comp) * e;
                    const CVec coli = w.col(comp) * (I1 * e);
                    for (int row = 0; row < 2; ++row) {
                        sys(2 * j + row, 4 * k + 2 * comp) = colr(row).real();
                        sys(2 * j + row, 4 * k + 2 * comp + 1) = coli(row).real();
                    }
                }
            }
        }
        Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeFullV);
        const auto sv = svd.singularValues();
        CHECK(sv(sv.size() - 3) > 1e-3);
        CHECK(sv(sv.size() - 2) < 1e-10);
        const Mat null = svd.matrixV().rightCols(2);
        const auto kp = kernel_pair_lemma42(r);
        Mat ref = Mat::Zero(4 * modes, 2);
        int col = 0;
        for (const auto* f : {&kp.u, &kp.v}) {
            for (int comp = 0; comp < 2; ++comp) {
                ref(2 * comp, col) = f->a0()(comp).real();
                ref(2 * comp + 1, col) = f->a0()(comp).imag();
                ref(4 + 2 * comp, col) = f->a1()(comp).real();
                ref(4 + 2 * comp + 1, col) = f->a1()(comp).imag();
            }
            ++col;
        }
        CHECK(max_principal_angle(null, ref) < 1e-8);
    }
}

TEST_CASE("decay integral") {
    CHECK(std::abs(contr_integral(constant_theta(0.0), 5.0).value - 1.0) <= 1e-8);
    for (double m : {-2.0, 1.0, 3.0})
        CHECK(std::abs(contr_integral(constant_theta(m), 17.0).value - 1.0) <= 1e-8);
    const auto th = smoothstep_theta();
    const double v100 = contr_integral(th, 100.0).value;
    CHECK(v100 > 0.0);
    CHECK(std::abs(v100 - 1.0) <= 0.05);
    double c_fit = 0.0, prev = 1e9;
    for (double r : {10.0, 100.0, 1000.0}) {
        const double d = std::abs(contr_integral(th, r).value - 1.0);
        CHECK(d < prev);
        prev = d;
        c_fit = std::max(c_fit, d * r);
    }
    MESSAGE("fitted tail constant C = " << c_fit);
    CHECK(c_fit < 10.0);
    CHECK_THROWS_AS(contr_integral(ThetaFunction{[](double) { return 0.5; }, 1.0}, 10.0), InputError);
    CHECK_THROWS_AS(contr_integral(ThetaFunction{[](double) { return 0.0; }, 0.3}, 10.0), InputError);
}
