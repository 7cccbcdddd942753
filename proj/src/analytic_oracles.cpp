#include "cr_orient/analytic_oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

namespace cr_orient {
namespace {

const cplx I1(0.0, 1.0);

CMat rotation2(double a) {
    CMat r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

CMat rotation2_d(double a) {
    CMat r(2, 2);
    r << -std::sin(a), -std::cos(a), std::cos(a), -std::sin(a);
    return r;
}

UnitarySample w_sample(double s, double t) {
    const double c = std::cos(2 * pi * t), sn = std::sin(2 * pi * t);
    UnitarySample u;
    if (s <= 0.5) {
        const double f = cutoff_phi(s), fd = cutoff_phi_d1(s);
        const double q = f * f + (1 - f) * (1 - f);
        const double w = 1.0 / std::sqrt(q);
        const double wd = -w * w * w * (2 * f - 1) * fd;
        CMat m(2, 2), ms(2, 2), mt(2, 2);
        m << (1 - f) * c - f * I1, -(1 - f) * sn, (1 - f) * sn, (1 - f) * c + f * I1;
        ms << -c - I1, sn, -sn, -c + I1;
        ms *= fd;
        mt << -sn, -c, c, -sn;
        mt *= 2 * pi * (1 - f);
        u.value = w * m;
        u.ds = wd * m + w * ms;
        u.dt = w * mt;
    } else {
        const double g = cutoff_phi(s - 0.5), gd = cutoff_phi_d1(s - 0.5);
        const cplx e = std::exp(I1 * (pi / 2) * g);
        u.value = CMat::Zero(2, 2);
        u.value(0, 0) = -I1 * e;
        u.value(1, 1) = I1 * std::conj(e);
        u.ds = CMat::Zero(2, 2);
        u.ds(0, 0) = (pi / 2) * gd * e;
        u.ds(1, 1) = (pi / 2) * gd * std::conj(e);
        u.dt = CMat::Zero(2, 2);
    }
    return u;
}

}  // namespace

double cutoff_phi(double s) {
    const double x = std::clamp(2 * s, 0.0, 1.0);
    return x * x * x * (10 + x * (-15 + 6 * x));
}

double cutoff_phi_d1(double s) {
    if (s <= 0 || s >= 0.5) return 0.0;
    const double x = 2 * s;
    return 2 * 30 * x * x * (1 - x) * (1 - x);
}

double cutoff_phi_d2(double s) {
    if (s <= 0 || s >= 0.5) return 0.0;
    const double x = 2 * s;
    return 4 * 60 * x * (1 - x) * (1 - 2 * x);
}

UnitaryField::UnitaryField(int n, double support_end, Fn f, std::string name)
    : n_(n), support_end_(support_end), f_(std::move(f)), name_(std::move(name)) {
    if (n < 1) throw InputError("UnitaryField: n must be positive");
}

UnitarySample UnitaryField::operator()(double s, double t) const {
    if (s >= support_end_) {
        return {CMat::Identity(n_, n_), CMat::Zero(n_, n_), CMat::Zero(n_, n_)};
    }
    return f_(s, t - std::floor(t));
}

UnitaryField identity_field(int n) {
    return UnitaryField(n, 0.0, [n](double, double) {
        return UnitarySample{CMat::Identity(n, n), CMat::Zero(n, n), CMat::Zero(n, n)};
    }, "I");
}

UnitaryField w_field() { return UnitaryField(2, 1.0, w_sample, "W"); }

UnitaryField shifted(const UnitaryField& u, double a) {
    return UnitaryField(u.n(), std::max(0.0, u.support_end() - a),
                        [u, a](double s, double t) { return u(s + a, t); }, u.name() + "_shift");
}

UnitaryField pointwise_product(const UnitaryField& a, const UnitaryField& b) {
    if (a.n() != b.n()) throw InputError("pointwise_product: dimension mismatch");
    return UnitaryField(a.n(), std::max(a.support_end(), b.support_end()),
                        [a, b](double s, double t) {
                            const auto x = a(s, t), y = b(s, t);
                            return UnitarySample{x.value * y.value, x.ds * y.value + x.value * y.ds,
                                                 x.dt * y.value + x.value * y.dt};
                        },
                        a.name() + "*" + b.name());
}

UnitaryField block_sum(const UnitaryField& a, const UnitaryField& b) {
    const int n = a.n() + b.n();
    return UnitaryField(n, std::max(a.support_end(), b.support_end()),
                        [a, b, n](double s, double t) {
                            const auto x = a(s, t), y = b(s, t);
                            auto blk = [&](const CMat& p, const CMat& q) {
                                CMat m = CMat::Zero(n, n);
                                m.topLeftCorner(p.rows(), p.cols()) = p;
                                m.bottomRightCorner(q.rows(), q.cols()) = q;
                                return m;
                            };
                            return UnitarySample{blk(x.value, y.value), blk(x.ds, y.ds), blk(x.dt, y.dt)};
                        },
                        a.name() + "+" + b.name());
}

UnitaryField wobble_field() {
    return UnitaryField(2, 1.0, [](double s, double t) {
        const double psi = cutoff_phi(s / 2), psid = 0.5 * cutoff_phi_d1(s / 2);
        const double sn = std::sin(2 * pi * t), c = std::cos(2 * pi * t);
        const double th = 0.6 * (1 - psi) * sn;
        const double ths = -0.6 * psid * sn;
        const double tht = 0.6 * (1 - psi) * 2 * pi * c;
        CMat d = CMat::Identity(2, 2), dd = CMat::Zero(2, 2);
        d(0, 0) = std::exp(2 * pi * I1 * psi);
        dd(0, 0) = 2 * pi * I1 * psid * d(0, 0);
        const CMat r = rotation2(th), rd = rotation2_d(th);
        return UnitarySample{r * d, ths * rd * d + r * dd, tht * rd * d};
    }, "V");
}

CMat build_W(double s, double t) {
    if (s >= 1.0) return CMat::Identity(2, 2);
    return w_sample(s, t - std::floor(t)).value;
}

CMat conjugated_coefficient(const UnitarySample& u, const CMat& s) {
    const CMat inv = u.value.adjoint();
    return u.ds * inv - I1 * (u.dt * inv) + u.value * s * inv;
}

CMat t_r_coefficient(double r, double s, double t) {
    if (r + s >= 1.0) return -pi * CMat::Identity(2, 2);
    const UnitarySample u = w_sample(r + s, t - std::floor(t));
    return conjugated_coefficient(u, -pi * CMat::Identity(2, 2));
}

KernelValue KernelFunction::operator()(double s, double t) const {
    const UnitarySample w = (r_ + s >= 1.0)
        ? UnitarySample{CMat::Identity(2, 2), CMat::Zero(2, 2), CMat::Zero(2, 2)}
        : w_sample(r_ + s, t - std::floor(t));
    const double e1 = std::exp(-pi * s), e3 = std::exp(-3 * pi * s);
    const cplx ph = std::exp(2 * pi * I1 * t);
    const CVec inner = a0_ * e1 + a1_ * (ph * e3);
    const CVec inner_s = a0_ * (-pi * e1) + a1_ * (-3 * pi * ph * e3);
    const CVec inner_t = a1_ * (2 * pi * I1 * ph * e3);
    return KernelValue{w.value * inner, w.ds * inner + w.value * inner_s,
                       w.dt * inner + w.value * inner_t};
}

KernelPair kernel_pair_lemma42(double r) {
    if (!(r >= 0.0 && r <= 0.5)) throw InputError("kernel_pair_lemma42: r must lie in [0, 1/2]");
    const double f = cutoff_phi(r);
    const double a = f * f, b = (1 - f) * (1 - f), c = f * (1 - f);
    CVec u0(2), v0(2), u1(2), v1(2);
    u0 << a + b * I1, -a + b * I1;
    v0 << a - b * I1, a + b * I1;
    u1 << c * cplx(-1, -1), c * cplx(1, -1);
    v1 << c * cplx(1, -1), c * cplx(1, 1);
    return KernelPair{r, KernelFunction(r, u0, u1), KernelFunction(r, v0, v1)};
}

KernelPair kernel_pair_lemma43(double r) {
    if (!(r >= 0.5 && r <= 1.0)) throw InputError("kernel_pair_lemma43: r must lie in [1/2, 1]");
    const double g = cutoff_phi(r - 0.5);
    const cplx e = std::exp(-I1 * (pi / 2) * g);
    CVec u0(2), v0(2), z = CVec::Zero(2);
    u0 << e, -std::conj(e);
    v0 << e, std::conj(e);
    return KernelPair{r, KernelFunction(r, u0, z), KernelFunction(r, v0, z)};
}

KernelPair kernel_pair(double r) { return r <= 0.5 ? kernel_pair_lemma42(r) : kernel_pair_lemma43(r); }

CVec kernel_residual(const KernelFunction& f, double s, double t) {
    const KernelValue k = f(s, t);
    return k.ds - I1 * k.dt - t_r_coefficient(f.r(), s, t) * k.value;
}

ThetaFunction smoothstep_theta() { return ThetaFunction{[](double x) { return cutoff_phi(x); }, 1.0}; }

ThetaFunction constant_theta(double m) { return ThetaFunction{[m](double) { return m; }, m}; }

ContrResult contr_integral(const ThetaFunction& theta, double r) {
    if (!(r > 0)) throw InputError("contr_integral: r must be positive");
    const double t0 = theta.f(0.0);
    if (std::abs(t0 - std::round(t0)) > 1e-12 ||
        std::abs(theta.at_infinity - std::round(theta.at_infinity)) > 1e-12)
        throw InputError("contr_integral: theta must take integer values at 0 and infinity");
    auto integrand = [&](double x) {
        const double a = 2 * pi * theta.f(x / r);
        return 2 * pi * std::exp(-2 * pi * x) * (std::cos(a) - std::sin(a));
    };
    // e^{-2 pi x} is below 1e-40 past x = 15; split where theta has plateaus
    constexpr double cut = 15.0;
    std::vector<double> knots{0.0};
    for (double k : {0.25 * r, 0.5 * r})
        if (k < cut) knots.push_back(k);
    knots.push_back(cut);
    ContrResult res;
    using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (size_t i = 0; i + 1 < knots.size(); ++i) {
        double err = 0.0;
        res.value += gk::integrate(integrand, knots[i], knots[i + 1], 20, 1e-14, &err);
        res.error_estimate += err;
    }
    return res;
}

}  // namespace cr_orient
