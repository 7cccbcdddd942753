#pragma once

// Closed-form objects: the cutoff, the unitary gauge W and its shifts, the
// coefficient fields T_r, the explicit kernel pairs and the decay integral.

#include "cr_orient/common.hpp"

#include <functional>
#include <string>

namespace cr_orient {

// C^2 smoothstep: 0 for s <= 0, 1 for s >= 1/2.
double cutoff_phi(double s);
double cutoff_phi_d1(double s);
double cutoff_phi_d2(double s);

struct UnitarySample {
    CMat value;
    CMat ds;
    CMat dt;
};

// Closed-form map [0, inf] x T -> U(n) with analytic first derivatives.
// U(s, t) = I for s >= support_end.
class UnitaryField {
public:
    using Fn = std::function<UnitarySample(double, double)>;
    UnitaryField(int n, double support_end, Fn f, std::string name);

    int n() const { return n_; }
    double support_end() const { return support_end_; }
    const std::string& name() const { return name_; }
    CMat at_infinity() const { return CMat::Identity(n_, n_); }
    UnitarySample operator()(double s, double t) const;

private:
    int n_;
    double support_end_;
    Fn f_;
    std::string name_;
};

UnitaryField identity_field(int n);
UnitaryField w_field();
// (s, t) -> U(s + a, t)
UnitaryField shifted(const UnitaryField& u, double a);
UnitaryField pointwise_product(const UnitaryField& a, const UnitaryField& b);
UnitaryField block_sum(const UnitaryField& a, const UnitaryField& b);
// Contractible-boundary factor on C^2: V(0, .) is a small real rotation wobble.
UnitaryField wobble_field();

CMat build_W(double s, double t);

// (d_s U) U^{-1} - i (d_t U) U^{-1} + U S U^{-1}, complex n x n.
CMat conjugated_coefficient(const UnitarySample& u, const CMat& s);

// T_r(s, t) as a complex 2 x 2 matrix.
CMat t_r_coefficient(double r, double s, double t);

struct KernelValue {
    CVec value;
    CVec ds;
    CVec dt;
};

// One closed-form kernel element W_r (a0 e^{-pi s} + a1 e^{2 pi i t} e^{-3 pi s}).
class KernelFunction {
public:
    KernelFunction(double r, CVec a0, CVec a1) : r_(r), a0_(std::move(a0)), a1_(std::move(a1)) {}
    KernelValue operator()(double s, double t) const;
    const CVec& a0() const { return a0_; }
    const CVec& a1() const { return a1_; }
    double r() const { return r_; }

private:
    double r_;
    CVec a0_, a1_;
};

struct KernelPair {
    double r = 0.0;
    KernelFunction u;
    KernelFunction v;
};

KernelPair kernel_pair_lemma42(double r);
KernelPair kernel_pair_lemma43(double r);
// dispatches on r <= 1/2
KernelPair kernel_pair(double r);

// Residual d_s u - i d_t u - T_r u at (s, t).
CVec kernel_residual(const KernelFunction& f, double s, double t);

struct ThetaFunction {
    std::function<double(double)> f;
    double at_infinity = 0.0;
};

ThetaFunction smoothstep_theta();
ThetaFunction constant_theta(double m);

struct ContrResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// 2 pi int_0^inf e^{-2 pi x} (cos 2 pi theta(x/r) - sin 2 pi theta(x/r)) dx
ContrResult contr_integral(const ThetaFunction& theta, double r);

}  // namespace cr_orient
