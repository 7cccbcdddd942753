#include "doctest.h"

#include "cr_orient/orientation.hpp"

#include <cmath>
#include <string>

using namespace cr_orient;

namespace {

const Discretization coarse{8, 4.0, 64};

OperatorField minus_pi(int n) { return OperatorField::constant(-pi * Mat::Identity(2 * n, 2 * n), Domain::half); }

Mat oracle_frame(const DiscretizedOperator& op, double r) {
    const KernelPair kp = kernel_pair(r);
    Mat m(op.cols(), 2);
    m.col(0) = op.discretize([&](double s, double t) { return kp.u(s, t).value; });
    m.col(1) = op.discretize([&](double s, double t) { return kp.v(s, t).value; });
    return m;
}

OperatorPath t_r_path(bool backwards = false) {
    return OperatorPath{[backwards](double tau) { return build_T_r(backwards ? 1.0 - tau : tau); }, "T_r"};
}

int conj(const UnitaryField& u, int n) {
    return conjugation_sign(u, minus_pi(n), coarse, TransportOptions{16, 4}).sign;
}

}  // namespace

TEST_CASE("constant path keeps its orientation on any grid") {
    const OperatorPath p{[](double) { return minus_pi(2); }, "const"};
    for (int grid : {1, 3, 8}) {
        const TransportResult r = transport_orientation(p, coarse, TransportOptions{grid, 0});
        CHECK(r.sign == 1);
        CHECK(r.dim == 2);
        CHECK(r.min_abs_det == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(static_cast<int>(r.step_dets.size()) == grid);
    }
}

TEST_CASE("T_r transport carries (u0, v0) to a positive multiple of (u1, v1)") {
    const TransportResult r = transport_orientation(t_r_path(), coarse, TransportOptions{16, 0});
    const auto op0 = assemble(build_T_r(0.0), coarse);
    const auto op1 = assemble(build_T_r(1.0), coarse);
    const Mat o0 = oracle_frame(op0, 0.0), o1 = oracle_frame(op1, 1.0);
    const double d0 = (r.start_frame.transpose() * o0).determinant();
    const double d1 = (r.end_frame.transpose() * o1).determinant();
    CHECK(std::abs(d0) > 1e-3);
    CHECK(std::abs(d1) > 1e-3);
    CHECK((d0 > 0 ? 1 : -1) * r.sign * (d1 > 0 ? 1 : -1) == 1);
}

TEST_CASE("transported frames agree with the analytic kernels") {
    const TransportResult r = transport_orientation(t_r_path(), coarse, TransportOptions{2, 3});
    REQUIRE(r.taus.size() >= 3);
    const auto op0 = assemble(build_T_r(0.0), coarse);
    const auto op1 = assemble(build_T_r(1.0), coarse);
    CHECK(max_principal_angle(r.start_frame, oracle_frame(op0, 0.0)) <= 1e-2);
    CHECK(max_principal_angle(r.end_frame, oracle_frame(op1, 1.0)) <= 1e-2);
    const auto half = assemble(build_T_r(0.5), coarse);
    CHECK(max_principal_angle(numerical_kernel(half).basis, oracle_frame(half, 0.5)) <= 1e-2);
}

TEST_CASE("reversed path gives the same sign; refinement keeps it") {
    const int fwd = transport_orientation(t_r_path(), coarse, TransportOptions{16, 0}).sign;
    const int bwd = transport_orientation(t_r_path(true), coarse, TransportOptions{16, 0}).sign;
    const int fine = transport_orientation(t_r_path(), coarse, TransportOptions{32, 0}).sign;
    CHECK(fwd == bwd);
    CHECK(fwd == fine);
}

TEST_CASE("coarse grids are refused unless bisection is allowed") {
    CHECK_THROWS_WITH_AS(transport_orientation(t_r_path(), coarse, TransportOptions{1, 0}),
                         doctest::Contains("refine parameter grid"), NumericalError);
    const TransportResult r = transport_orientation(t_r_path(), coarse, TransportOptions{1, 6});
    CHECK(r.taus.size() > 2);
    CHECK(r.min_abs_det >= 0.5);
}

TEST_CASE("leaving the surjective stratum fails loudly") {
    const OperatorPath jump{[](double tau) {
                                return OperatorField::constant((tau < 0.5 ? -1.0 : -3.0) * pi * Mat::Identity(2, 2),
                                                               Domain::half);
                            },
                            "jump"};
    CHECK_THROWS_WITH_AS(transport_orientation(jump, coarse, TransportOptions{4, 0}),
                         doctest::Contains("surjective stratum"), NumericalError);
    const OperatorPath coker{[](double tau) {
                                 return OperatorField::constant((tau < 0.5 ? -1.0 : 1.0) * pi * Mat::Identity(2, 2),
                                                                Domain::half);
                             },
                             "coker"};
    CHECK_THROWS_WITH_AS(transport_orientation(coker, coarse, TransportOptions{4, 0}),
                         doctest::Contains("surjective stratum"), NumericalError);
}

TEST_CASE("W reverses orientation and the pushed frame is a kernel frame") {
    const ConjugationResult r = conjugation_sign(w_field(), minus_pi(2), coarse, TransportOptions{16, 0});
    CHECK(r.sign == -1);
    CHECK(r.pushforward_residual < 1e-2);
    CHECK(std::abs(std::abs(r.overlap_det) - 1.0) < 1e-2);
    CHECK(predict_sign(w_field()) == -1);
}

TEST_CASE("battery: conjugation sign equals the spin prediction") {
    const UnitaryField w = w_field();
    struct Item {
        std::string name;
        UnitaryField u;
        int n, expected;
    };
    const std::vector<Item> items{
        {"I", identity_field(2), 2, 1},
        {"W^2", pointwise_product(w, w), 2, 1},
        {"W+I", block_sum(w, identity_field(1)), 3, -1},
        {"VW", pointwise_product(wobble_field(), w), 2, -1},
    };
    for (const auto& it : items) {
        CAPTURE(it.name);
        CHECK(predict_sign(it.u) == it.expected);
        CHECK(conj(it.u, it.n) == it.expected);
    }
}

TEST_CASE("conjugation sign is multiplicative") {
    const UnitaryField w = w_field(), v = wobble_field();
    const int sw = conj(w, 2), sv = conj(v, 2);
    CHECK(sv == 1);
    CHECK(conj(pointwise_product(v, w), 2) == sv * sw);
    CHECK(conj(pointwise_product(w, w), 2) == sw * sw);
}

TEST_CASE("predict_sign needs a real boundary loop") {
    const UnitaryField phase(1, 1.0,
                             [](double s, double t) {
                                 const double a = 2 * pi * t * (1.0 - cutoff_phi(s));
                                 CMat v(1, 1), z = CMat::Zero(1, 1);
                                 v(0, 0) = std::polar(1.0, a);
                                 return UnitarySample{v, z, z};
                             },
                             "phase");
    CHECK_THROWS_AS(predict_sign(phase), InputError);
    CHECK(predict_sign(identity_field(1)) == 1);
    CHECK(predict_sign(wobble_field()) == 1);
}
