#include "doctest.h"

#include "cr_orient/symplectic_path.hpp"

#include <cmath>
#include <random>

using namespace cr_orient;

namespace {

SymplecticPath constant_path(const Mat& s, int steps = 1024) {
    return integrate_symplectic_path(SymmetricLoop::constant(s), steps);
}

SymplecticPath scalar_path(double c, int n, int steps = 1024) {
    return constant_path(c * pi * Mat::Identity(2 * n, 2 * n), steps);
}

// rotation by alpha*t in the plane: mu = 2 floor(alpha / 2pi) + 1
int rotation_oracle(double alpha) { return 2 * static_cast<int>(std::floor(alpha / (2 * pi))) + 1; }

Mat random_symmetric(std::mt19937_64& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Mat a(2 * n, 2 * n);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = g(rng);
    return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("zero field gives the constant identity path") {
    auto g = scalar_path(0.0, 1);
    for (const auto& m : g.samples) CHECK((m - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_FALSE(is_nondegenerate(g));
    CHECK_THROWS_AS(conley_zehnder_index(g), InputError);
}

TEST_CASE("constant -pi I rotates by -pi t") {
    auto g = scalar_path(-1.0, 1);
    for (size_t i = 0; i < g.samples.size(); i += 128) {
        const double t = static_cast<double>(i) / 1024.0;
        Mat r(2, 2);
        r << std::cos(-pi * t), -std::sin(-pi * t), std::sin(-pi * t), std::cos(-pi * t);
        CHECK((g.samples[i] - r).cwiseAbs().maxCoeff() < 1e-5);
    }
    CHECK((g.endpoint() + Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(is_nondegenerate(g));
}

TEST_CASE("-3 pi I ends at -I as well") {
    auto g = scalar_path(-3.0, 1);
    CHECK((g.endpoint() + Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("-2 pi I is degenerate") { CHECK_FALSE(is_nondegenerate(scalar_path(-2.0, 1))); }

TEST_CASE("CZ anchors") {
    CHECK(conley_zehnder_index(scalar_path(-1.0, 1)).value == -1);
    CHECK(conley_zehnder_index(scalar_path(-3.0, 1)).value == -3);
    CHECK(conley_zehnder_index(scalar_path(-1.0, 2)).value == -2);
}

TEST_CASE("symplecticity at 1024 steps for smooth t-dependent fields") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const Mat a = random_symmetric(rng, 2, 2.0);
        const Mat b = random_symmetric(rng, 2, 2.0);
        auto loop = SymmetricLoop::closed_form(2, [a, b](double t) {
            return Mat(a + std::sin(2 * pi * t) * b);
        });
        CHECK(symplecticity_defect(integrate_symplectic_path(loop, 1024)) <= 1e-8);
    }
}

TEST_CASE("rejects non-symmetric input and too few steps") {
    Mat s = Mat::Identity(2, 2);
    s(0, 1) = 1.0;
    CHECK_THROWS_AS(SymmetricLoop::constant(s), InputError);
    CHECK_THROWS_AS(integrate_symplectic_path(SymmetricLoop::constant(Mat::Identity(2, 2)), 8),
                    InputError);
}

TEST_CASE("CZ of planar rotations matches the floor formula") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-7.0, 7.0);
    for (int trial = 0; trial < 40; ++trial) {
        double c = u(rng);
        if (std::abs(c / 2 - std::round(c / 2)) < 0.05) continue;
        CHECK(conley_zehnder_index(scalar_path(c, 1)).value == rotation_oracle(c * pi));
    }
}

TEST_CASE("hyperbolic path has index 0") {
    Mat s(2, 2);
    s << 1.0, 0.0, 0.0, -1.0;
    CHECK(conley_zehnder_index(constant_path(s)).value == 0);
}

TEST_CASE("additivity under direct sum") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = u(rng), c2 = u(rng);
        if (std::abs(c1 / 2 - std::round(c1 / 2)) < 0.05 || std::abs(c2 / 2 - std::round(c2 / 2)) < 0.05)
            continue;
        auto g1 = scalar_path(c1, 1), g2 = scalar_path(c2, 1);
        const int sum = conley_zehnder_index(g1).value + conley_zehnder_index(g2).value;
        CHECK(conley_zehnder_index(direct_sum(g1, g2)).value == sum);
        Mat s = Mat::Zero(4, 4);
        s.diagonal() << c1 * pi, c2 * pi, c1 * pi, c2 * pi;
        CHECK(conley_zehnder_index(constant_path(s)).value == sum);
    }
}

TEST_CASE("refinement stability") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 8; ++trial) {
        const Mat a = random_symmetric(rng, 2, 3.0);
        const Mat b = random_symmetric(rng, 2, 1.0);
        auto loop = SymmetricLoop::closed_form(2, [a, b](double t) {
            return Mat(a + std::cos(2 * pi * t) * b);
        });
        auto g256 = integrate_symplectic_path(loop, 256);
        if (!is_nondegenerate(g256)) continue;
        const int mu = conley_zehnder_index(g256).value;
        CHECK(conley_zehnder_index(integrate_symplectic_path(loop, 512)).value == mu);
        CHECK(conley_zehnder_index(integrate_symplectic_path(loop, 1024)).value == mu);
    }
}

TEST_CASE("loop shift adds twice the winding") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = u(rng);
        if (std::abs(c / 2 - std::round(c / 2)) < 0.05) continue;
        auto g = scalar_path(c, 1);
        const int mu = conley_zehnder_index(g).value;
        for (int k : {-2, -1, 1, 2}) CHECK(conley_zehnder_index(loop_shift(g, k)).value == mu + 2 * k);
    }
}
