#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cr_orient {

using cplx = std::complex<double>;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;

// Rejected input: bad shapes, violated preconditions, malformed data.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical certificate could not be produced (gap, fineness, path continuity).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex structure on R^{2n} in (q, p) coordinates: multiplication by i.
Mat complex_structure(int n);

// Real 2n x 2n form [[X, -Y], [Y, X]] of X + iY.
Mat realify(const CMat& m);

// Inverse of realify for matrices that commute with J.
CMat complexify(const Mat& m);

}  // namespace cr_orient
