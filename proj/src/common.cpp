#include "cr_orient/common.hpp"

namespace cr_orient {

Mat complex_structure(int n) {
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return j;
}

Mat realify(const CMat& m) {
    const auto r = m.rows(), c = m.cols();
    Mat out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.real();
    out.topRightCorner(r, c) = -m.imag();
    out.bottomLeftCorner(r, c) = m.imag();
    out.bottomRightCorner(r, c) = m.real();
    return out;
}

CMat complexify(const Mat& m) {
    const auto r = m.rows() / 2, c = m.cols() / 2;
    CMat out(r, c);
    out.real() = m.topLeftCorner(r, c);
    out.imag() = m.bottomLeftCorner(r, c);
    return out;
}

}  // namespace cr_orient
