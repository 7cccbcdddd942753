#include "cr_orient/spin_lift.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <bit>
#include <cmath>
#include <string>

namespace cr_orient {
namespace {

constexpr double fineness_bound = 0.5;

double spectral_norm(const Mat& m) { return Eigen::JacobiSVD<Mat>(m).singularValues()(0); }

void require_fine(const SOLoop& loop) {
    if (loop.max_step() > fineness_bound)
        throw NumericalError("spin_lift: consecutive samples too far apart, refine sampling");
}

int blade_sign(unsigned a, unsigned b) {
    // reordering sign for e_A e_B, then e_i^2 = -1 for shared generators
    int swaps = 0;
    for (unsigned x = a >> 1; x != 0; x >>= 1) swaps += std::popcount(x & b);
    swaps += std::popcount(a & b);
    return (swaps & 1) ? -1 : 1;
}

}  // namespace

void validate_so_samples(const std::vector<Mat>& samples) {
    if (samples.empty()) throw InputError("SOLoop: no samples");
    const auto n = samples.front().rows();
    for (size_t i = 0; i < samples.size(); ++i) {
        const Mat& r = samples[i];
        if (r.rows() != n || r.cols() != n)
            throw InputError("SOLoop sample " + std::to_string(i) + ": wrong shape");
        if ((r.transpose() * r - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
            throw InputError("SOLoop sample " + std::to_string(i) + ": not orthogonal");
        if (std::abs(r.determinant() - 1.0) > 1e-10)
            throw InputError("SOLoop sample " + std::to_string(i) + ": determinant is not 1");
    }
}

SOLoop SOLoop::sampled(std::vector<Mat> samples) {
    validate_so_samples(samples);
    const int n = static_cast<int>(samples.front().rows());
    // an explicit closing sample equal to the first one is dropped
    if (samples.size() > 1 && (samples.back() - samples.front()).cwiseAbs().maxCoeff() < 1e-10)
        samples.pop_back();
    return SOLoop(n, std::move(samples));
}

SOLoop SOLoop::closed_form(int n, const std::function<Mat(double)>& f, int count) {
    if (count < 2) throw InputError("SOLoop: need at least two samples");
    std::vector<Mat> s;
    s.reserve(count);
    for (int i = 0; i < count; ++i) s.push_back(f(static_cast<double>(i) / count));
    validate_so_samples(s);
    if (s.front().rows() != n) throw InputError("SOLoop: closed form has wrong size");
    return SOLoop(n, std::move(s));
}

SOLoop SOLoop::plane_rotation(int n, int turns, int i, int j, int count) {
    if (n < 2 || i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw InputError("SOLoop: invalid rotation plane");
    return closed_form(n, [=](double t) {
        const double a = 2 * pi * turns * t;
        Mat r = Mat::Identity(n, n);
        r(i, i) = std::cos(a);
        r(j, j) = std::cos(a);
        r(i, j) = -std::sin(a);
        r(j, i) = std::sin(a);
        return r;
    }, count);
}

SOLoop SOLoop::axis_rotation(const Eigen::Vector3d& axis, int turns, int count) {
    if (axis.norm() < 1e-12) throw InputError("SOLoop: zero rotation axis");
    const Eigen::Vector3d k = axis.normalized();
    return closed_form(3, [=](double t) {
        return Mat(Eigen::AngleAxisd(2 * pi * turns * t, k).toRotationMatrix());
    }, count);
}

double SOLoop::max_step() const {
    double m = 0.0;
    const int c = size();
    for (int i = 0; i < c; ++i) m = std::max(m, spectral_norm(samples_[(i + 1) % c] - samples_[i]));
    return m;
}

SOLoop SOLoop::reversed() const {
    std::vector<Mat> s;
    s.reserve(samples_.size());
    s.push_back(samples_.front());
    for (int i = size() - 1; i >= 1; --i) s.push_back(samples_[i]);
    return SOLoop(n_, std::move(s));
}

SOLoop SOLoop::embedded(int m) const {
    if (m < n_) throw InputError("SOLoop::embedded: target dimension too small");
    std::vector<Mat> s;
    for (const auto& r : samples_) {
        Mat e = Mat::Identity(m, m);
        e.topLeftCorner(n_, n_) = r;
        s.push_back(e);
    }
    return SOLoop(m, std::move(s));
}

SOLoop SOLoop::concatenated(const SOLoop& other) const {
    if (other.n_ != n_) throw InputError("SOLoop::concatenated: dimension mismatch");
    if ((other.samples_.front() - samples_.front()).cwiseAbs().maxCoeff() > 1e-10)
        throw InputError("SOLoop::concatenated: loops have different base points");
    std::vector<Mat> s = samples_;
    s.insert(s.end(), other.samples_.begin(), other.samples_.end());
    return SOLoop(n_, std::move(s));
}

int winding_number(const SOLoop& loop) {
    if (loop.n() != 2) throw InputError("winding_number: loop must lie in SO(2)");
    require_fine(loop);
    double total = 0.0;
    const int c = loop.size();
    for (int i = 0; i < c; ++i) {
        const Mat d = loop[(i + 1) % c] * loop[i].transpose();
        total += std::atan2(d(1, 0), d(0, 0));
    }
    const double w = total / (2 * pi);
    const double r = std::round(w);
    if (std::abs(w - r) > 1e-6) throw NumericalError("winding_number: non-integral winding");
    return static_cast<int>(r);
}

EvenClifford::EvenClifford(int n) : n_(n) {
    if (n < 1 || n > 8) throw InputError("EvenClifford: n must lie in [1, 8]");
    index_.assign(1u << n, -1);
    for (unsigned m = 0; m < (1u << n); ++m)
        if (std::popcount(m) % 2 == 0) {
            index_[m] = static_cast<int>(blades_.size());
            blades_.push_back(m);
        }
}

Vec EvenClifford::one() const {
    Vec v = Vec::Zero(dim());
    v(0) = 1.0;
    return v;
}

Vec EvenClifford::multiply(const Vec& a, const Vec& b) const {
    Vec out = Vec::Zero(dim());
    for (int i = 0; i < dim(); ++i) {
        if (a(i) == 0.0) continue;
        for (int j = 0; j < dim(); ++j) {
            if (b(j) == 0.0) continue;
            const unsigned x = blades_[i], y = blades_[j];
            out(index_[x ^ y]) += blade_sign(x, y) * a(i) * b(j);
        }
    }
    return out;
}

Vec EvenClifford::exp(const Vec& b) const {
    // scaling and squaring with a Taylor core
    const double nrm = b.lpNorm<1>();
    int sq = 0;
    while (nrm / std::ldexp(1.0, sq) > 0.25) ++sq;
    const Vec x = b / std::ldexp(1.0, sq);
    Vec sum = one(), term = one();
    for (int k = 1; k < 30; ++k) {
        term = multiply(term, x) / k;
        sum += term;
        if (term.lpNorm<1>() < 1e-18) break;
    }
    for (int i = 0; i < sq; ++i) sum = multiply(sum, sum);
    return sum;
}

Vec EvenClifford::lift_rotation_log(const Mat& a) const {
    Vec b = Vec::Zero(dim());
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) b(index_[(1u << i) | (1u << j)]) = -0.5 * a(i, j);
    return exp(b);
}

LiftResult lifts_to_spin(const SOLoop& loop) {
    const int n = loop.n();
    if (n > 8) throw InputError("lifts_to_spin: n > 8 exceeds the Clifford dimension cap");
    require_fine(loop);
    LiftResult res;
    if (n == 1) return res;
    if (n == 2) {
        const int w = winding_number(loop);
        res.winding = w;
        res.lifts = (w % 2 == 0);
        res.certificate = res.lifts ? 1.0 : -1.0;
        return res;
    }
    const EvenClifford cl(n);
    Vec g = cl.one();
    const int c = loop.size();
    for (int i = 0; i < c; ++i) {
        const Mat d = loop[(i + 1) % c] * loop[i].transpose();
        Mat a = d.log();
        a = 0.5 * (a - a.transpose());
        g = cl.multiply(cl.lift_rotation_log(a), g);
    }
    Vec plus = g - cl.one(), minus = g + cl.one();
    const double dp = plus.norm(), dm = minus.norm();
    res.distance = std::min(dp, dm);
    if (res.distance > 0.1) throw NumericalError("lifts_to_spin: holonomy not near +-1, refine sampling");
    res.lifts = dp < dm;
    res.certificate = res.lifts ? 1.0 : -1.0;
    return res;
}

int delta_sign(const SOLoop& loop) { return lifts_to_spin(loop).lifts ? 1 : -1; }

}  // namespace cr_orient
