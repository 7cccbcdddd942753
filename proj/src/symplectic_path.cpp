#include "cr_orient/symplectic_path.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace cr_orient {
namespace {

void require_symmetric(const Mat& s, const std::string& where) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0 || s.rows() == 0)
        throw InputError(where + ": expected a 2n x 2n matrix");
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw InputError(where + ": matrix is not symmetric");
}

// orthonormal frame of the graph of psi in C^{2n}, in the complex
// coordinates (q1 - i p1, q2 + i p2)
CMat graph_frame(const Mat& psi, int n) {
    const int d = 2 * n;
    Mat f(2 * d, d);
    f.topRows(d) = Mat::Identity(d, d);
    f.bottomRows(d) = psi;
    Eigen::HouseholderQR<Mat> qr(f);
    Mat q = qr.householderQ() * Mat::Identity(2 * d, d);
    CMat a(d, d);
    a.topRows(n) = q.topRows(n).cast<cplx>() - cplx(0, 1) * q.middleRows(n, n).cast<cplx>();
    a.bottomRows(n) =
        q.middleRows(2 * n, n).cast<cplx>() + cplx(0, 1) * q.middleRows(3 * n, n).cast<cplx>();
    return a;
}

}  // namespace

SymmetricLoop SymmetricLoop::constant(const Mat& s) {
    require_symmetric(s, "SymmetricLoop");
    SymmetricLoop l(Kind::constant, static_cast<int>(s.rows() / 2));
    l.samples_.push_back(s);
    return l;
}

SymmetricLoop SymmetricLoop::sampled(std::vector<Mat> samples) {
    if (samples.empty()) throw InputError("SymmetricLoop: no samples");
    for (size_t i = 0; i < samples.size(); ++i)
        require_symmetric(samples[i], "SymmetricLoop sample " + std::to_string(i));
    const auto rows = samples.front().rows();
    for (const auto& s : samples)
        if (s.rows() != rows) throw InputError("SymmetricLoop: inconsistent sample sizes");
    SymmetricLoop l(Kind::sampled, static_cast<int>(rows / 2));
    l.samples_ = std::move(samples);
    return l;
}

SymmetricLoop SymmetricLoop::closed_form(int n, std::function<Mat(double)> f) {
    if (n < 1) throw InputError("SymmetricLoop: n must be positive");
    for (int i = 0; i < 64; ++i) {
        Mat s = f(i / 64.0);
        require_symmetric(s, "SymmetricLoop closed form");
        if (s.rows() != 2 * n) throw InputError("SymmetricLoop: closed form has wrong size");
    }
    SymmetricLoop l(Kind::closed_form, n);
    l.fn_ = std::move(f);
    return l;
}

Mat SymmetricLoop::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return samples_.front();
        case Kind::closed_form:
            return fn_(t - std::floor(t));
        case Kind::sampled: {
            const double m = static_cast<double>(samples_.size());
            const double x = (t - std::floor(t)) * m;
            const auto i = static_cast<size_t>(std::floor(x)) % samples_.size();
            const double w = x - std::floor(x);
            return (1.0 - w) * samples_[i] + w * samples_[(i + 1) % samples_.size()];
        }
    }
    return {};
}

SymplecticPath integrate_symplectic_path(const SymmetricLoop& s, int steps) {
    if (steps < 16) throw InputError("integrate_symplectic_path: steps must be >= 16");
    const int n = s.n();
    const Mat j = complex_structure(n);
    const Mat id = Mat::Identity(2 * n, 2 * n);
    const double h = 1.0 / steps;
    SymplecticPath g;
    g.n = n;
    g.samples.reserve(steps + 1);
    g.samples.push_back(id);
    for (int k = 0; k < steps; ++k) {
        const Mat a = j * s((k + 0.5) * h);
        const Mat next = (id - 0.5 * h * a).partialPivLu().solve((id + 0.5 * h * a) * g.samples.back());
        g.samples.push_back(next);
    }
    return g;
}

double symplecticity_defect(const SymplecticPath& g) {
    const Mat j = complex_structure(g.n);
    double d = 0.0;
    for (const auto& m : g.samples) d = std::max(d, (m.transpose() * j * m - j).cwiseAbs().maxCoeff());
    return d;
}

bool is_nondegenerate(const SymplecticPath& g) {
    if (g.samples.empty()) throw InputError("is_nondegenerate: empty path");
    const Mat& e = g.endpoint();
    const double nrm = std::max(1.0, Eigen::JacobiSVD<Mat>(e).singularValues()(0));
    const double d = (e - Mat::Identity(e.rows(), e.cols())).determinant();
    return std::abs(d) / std::pow(nrm, static_cast<double>(e.rows())) > 1e-8;
}

CZIndex conley_zehnder_index(const SymplecticPath& g) {
    if (!is_nondegenerate(g))
        throw InputError("conley_zehnder_index: endpoint has eigenvalue 1 (degenerate path)");
    const int n = g.n;
    const CMat diag_adj = graph_frame(Mat::Identity(2 * n, 2 * n), n).adjoint();
    double theta = 0.0, prev = 0.0;
    CMat m;
    for (size_t i = 0; i < g.samples.size(); ++i) {
        const CMat b = diag_adj * graph_frame(g.samples[i], n);
        m = b * b.transpose();
        const double a = std::arg(m.determinant());
        if (i == 0) {
            theta = a;
        } else {
            const double da = std::remainder(a - prev, 2 * pi);
            if (std::abs(da) > pi / 2)
                throw NumericalError("conley_zehnder_index: phase jump too large, refine steps");
            theta += da;
        }
        prev = a;
    }
    Eigen::ComplexEigenSolver<CMat> es(m, false);
    double phases = 0.0;
    for (const auto& ev : es.eigenvalues()) {
        double ph = std::arg(ev);
        if (ph <= 0) ph += 2 * pi;
        phases += ph;
    }
    const double mu = (theta - phases) / (2 * pi) + n;
    const double r = std::round(mu);
    if (std::abs(mu - r) > 1e-6) throw NumericalError("conley_zehnder_index: non-integral phase count");
    return CZIndex{static_cast<int>(r)};
}

SymplecticPath direct_sum(const SymplecticPath& a, const SymplecticPath& b) {
    if (a.samples.size() != b.samples.size())
        throw InputError("direct_sum: paths sampled on different grids");
    const int n = a.n + b.n;
    SymplecticPath out;
    out.n = n;
    for (size_t i = 0; i < a.samples.size(); ++i) {
        Mat m = Mat::Zero(2 * n, 2 * n);
        const Mat& x = a.samples[i];
        const Mat& y = b.samples[i];
        const int p = a.n, q = b.n;
        m.block(0, 0, p, p) = x.block(0, 0, p, p);
        m.block(0, n, p, p) = x.block(0, p, p, p);
        m.block(n, 0, p, p) = x.block(p, 0, p, p);
        m.block(n, n, p, p) = x.block(p, p, p, p);
        m.block(p, p, q, q) = y.block(0, 0, q, q);
        m.block(p, n + p, q, q) = y.block(0, q, q, q);
        m.block(n + p, p, q, q) = y.block(q, 0, q, q);
        m.block(n + p, n + p, q, q) = y.block(q, q, q, q);
        out.samples.push_back(m);
    }
    return out;
}

SymplecticPath loop_shift(const SymplecticPath& g, int k) {
    SymplecticPath out = g;
    const int n = g.n;
    const size_t m = g.samples.size() - 1;
    for (size_t i = 0; i <= m; ++i) {
        const double ang = 2 * pi * k * static_cast<double>(i) / static_cast<double>(m);
        Mat r = std::cos(ang) * Mat::Identity(2 * n, 2 * n) + std::sin(ang) * complex_structure(n);
        out.samples[i] = r * g.samples[i];
    }
    return out;
}

}  // namespace cr_orient
