#include "cr_orient/orientation.hpp"

#include <cmath>
#include <sstream>

namespace cr_orient {

namespace {

struct Step {
    Mat frame;
    int dim;
};

Step kernel_at(const OperatorField& f, const Discretization& disc, const TolPolicy& tol, double tau) {
    const KernelAnalysis an = analyze_kernel(assemble(f, disc), tol);
    if (!an.surjective()) {
        std::ostringstream msg;
        msg << "path leaves the surjective stratum at tau = " << tau << " (cokernel dimension "
            << an.cokernel.cols() << ")";
        throw NumericalError(msg.str());
    }
    return Step{an.kernel.basis, an.kernel.dim()};
}

double signed_overlap(const Mat& a, const Mat& b) {
    if (a.cols() == 0) return 1.0;
    return (a.transpose() * b).determinant();
}

}  // namespace

TransportResult transport_orientation(const OperatorPath& path, const Discretization& disc,
                                      const TransportOptions& opt, const TolPolicy& tol) {
    if (opt.grid < 1) throw InputError("transport_orientation: grid must be positive");
    if (opt.max_bisections < 0) throw InputError("transport_orientation: max_bisections must be non-negative");
    TransportResult res;
    Step prev = kernel_at(path.at(0.0), disc, tol, 0.0);
    res.dim = prev.dim;
    res.start_frame = prev.frame;
    res.taus.push_back(0.0);
    double tau0 = 0.0;
    const double coarse = 1.0 / opt.grid;
    const double finest = coarse / std::ldexp(1.0, opt.max_bisections);
    double step = coarse;
    while (tau0 < 1.0) {
        const double tau = std::min(1.0, tau0 + step);
        Step cur = kernel_at(path.at(tau), disc, tol, tau);
        if (cur.dim != prev.dim || cur.frame.rows() != prev.frame.rows()) {
            std::ostringstream msg;
            msg << "path leaves the surjective stratum: kernel dimension jumps from " << prev.dim << " to "
                << cur.dim << " at tau = " << tau;
            throw NumericalError(msg.str());
        }
        const double d = signed_overlap(cur.frame, prev.frame);
        if (std::abs(d) < 0.5) {
            if (step > finest * 1.5) {
                step *= 0.5;
                continue;
            }
            std::ostringstream msg;
            msg << "kernel frames at tau = " << tau << " overlap with |det| = " << std::abs(d)
                << "; refine parameter grid";
            throw NumericalError(msg.str());
        }
        res.step_dets.push_back(d);
        res.taus.push_back(tau);
        res.min_abs_det = std::min(res.min_abs_det, std::abs(d));
        if (d < 0) res.sign = -res.sign;
        prev = std::move(cur);
        tau0 = tau;
        // return to the coarse grid once aligned with it
        const double k = tau0 / coarse;
        if (std::abs(k - std::round(k)) < 1e-9) step = coarse;
    }
    res.end_frame = prev.frame;
    return res;
}

Mat push_forward(const DiscretizedOperator& from, const Mat& frame, const UnitaryField& u,
                 const DiscretizedOperator& to) {
    if (from.cols() != to.cols() || from.node_count() != to.node_count() || from.n() != u.n())
        throw InputError("push_forward: operators do not share a grid");
    const double h = from.h();
    const double s0 = from.s_nodes().front();
    Mat out(to.cols(), frame.cols());
    for (int c = 0; c < frame.cols(); ++c) {
        const Vec x = frame.col(c);
        out.col(c) = to.discretize([&](double s, double t) -> CVec {
            const int j = static_cast<int>(std::lround((s - s0) / h));
            return u(s, t).value * from.evaluate(x, j, t);
        });
    }
    return out;
}

ConjugationResult conjugation_sign(const UnitaryField& u, const OperatorField& base, const Discretization& disc,
                                   const TransportOptions& opt, const TolPolicy& tol) {
    if (base.domain() != Domain::half) throw InputError("conjugation_sign: base must live on the half cylinder");
    const double shift = u.support_end();
    auto at_rho = [&](double rho) { return conjugated_field(shifted(u, rho * shift), base); };
    ConjugationResult res;

    const DiscretizedOperator d0 = assemble(base, disc);
    const KernelAnalysis a0 = analyze_kernel(d0, tol);
    if (!a0.surjective()) throw NumericalError("conjugation_sign: base operator is not surjective");
    const Mat f0 = a0.kernel.basis;

    // tau = 0 is rho = 1 (the base up to an identity gauge); tau = 1 is rho = 0
    OperatorPath path{[&](double tau) { return at_rho(1.0 - tau); }, "conjugation"};
    res.transport = transport_orientation(path, disc, opt, tol);
    const double start = signed_overlap(res.transport.start_frame, f0);
    if (std::abs(start) < 0.5) throw NumericalError("conjugation_sign: identity gauge moved the base kernel");

    const DiscretizedOperator dt = assemble(at_rho(0.0), disc);
    const Mat& ft = res.transport.end_frame;
    Mat g = push_forward(d0, f0, u, dt);
    const Mat proj = ft * (ft.transpose() * g);
    res.pushforward_residual = (g - proj).norm() / std::max(1.0, g.norm());
    res.overlap_det = signed_overlap(ft, proj);
    if (std::abs(res.overlap_det) < 1e-3) throw NumericalError("conjugation_sign: U F_0 is not a kernel frame");
    int s = res.transport.sign * (start < 0 ? -1 : 1);
    if (res.overlap_det < 0) s = -s;
    res.sign = s;
    return res;
}

int predict_sign(const UnitaryField& u, int samples) {
    double imag = 0.0;
    auto f = [&](double t) -> Mat {
        const CMat v = u(0.0, t).value;
        imag = std::max(imag, v.imag().cwiseAbs().maxCoeff());
        return v.real();
    };
    const SOLoop loop = SOLoop::closed_form(u.n(), f, samples);
    if (imag > 1e-12) throw InputError("predict_sign: boundary loop U(0, .) is not real");
    return delta_sign(loop);
}

}  // namespace cr_orient
