#pragma once

// Orientation transport of kernel frames along paths of surjective operators,
// and the sign of the conjugation isomorphism u -> U u.

#include "cr_orient/cr_operator.hpp"
#include "cr_orient/spin_lift.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cr_orient {

// tau in [0, 1] -> field; all fields share n and the domain
struct OperatorPath {
    std::function<OperatorField(double)> at;
    std::string name = "path";
};

struct TransportResult {
    int sign = 1;                    // transport of [F(0)] equals sign * [F(1)]
    int dim = 0;
    std::vector<double> taus;        // parameter values actually visited
    std::vector<double> step_dets;   // det(F_i^T F_{i-1})
    double min_abs_det = 1.0;
    Mat start_frame, end_frame;
};

struct TransportOptions {
    int grid = 64;           // uniform parameter intervals
    int max_bisections = 0;  // halvings allowed for an ill-conditioned step; 0 = fail at once
};

TransportResult transport_orientation(const OperatorPath& path, const Discretization& disc,
                                      const TransportOptions& opt, const TolPolicy& tol = {});

// kernel vectors of `from` multiplied pointwise by U(s, t), expressed in the columns of `to`
Mat push_forward(const DiscretizedOperator& from, const Mat& frame, const UnitaryField& u,
                 const DiscretizedOperator& to);

struct ConjugationResult {
    int sign = 1;
    TransportResult transport;       // along rho -> U(s + rho * support_end, t), rho from 1 to 0
    double pushforward_residual = 0.0;  // distance of U F_0 from the kernel of the conjugated operator
    double overlap_det = 0.0;           // det(F_T^T G)
};

// Sign comparing transport of the base orientation with the pushed-forward frame U F_0.
ConjugationResult conjugation_sign(const UnitaryField& u, const OperatorField& base, const Discretization& disc,
                                   const TransportOptions& opt, const TolPolicy& tol = {});

// +1 when the boundary loop t -> U(0, t) in SO(n) lifts to Spin(n), -1 otherwise.
int predict_sign(const UnitaryField& u, int samples = 512);

}  // namespace cr_orient
