#pragma once

#include "cr_orient/common.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace cr_orient {

// Periodic loop t -> S(t) of symmetric 2n x 2n real matrices, period 1.
class SymmetricLoop {
public:
    static SymmetricLoop constant(const Mat& s);
    // samples at t_i = i/m, i = 0..m-1, evaluated by periodic linear interpolation
    static SymmetricLoop sampled(std::vector<Mat> samples);
    // validated for symmetry on a 64-point grid
    static SymmetricLoop closed_form(int n, std::function<Mat(double)> f);

    int n() const { return n_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    Mat operator()(double t) const;

private:
    enum class Kind { constant, sampled, closed_form };
    SymmetricLoop(Kind k, int n) : kind_(k), n_(n) {}
    Kind kind_;
    int n_;
    std::vector<Mat> samples_;
    std::function<Mat(double)> fn_;
};

struct SymplecticPath {
    int n = 0;
    std::vector<Mat> samples;  // gamma(t_i), t_i = i / (samples.size() - 1)
    const Mat& endpoint() const { return samples.back(); }
};

struct CZIndex {
    int value = 0;
    static constexpr std::string_view convention =
        "index(D+) = -mu_CZ; mu_CZ(exp(-pi t J)) = -1 for n = 1";
};

SymplecticPath integrate_symplectic_path(const SymmetricLoop& s, int steps);

// max_t |gamma^T J gamma - J|_max
double symplecticity_defect(const SymplecticPath& g);

bool is_nondegenerate(const SymplecticPath& g);

CZIndex conley_zehnder_index(const SymplecticPath& g);

SymplecticPath direct_sum(const SymplecticPath& a, const SymplecticPath& b);

// t -> exp(2 pi k t J) gamma(t)
SymplecticPath loop_shift(const SymplecticPath& g, int k);

}  // namespace cr_orient
