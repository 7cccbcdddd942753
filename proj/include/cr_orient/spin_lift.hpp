#pragma once

#include "cr_orient/common.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cr_orient {

// Loop in SO(n) sampled at t_i = i/m, i = 0..m-1 (periodic).
class SOLoop {
public:
    static SOLoop sampled(std::vector<Mat> samples);
    static SOLoop closed_form(int n, const std::function<Mat(double)>& f, int count);
    // rotation by 2 pi turns t in the coordinate plane (i, j)
    static SOLoop plane_rotation(int n, int turns, int i = 0, int j = 1, int count = 256);
    // n = 3 rotation by 2 pi turns t about an axis
    static SOLoop axis_rotation(const Eigen::Vector3d& axis, int turns, int count = 256);

    int n() const { return n_; }
    int size() const { return static_cast<int>(samples_.size()); }
    const std::vector<Mat>& samples() const { return samples_; }
    const Mat& operator[](int i) const { return samples_[i]; }

    // largest ||R_{i+1} - R_i||_2 including the closing step
    double max_step() const;

    SOLoop reversed() const;
    // R (+) I_{m - n}
    SOLoop embedded(int m) const;
    // traverse this loop, then the other; both must share the base point
    SOLoop concatenated(const SOLoop& other) const;

private:
    SOLoop(int n, std::vector<Mat> s) : n_(n), samples_(std::move(s)) {}
    int n_;
    std::vector<Mat> samples_;
};

// Throws InputError naming the offending sample index when R^T R != I or det R != 1.
void validate_so_samples(const std::vector<Mat>& samples);

struct LiftResult {
    bool lifts = true;
    std::optional<int> winding;  // n = 2 only
    double certificate = 1.0;    // sign of the accumulated lift endpoint
    double distance = 0.0;       // distance of the holonomy to the nearest of +1, -1
};

int winding_number(const SOLoop& loop);
LiftResult lifts_to_spin(const SOLoop& loop);
int delta_sign(const SOLoop& loop);

// Even subalgebra of Cl(0, n) on the basis of even blades, n <= 8.
class EvenClifford {
public:
    explicit EvenClifford(int n);
    int n() const { return n_; }
    int dim() const { return static_cast<int>(blades_.size()); }
    Vec one() const;
    Vec multiply(const Vec& a, const Vec& b) const;
    // lift of exp(A) for skew A: exp(-1/2 sum_{i<j} A_ij e_i e_j)
    Vec lift_rotation_log(const Mat& a) const;

private:
    Vec exp(const Vec& b) const;
    int n_;
    std::vector<unsigned> blades_;
    std::vector<int> index_;  // blade mask -> position, -1 for odd blades
};

}  // namespace cr_orient
