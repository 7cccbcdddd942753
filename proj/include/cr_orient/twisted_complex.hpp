#pragma once

#include "cr_orient/spin_lift.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cr_orient {

using Integer = boost::multiprecision::cpp_int;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Integer& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Integer& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
    bool is_zero() const;
    bool operator==(const IntMatrix& o) const = default;

    static IntMatrix identity(int n);
    static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);

struct Generator {
    std::string id;
    int grade = 0;
    std::optional<SOLoop> loop;
};

struct Edge {
    std::string src, tgt;
    int eps = 1;
    int delta = 1;                    // resolved sign
    std::optional<SOLoop> delta_loop; // kept when delta came from a loop
};

// Two broken trajectories u.v and u2.v2 bounding one 1-dimensional component;
// entries are edge indices.
struct Quadruple {
    int u = 0, v = 0, u2 = 0, v2 = 0;
};

class ComplexDatum {
public:
    ComplexDatum() = default;
    // Validates ids, endpoints, grade gaps, sign values and quadruple shape.
    // Edges given with a loop have their delta resolved here.
    ComplexDatum(std::vector<Generator> gens, std::vector<Edge> edges, std::vector<Quadruple> quads = {});

    const std::vector<Generator>& generators() const { return gens_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Quadruple>& quadruples() const { return quads_; }

    int index_of(const std::string& id) const;
    int min_grade() const;
    int max_grade() const;
    // generator indices of a grade, in input order
    std::vector<int> basis(int grade) const;

    // descriptions of quadruples that violate delta(u)delta(v) = delta(u2)delta(v2)
    std::vector<std::string> cpr_violations() const;

private:
    std::vector<Generator> gens_;
    std::vector<Edge> edges_;
    std::vector<Quadruple> quads_;
    std::map<std::string, int> index_;
};

// degree k -> matrix of C_k -> C_{k-1}, rows indexed by basis(k-1), columns by basis(k)
std::map<int, IntMatrix> boundary_matrices(const ComplexDatum& c, bool twisted);

bool check_boundary_squared(const ComplexDatum& c, bool twisted);

ComplexDatum gauge_transform(const ComplexDatum& c, const std::map<std::string, SOLoop>& loops);
ComplexDatum gauge_by_signs(const ComplexDatum& c, const std::vector<int>& sign);

struct SmithForm {
    std::vector<Integer> factors;  // nonzero invariant factors, each dividing the next
    int rank() const { return static_cast<int>(factors.size()); }
};

SmithForm smith_normal_form(IntMatrix m);

struct HomologyGroup {
    int degree = 0;
    int free_rank = 0;
    std::vector<Integer> torsion;
    bool operator==(const HomologyGroup&) const = default;
};

struct IntegerHomology {
    std::vector<HomologyGroup> groups;
    bool operator==(const IntegerHomology&) const = default;
    const HomologyGroup& at(int degree) const;
};

IntegerHomology homology(const ComplexDatum& c, bool twisted);

struct ChainMapReport {
    bool commutes = true;
    bool isomorphism = true;
    std::map<int, IntMatrix> defects;  // degree k: Theta_{k-1} d_src - d_tgt Theta_k, nonzero only
};

// theta[k]: target basis(k) x source rank k; source_boundary[k]: C^src_k -> C^src_{k-1}.
ChainMapReport verify_chain_map(const std::map<int, IntMatrix>& theta,
                                const std::map<int, IntMatrix>& source_boundary,
                                const ComplexDatum& target, bool twisted);

// Sign function c with delta(e) = c(src) c(tgt) for every edge, by exhaustive search.
std::optional<std::vector<int>> find_coboundary(const ComplexDatum& c);

// Random complex on grades 0..3 with at most 12 generators: twinned middle
// generators pair every broken trajectory, quadruples are recorded and edges
// derived from them. coboundary_delta forces delta = c(src) c(tgt).
ComplexDatum random_broken_pair_datum(std::mt19937_64& rng, bool coboundary_delta);

}  // namespace cr_orient
