#include "cr_orient/twisted_complex.hpp"

#include <algorithm>
#include <set>

namespace cr_orient {
namespace {

Integer abs_int(const Integer& x) { return x < 0 ? Integer(-x) : x; }

void require_sign(int v, const std::string& what) {
    if (v != 1 && v != -1) throw InputError(what + " must be +1 or -1");
}

}  // namespace

bool IntMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Integer& x) { return x == 0; });
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows.front().size()) : 0;
    IntMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c) throw InputError("IntMatrix: ragged rows");
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw InputError("IntMatrix product: dimension mismatch");
    IntMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("IntMatrix difference: dimension mismatch");
    IntMatrix c(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

ComplexDatum::ComplexDatum(std::vector<Generator> gens, std::vector<Edge> edges, std::vector<Quadruple> quads)
    : gens_(std::move(gens)), edges_(std::move(edges)), quads_(std::move(quads)) {
    for (size_t i = 0; i < gens_.size(); ++i) {
        if (gens_[i].id.empty()) throw InputError("generator " + std::to_string(i) + ": empty id");
        if (!index_.emplace(gens_[i].id, static_cast<int>(i)).second)
            throw InputError("generator id '" + gens_[i].id + "' is not unique");
    }
    for (size_t e = 0; e < edges_.size(); ++e) {
        Edge& ed = edges_[e];
        const std::string name = "edge " + std::to_string(e) + " (" + ed.src + "->" + ed.tgt + ")";
        auto s = index_.find(ed.src), t = index_.find(ed.tgt);
        if (s == index_.end() || t == index_.end()) throw InputError(name + ": unknown endpoint");
        if (gens_[s->second].grade != gens_[t->second].grade + 1)
            throw InputError(name + ": grade gap must be exactly 1");
        require_sign(ed.eps, name + " eps");
        if (ed.delta_loop) ed.delta = delta_sign(*ed.delta_loop);
        require_sign(ed.delta, name + " delta");
    }
    const int ne = static_cast<int>(edges_.size());
    for (size_t q = 0; q < quads_.size(); ++q) {
        const auto& qd = quads_[q];
        const std::string name = "quadruple " + std::to_string(q);
        for (int e : {qd.u, qd.v, qd.u2, qd.v2})
            if (e < 0 || e >= ne) throw InputError(name + ": edge index out of range");
        const Edge &u = edges_[qd.u], &v = edges_[qd.v], &u2 = edges_[qd.u2], &v2 = edges_[qd.v2];
        if (u.tgt != v.src || u2.tgt != v2.src || u.src != u2.src || v.tgt != v2.tgt)
            throw InputError(name + ": edges do not form two broken trajectories with common ends");
    }
}

int ComplexDatum::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("unknown generator '" + id + "'");
    return it->second;
}

int ComplexDatum::min_grade() const {
    int g = 0;
    for (size_t i = 0; i < gens_.size(); ++i) g = i ? std::min(g, gens_[i].grade) : gens_[i].grade;
    return g;
}

int ComplexDatum::max_grade() const {
    int g = 0;
    for (size_t i = 0; i < gens_.size(); ++i) g = i ? std::max(g, gens_[i].grade) : gens_[i].grade;
    return g;
}

std::vector<int> ComplexDatum::basis(int grade) const {
    std::vector<int> b;
    for (size_t i = 0; i < gens_.size(); ++i)
        if (gens_[i].grade == grade) b.push_back(static_cast<int>(i));
    return b;
}

std::vector<std::string> ComplexDatum::cpr_violations() const {
    std::vector<std::string> out;
    for (size_t q = 0; q < quads_.size(); ++q) {
        const auto& qd = quads_[q];
        if (edges_[qd.u].delta * edges_[qd.v].delta != edges_[qd.u2].delta * edges_[qd.v2].delta)
            out.push_back("quadruple " + std::to_string(q) + " violates the pairing identity");
    }
    return out;
}

std::map<int, IntMatrix> boundary_matrices(const ComplexDatum& c, bool twisted) {
    std::map<int, IntMatrix> out;
    if (c.generators().empty()) return out;
    std::vector<int> pos(c.generators().size());
    for (int g = c.min_grade(); g <= c.max_grade(); ++g) {
        const auto b = c.basis(g);
        for (size_t i = 0; i < b.size(); ++i) pos[b[i]] = static_cast<int>(i);
    }
    for (int k = c.min_grade() + 1; k <= c.max_grade(); ++k)
        out[k] = IntMatrix(static_cast<int>(c.basis(k - 1).size()), static_cast<int>(c.basis(k).size()));
    for (const auto& e : c.edges()) {
        const int s = c.index_of(e.src), t = c.index_of(e.tgt);
        out[c.generators()[s].grade](pos[t], pos[s]) += twisted ? e.eps * e.delta : e.eps;
    }
    return out;
}

bool check_boundary_squared(const ComplexDatum& c, bool twisted) {
    const auto d = boundary_matrices(c, twisted);
    for (const auto& [k, m] : d) {
        auto lower = d.find(k - 1);
        if (lower == d.end()) continue;
        if (!(lower->second * m).is_zero()) return false;
    }
    return true;
}

ComplexDatum gauge_by_signs(const ComplexDatum& c, const std::vector<int>& sign) {
    if (sign.size() != c.generators().size()) throw InputError("gauge: one sign per generator required");
    std::vector<Edge> edges = c.edges();
    for (auto& e : edges) {
        e.delta *= sign[c.index_of(e.src)] * sign[c.index_of(e.tgt)];
        e.delta_loop.reset();
    }
    return ComplexDatum(c.generators(), std::move(edges), c.quadruples());
}

ComplexDatum gauge_transform(const ComplexDatum& c, const std::map<std::string, SOLoop>& loops) {
    std::vector<int> sign;
    for (const auto& g : c.generators()) {
        auto it = loops.find(g.id);
        if (it == loops.end()) throw InputError("gauge_transform: missing loop for generator '" + g.id + "'");
        sign.push_back(delta_sign(it->second));
    }
    return gauge_by_signs(c, sign);
}

SmithForm smith_normal_form(IntMatrix m) {
    const int rows = m.rows(), cols = m.cols();
    std::vector<Integer> diag;
    for (int t = 0; t < std::min(rows, cols); ++t) {
        // smallest nonzero entry of the trailing block becomes the pivot
        int pr = -1, pc = -1;
        for (int i = t; i < rows; ++i)
            for (int j = t; j < cols; ++j)
                if (m(i, j) != 0 && (pr < 0 || abs_int(m(i, j)) < abs_int(m(pr, pc)))) {
                    pr = i;
                    pc = j;
                }
        if (pr < 0) break;
        for (;;) {
            for (int j = 0; j < cols; ++j) std::swap(m(t, j), m(pr, j));
            for (int i = 0; i < rows; ++i) std::swap(m(i, t), m(i, pc));
            bool clean = true;
            for (int i = t + 1; i < rows; ++i) {
                if (m(i, t) == 0) continue;
                const Integer q = m(i, t) / m(t, t);
                for (int j = t; j < cols; ++j) m(i, j) -= q * m(t, j);
                if (m(i, t) != 0) clean = false;
            }
            for (int j = t + 1; j < cols; ++j) {
                if (m(t, j) == 0) continue;
                const Integer q = m(t, j) / m(t, t);
                for (int i = t; i < rows; ++i) m(i, j) -= q * m(i, t);
                if (m(t, j) != 0) clean = false;
            }
            if (clean) break;
            pr = t;
            pc = t;
            for (int i = t + 1; i < rows; ++i)
                if (m(i, t) != 0 && abs_int(m(i, t)) < abs_int(m(pr, pc))) { pr = i; pc = t; }
            for (int j = t + 1; j < cols; ++j)
                if (m(t, j) != 0 && abs_int(m(t, j)) < abs_int(m(pr, pc))) { pr = t; pc = j; }
        }
        diag.push_back(abs_int(m(t, t)));
    }
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j) {
            const Integer g = boost::multiprecision::gcd(diag[i], diag[j]);
            const Integer l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    return SmithForm{diag};
}

const HomologyGroup& IntegerHomology::at(int degree) const {
    for (const auto& g : groups)
        if (g.degree == degree) return g;
    throw InputError("IntegerHomology: no group in degree " + std::to_string(degree));
}

IntegerHomology homology(const ComplexDatum& c, bool twisted) {
    if (!check_boundary_squared(c, twisted))
        throw InputError(std::string("homology: ") + (twisted ? "twisted" : "standard") +
                         " boundary does not square to zero");
    IntegerHomology h;
    if (c.generators().empty()) return h;
    const auto d = boundary_matrices(c, twisted);
    std::map<int, SmithForm> snf;
    for (const auto& [k, m] : d) snf[k] = smith_normal_form(m);
    for (int k = c.min_grade(); k <= c.max_grade(); ++k) {
        HomologyGroup g;
        g.degree = k;
        const int dim = static_cast<int>(c.basis(k).size());
        const int rk_out = snf.count(k) ? snf[k].rank() : 0;
        const int rk_in = snf.count(k + 1) ? snf[k + 1].rank() : 0;
        g.free_rank = dim - rk_out - rk_in;
        if (snf.count(k + 1))
            for (const auto& f : snf[k + 1].factors)
                if (f > 1) g.torsion.push_back(f);
        h.groups.push_back(g);
    }
    return h;
}

ChainMapReport verify_chain_map(const std::map<int, IntMatrix>& theta,
                                const std::map<int, IntMatrix>& source_boundary,
                                const ComplexDatum& target, bool twisted) {
    const auto tgt = boundary_matrices(target, twisted);
    ChainMapReport rep;
    for (const auto& [k, th] : theta) {
        const int dim = static_cast<int>(target.basis(k).size());
        if (th.rows() != dim)
            throw InputError("verify_chain_map: theta in degree " + std::to_string(k) + " has wrong row count");
        if (th.rows() != th.cols()) {
            rep.isomorphism = false;
        } else if (th.rows() > 0) {
            const auto s = smith_normal_form(th);
            if (s.rank() != th.rows() || s.factors.back() != 1) rep.isomorphism = false;
        }
    }
    for (const auto& [k, ds] : source_boundary) {
        auto hi = theta.find(k), lo = theta.find(k - 1);
        if (hi == theta.end() || lo == theta.end())
            throw InputError("verify_chain_map: theta missing around degree " + std::to_string(k));
        if (ds.cols() != hi->second.cols() || ds.rows() != lo->second.cols())
            throw InputError("verify_chain_map: source boundary in degree " + std::to_string(k) +
                             " does not match theta");
        IntMatrix dt(lo->second.rows(), hi->second.rows());
        if (auto it = tgt.find(k); it != tgt.end()) dt = it->second;
        IntMatrix defect = lo->second * ds - dt * hi->second;
        if (!defect.is_zero()) {
            rep.commutes = false;
            rep.defects[k] = defect;
        }
    }
    // target boundaries with no source counterpart must vanish on the image of theta
    for (const auto& [k, dt] : tgt) {
        if (source_boundary.count(k)) continue;
        auto hi = theta.find(k);
        if (hi == theta.end()) continue;
        IntMatrix defect = dt * hi->second;
        if (!defect.is_zero()) {
            rep.commutes = false;
            rep.defects[k] = IntMatrix(defect.rows(), defect.cols()) - defect;
        }
    }
    return rep;
}

std::optional<std::vector<int>> find_coboundary(const ComplexDatum& c) {
    const int g = static_cast<int>(c.generators().size());
    if (g > 20) throw InputError("find_coboundary: too many generators for exhaustive search");
    std::vector<std::pair<int, int>> ends;
    for (const auto& e : c.edges()) ends.emplace_back(c.index_of(e.src), c.index_of(e.tgt));
    for (unsigned long mask = 0; mask < (1ul << g); ++mask) {
        auto sg = [&](int i) { return (mask >> i) & 1ul ? -1 : 1; };
        bool ok = true;
        for (size_t e = 0; e < ends.size() && ok; ++e)
            ok = c.edges()[e].delta == sg(ends[e].first) * sg(ends[e].second);
        if (ok) {
            std::vector<int> s(g);
            for (int i = 0; i < g; ++i) s[i] = sg(i);
            return s;
        }
    }
    return std::nullopt;
}

ComplexDatum random_broken_pair_datum(std::mt19937_64& rng, bool coboundary_delta) {
    std::uniform_int_distribution<int> one_two(1, 2), mult(0, 2), coin(0, 1);
    auto sign = [&] { return coin(rng) ? 1 : -1; };

    std::vector<Generator> gens;
    auto add = [&](const std::string& id, int grade) {
        gens.push_back({id, grade, std::nullopt});
        return static_cast<int>(gens.size()) - 1;
    };
    struct Pair { int a, b, sigma; };
    std::vector<int> top, bottom;
    std::vector<Pair> p2, p1;
    for (int i = 0, n = one_two(rng); i < n; ++i) top.push_back(add("x" + std::to_string(i), 3));
    for (int i = 0, n = one_two(rng); i < n; ++i)
        p2.push_back({add("y" + std::to_string(i), 2), add("y" + std::to_string(i) + "'", 2), sign()});
    for (int i = 0, n = one_two(rng); i < n; ++i)
        p1.push_back({add("w" + std::to_string(i), 1), add("w" + std::to_string(i) + "'", 1), sign()});
    for (int i = 0, n = one_two(rng); i < n; ++i) bottom.push_back(add("z" + std::to_string(i), 0));

    std::vector<Edge> edges;
    auto edge = [&](int s, int t, int eps, int delta) {
        edges.push_back({gens[s].id, gens[t].id, eps, delta, std::nullopt});
        return static_cast<int>(edges.size()) - 1;
    };
    // out[g]: edges leaving g; twin_out[e] / twin_in[e]: partner edge through the twin
    std::map<int, int> twin_out, twin_in;
    for (int x : top)
        for (const auto& y : p2)
            for (int m = mult(rng); m > 0; --m) {
                const int eps = sign(), d = sign();
                const int e = edge(x, y.a, eps, d);
                const int e2 = edge(x, y.b, eps, y.sigma * d);
                twin_in[e] = e2;
            }
    for (const auto& y : p2)
        for (const auto& w : p1)
            for (int m = mult(rng); m > 0; --m) {
                const int eps = sign(), d = sign();
                const int e = edge(y.a, w.a, eps, d);
                const int e_in = edge(y.a, w.b, eps, w.sigma * d);
                const int e_out = edge(y.b, w.a, -eps, y.sigma * d);
                const int e_both = edge(y.b, w.b, -eps, y.sigma * w.sigma * d);
                twin_out[e] = e_out;
                twin_out[e_in] = e_both;
                twin_in[e] = e_in;
                twin_in[e_out] = e_both;
            }
    for (const auto& w : p1)
        for (int z : bottom)
            for (int m = mult(rng); m > 0; --m) {
                const int eps = sign(), d = sign();
                const int e = edge(w.a, z, eps, d);
                const int e2 = edge(w.b, z, -eps, w.sigma * d);
                twin_out[e] = e2;
            }

    // pair each broken trajectory through an unprimed middle generator with
    // its partner through the twin
    std::vector<Quadruple> quads;
    std::set<std::string> unprimed_mid;
    for (const auto& y : p2) unprimed_mid.insert(gens[y.a].id);
    for (const auto& w : p1) unprimed_mid.insert(gens[w.a].id);
    std::map<std::string, std::string> twin_of;
    for (const auto& y : p2) twin_of[gens[y.a].id] = gens[y.b].id;
    for (const auto& w : p1) twin_of[gens[w.a].id] = gens[w.b].id;
    for (int u = 0; u < static_cast<int>(edges.size()); ++u) {
        if (!unprimed_mid.count(edges[u].tgt)) continue;
        for (int v = 0; v < static_cast<int>(edges.size()); ++v) {
            if (edges[v].src != edges[u].tgt) continue;
            auto iu = twin_in.find(u);
            auto ov = twin_out.find(v);
            if (iu == twin_in.end() || ov == twin_out.end()) continue;
            quads.push_back({u, v, iu->second, ov->second});
        }
    }

    if (coboundary_delta) {
        std::map<std::string, int> c;
        for (const auto& g : gens) c[g.id] = sign();
        for (auto& e : edges) e.delta = c[e.src] * c[e.tgt];
    }
    // some deltas are handed over as SO(2) loops of matching parity
    for (auto& e : edges)
        if (coin(rng) && coin(rng)) {
            const int turns = (e.delta == 1 ? 2 : 1) * sign();
            e.delta_loop = SOLoop::plane_rotation(2, turns, 0, 1, 64);
        }
    return ComplexDatum(std::move(gens), std::move(edges), std::move(quads));
}

}  // namespace cr_orient
