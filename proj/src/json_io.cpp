#include "cr_orient/json_io.hpp"

#include "cr_orient/analytic_oracles.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <sstream>

namespace cr_orient {

using nlohmann::json;

std::string format_issues(const std::string& source, const std::vector<SchemaIssue>& issues) {
    std::ostringstream out;
    for (size_t i = 0; i < issues.size(); ++i) {
        if (i) out << '\n';
        out << source << ':' << issues[i].line << ": " << (issues[i].pointer.empty() ? "/" : issues[i].pointer)
            << ": " << issues[i].message;
    }
    return out.str();
}

SchemaError::SchemaError(const std::string& source, std::vector<SchemaIssue> is)
    : InputError(format_issues(source, is)), issues(std::move(is)) {}

int JsonDocument::line_of(const std::string& pointer) const {
    // nearest recorded ancestor
    std::string p = pointer;
    for (;;) {
        if (auto it = lines.find(p); it != lines.end()) return it->second;
        if (p.empty()) return 1;
        p.erase(p.rfind('/'));
    }
}

namespace {

// Input iterator over a string that counts newlines as the parser consumes them.
class LineCountingIterator {
public:
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    LineCountingIterator() = default;
    LineCountingIterator(const char* p, std::shared_ptr<int> line) : p_(p), line_(std::move(line)) {}
    reference operator*() const { return *p_; }
    LineCountingIterator& operator++() {
        if (*p_ == '\n') ++*line_;
        ++p_;
        return *this;
    }
    LineCountingIterator operator++(int) {
        auto tmp = *this;
        ++*this;
        return tmp;
    }
    bool operator==(const LineCountingIterator& o) const { return p_ == o.p_; }
    bool operator!=(const LineCountingIterator& o) const { return p_ != o.p_; }

private:
    const char* p_ = nullptr;
    std::shared_ptr<int> line_;
};

std::string escape_token(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

struct Frame {
    bool array = false;
    int index = 0;
    std::string key;
};

std::string path_of(const std::vector<Frame>& stack) {
    std::string p;
    for (const auto& f : stack) p += "/" + (f.array ? std::to_string(f.index) : escape_token(f.key));
    return p;
}

}  // namespace

JsonDocument parse_json_text(const std::string& text, const std::string& source) {
    JsonDocument doc;
    doc.source = source;
    auto line = std::make_shared<int>(1);
    std::vector<Frame> stack;
    auto cb = [&](int, json::parse_event_t ev, json& parsed) {
        using E = json::parse_event_t;
        switch (ev) {
        case E::key:
            if (!stack.empty()) stack.back().key = parsed.get<std::string>();
            break;
        case E::object_start:
        case E::array_start:
            doc.lines.emplace(path_of(stack), *line);
            stack.push_back(Frame{ev == E::array_start, 0, {}});
            break;
        case E::object_end:
        case E::array_end:
            if (!stack.empty()) stack.pop_back();
            if (!stack.empty() && stack.back().array) ++stack.back().index;
            break;
        case E::value:
            doc.lines.emplace(path_of(stack), *line);
            if (!stack.empty() && stack.back().array) ++stack.back().index;
            break;
        }
        return true;
    };
    try {
        LineCountingIterator first(text.data(), line), last(text.data() + text.size(), line);
        doc.value = json::parse(first, last, cb);
    } catch (const json::parse_error& e) {
        throw SchemaError(source, {SchemaIssue{"", *line, std::string("malformed JSON: ") + e.what()}});
    }
    return doc;
}

JsonDocument load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("cannot read " + path);
    return parse_json_text(text, path);
}

namespace {

// Collects issues while walking a document.
class Checker {
public:
    explicit Checker(const JsonDocument& d) : doc_(d) {}

    void issue(const std::string& ptr, const std::string& msg) {
        issues_.push_back(SchemaIssue{ptr, doc_.line_of(ptr), msg});
    }
    bool ok() const { return issues_.empty(); }
    void throw_if_any() const {
        if (!issues_.empty()) throw SchemaError(doc_.source, issues_);
    }
    const std::vector<SchemaIssue>& issues() const { return issues_; }

    const json* at(const std::string& ptr) const {
        try {
            return &doc_.value.at(json::json_pointer(ptr));
        } catch (const json::exception&) {
            return nullptr;
        }
    }
    const json* object(const std::string& ptr) {
        const json* v = at(ptr);
        if (!v) issue(ptr, "missing object");
        else if (!v->is_object()) {
            issue(ptr, "expected an object");
            return nullptr;
        }
        return v;
    }
    std::optional<double> number(const std::string& ptr, bool required = true) {
        const json* v = at(ptr);
        if (!v) {
            if (required) issue(ptr, "missing number");
            return std::nullopt;
        }
        if (!v->is_number()) {
            issue(ptr, "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            issue(ptr, "number is not finite");
            return std::nullopt;
        }
        return x;
    }
    std::optional<long long> integer(const std::string& ptr, bool required = true) {
        const json* v = at(ptr);
        if (!v) {
            if (required) issue(ptr, "missing integer");
            return std::nullopt;
        }
        if (!v->is_number_integer()) {
            issue(ptr, "expected an integer");
            return std::nullopt;
        }
        return v->get<long long>();
    }
    std::optional<std::string> string(const std::string& ptr, bool required = true) {
        const json* v = at(ptr);
        if (!v) {
            if (required) issue(ptr, "missing string");
            return std::nullopt;
        }
        if (!v->is_string()) {
            issue(ptr, "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }
    std::optional<Mat> matrix(const std::string& ptr, int size) {
        const json* v = at(ptr);
        if (!v || !v->is_array()) {
            issue(ptr, "expected a matrix (array of rows)");
            return std::nullopt;
        }
        const int rows = static_cast<int>(v->size());
        if (size > 0 && rows != size) {
            issue(ptr, "expected " + std::to_string(size) + " rows, got " + std::to_string(rows));
            return std::nullopt;
        }
        Mat m(rows, rows);
        bool good = true;
        for (int i = 0; i < rows; ++i) {
            const json& row = (*v)[i];
            const std::string rp = ptr + "/" + std::to_string(i);
            if (!row.is_array() || static_cast<int>(row.size()) != rows) {
                issue(rp, "row must hold " + std::to_string(rows) + " numbers");
                good = false;
                continue;
            }
            for (int j = 0; j < rows; ++j) {
                if (!row[j].is_number()) {
                    issue(rp + "/" + std::to_string(j), "expected a number");
                    good = false;
                } else {
                    m(i, j) = row[j].get<double>();
                }
            }
        }
        if (!good) return std::nullopt;
        return m;
    }
    void header(const std::string& ptr, const std::string& kind, bool top) {
        if (top) {
            const auto s = string(ptr + "/schema");
            if (s && *s != schema_tag) issue(ptr + "/schema", "unsupported schema \"" + *s + "\", expected cr-orient/1");
        }
        const auto k = string(ptr + "/kind", top);
        if (k && *k != kind) issue(ptr + "/kind", "expected kind \"" + kind + "\", got \"" + *k + "\"");
    }

private:
    const JsonDocument& doc_;
    std::vector<SchemaIssue> issues_;
};

Mat scalar_matrix(double c, int n) { return c * pi * Mat::Identity(2 * n, 2 * n); }

std::optional<Mat> named_scalar(Checker& ck, const std::string& ptr, const std::string& name, int n) {
    if (name == "minus_pi_I") return scalar_matrix(-1.0, n);
    if (name == "minus_3pi_I") return scalar_matrix(-3.0, n);
    if (name == "plus_pi_I") return scalar_matrix(1.0, n);
    ck.issue(ptr, "unknown named loop \"" + name + "\"");
    return std::nullopt;
}

bool symmetric(const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()); }

std::optional<SymmetricLoop> loop_in(Checker& ck, const std::string& ptr, bool top) {
    if (!ck.object(ptr)) return std::nullopt;
    ck.header(ptr, "symmetric_loop", top);
    const auto n = ck.integer(ptr + "/n");
    if (n && (*n < 1 || *n > 16)) ck.issue(ptr + "/n", "n must lie in 1..16");
    if (!n || *n < 1 || *n > 16) return std::nullopt;
    const int dim = 2 * static_cast<int>(*n);
    const bool has_c = ck.at(ptr + "/constant"), has_s = ck.at(ptr + "/samples"), has_n = ck.at(ptr + "/named");
    if (has_c + has_s + has_n != 1) {
        ck.issue(ptr, "exactly one of \"constant\", \"samples\", \"named\" is required");
        return std::nullopt;
    }
    if (has_n) {
        const auto name = ck.string(ptr + "/named");
        if (!name) return std::nullopt;
        auto m = named_scalar(ck, ptr + "/named", *name, static_cast<int>(*n));
        if (!m) return std::nullopt;
        return SymmetricLoop::constant(*m);
    }
    if (has_c) {
        auto m = ck.matrix(ptr + "/constant", dim);
        if (!m) return std::nullopt;
        if (!symmetric(*m)) {
            ck.issue(ptr + "/constant", "matrix is not symmetric");
            return std::nullopt;
        }
        return SymmetricLoop::constant(*m);
    }
    const json* arr = ck.at(ptr + "/samples");
    if (!arr->is_array() || arr->size() < 2) {
        ck.issue(ptr + "/samples", "expected at least two samples");
        return std::nullopt;
    }
    std::vector<Mat> samples;
    bool good = true;
    for (size_t i = 0; i < arr->size(); ++i) {
        const std::string sp = ptr + "/samples/" + std::to_string(i);
        auto m = ck.matrix(sp, dim);
        if (!m) {
            good = false;
            continue;
        }
        if (!symmetric(*m)) {
            ck.issue(sp, "sample " + std::to_string(i) + " is not symmetric");
            good = false;
            continue;
        }
        samples.push_back(*m);
    }
    if (!good) return std::nullopt;
    return SymmetricLoop::sampled(std::move(samples));
}

// sampled coefficient on a tensor grid: values[i][j] = S(s_i, j / t_count)
std::optional<OperatorField> sampled_field(Checker& ck, const std::string& ptr, int n) {
    const json* sg = ck.at(ptr + "/s");
    const json* vals = ck.at(ptr + "/values");
    if (!sg || !sg->is_array() || sg->size() < 2) {
        ck.issue(ptr + "/s", "expected an increasing array of at least two s values starting at 0");
        return std::nullopt;
    }
    std::vector<double> s;
    for (size_t i = 0; i < sg->size(); ++i) {
        auto x = ck.number(ptr + "/s/" + std::to_string(i));
        if (!x) return std::nullopt;
        if ((i == 0 && *x != 0.0) || (i > 0 && *x <= s.back())) {
            ck.issue(ptr + "/s/" + std::to_string(i), "s grid must start at 0 and increase");
            return std::nullopt;
        }
        s.push_back(*x);
    }
    if (!vals || !vals->is_array() || vals->size() != s.size()) {
        ck.issue(ptr + "/values", "expected one row of t-samples per s value");
        return std::nullopt;
    }
    std::vector<std::vector<Mat>> grid(s.size());
    size_t tcount = 0;
    bool good = true;
    for (size_t i = 0; i < s.size(); ++i) {
        const std::string rp = ptr + "/values/" + std::to_string(i);
        const json* row = ck.at(rp);
        if (!row->is_array() || row->empty() || (tcount && row->size() != tcount)) {
            ck.issue(rp, "every row needs the same positive number of t-samples");
            good = false;
            continue;
        }
        tcount = row->size();
        for (size_t j = 0; j < row->size(); ++j) {
            auto m = ck.matrix(rp + "/" + std::to_string(j), 2 * n);
            if (!m) {
                good = false;
                continue;
            }
            grid[i].push_back(*m);
        }
    }
    if (!good) return std::nullopt;
    std::vector<Mat> last = grid.back();
    for (size_t j = 0; j < last.size(); ++j)
        if (!symmetric(last[j])) {
            ck.issue(ptr + "/values/" + std::to_string(s.size() - 1) + "/" + std::to_string(j),
                     "asymptotic samples must be symmetric");
            return std::nullopt;
        }
    const SymmetricLoop plus = last.size() == 1 ? SymmetricLoop::constant(last[0]) : SymmetricLoop::sampled(last);
    auto coeff = [grid, s](double x, double t) -> Mat {
        const int m = static_cast<int>(grid[0].size());
        auto at_row = [&](size_t i) -> Mat {
            if (m == 1) return grid[i][0];
            const double u = (t - std::floor(t)) * m;
            const int k = static_cast<int>(std::floor(u)) % m;
            const double w = u - std::floor(u);
            return (1 - w) * grid[i][k] + w * grid[i][(k + 1) % m];
        };
        if (x <= s.front()) return at_row(0);
        if (x >= s.back()) return at_row(s.size() - 1);
        const size_t i = static_cast<size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) - 1;
        const double w = (x - s[i]) / (s[i + 1] - s[i]);
        return (1 - w) * at_row(i) + w * at_row(i + 1);
    };
    return OperatorField::half(n, coeff, plus, s.back(), "sampled");
}

std::optional<OperatorField> field_in(Checker& ck, const std::string& ptr, bool top) {
    if (!ck.object(ptr)) return std::nullopt;
    ck.header(ptr, "operator_field", top);
    const auto named = ck.string(ptr + "/named", false);
    const auto dom = ck.string(ptr + "/domain", false);
    if (dom && *dom != "half" && *dom != "full") ck.issue(ptr + "/domain", "domain must be \"half\" or \"full\"");
    const Domain d = (dom && *dom == "full") ? Domain::full : Domain::half;
    if (named) {
        if (*named == "T_r") {
            const auto r = ck.number(ptr + "/r");
            if (r && (*r < 0.0 || *r > 1.0)) ck.issue(ptr + "/r", "r must lie in [0, 1]");
            if (!r || *r < 0.0 || *r > 1.0) return std::nullopt;
            return build_T_r(*r);
        }
        if (*named == "conjugated") {
            const auto u = ck.string(ptr + "/u");
            auto base = field_in(ck, ptr + "/base", false);
            if (!u || !base) return std::nullopt;
            try {
                return conjugated_field(named_unitary_field(*u, base->n()), *base);
            } catch (const InputError& e) {
                ck.issue(ptr + "/u", e.what());
                return std::nullopt;
            }
        }
        const auto n = ck.integer(ptr + "/n");
        if (!n || *n < 1 || *n > 16) {
            if (n) ck.issue(ptr + "/n", "n must lie in 1..16");
            return std::nullopt;
        }
        auto m = named_scalar(ck, ptr + "/named", *named, static_cast<int>(*n));
        if (!m) return std::nullopt;
        return OperatorField::constant(*m, d);
    }
    if (ck.at(ptr + "/constant")) {
        const auto n = ck.integer(ptr + "/n");
        if (!n || *n < 1 || *n > 16) return std::nullopt;
        auto m = ck.matrix(ptr + "/constant", 2 * static_cast<int>(*n));
        if (!m) return std::nullopt;
        if (!symmetric(*m)) {
            ck.issue(ptr + "/constant", "a constant coefficient is its own asymptotic loop and must be symmetric");
            return std::nullopt;
        }
        return OperatorField::constant(*m, d);
    }
    if (ck.at(ptr + "/s_plus")) {
        auto plus = loop_in(ck, ptr + "/s_plus", false);
        if (d == Domain::full) {
            auto minus = loop_in(ck, ptr + "/s_minus", false);
            if (!plus || !minus) return std::nullopt;
            if (plus->n() != minus->n()) {
                ck.issue(ptr + "/s_minus", "dimension differs from s_plus");
                return std::nullopt;
            }
            return interpolating_field(*minus, *plus);
        }
        if (!plus) return std::nullopt;
        const SymmetricLoop p = *plus;
        return OperatorField::half(p.n(), [p](double, double t) { return p(t); }, p, 0.0, "loop");
    }
    if (ck.at(ptr + "/values")) {
        const auto n = ck.integer(ptr + "/n");
        if (!n || *n < 1 || *n > 16) return std::nullopt;
        return sampled_field(ck, ptr, static_cast<int>(*n));
    }
    ck.issue(ptr, "operator_field needs \"named\", \"constant\", \"s_plus\" or sampled \"values\"");
    return std::nullopt;
}

std::optional<Discretization> disc_in(Checker& ck, const std::string& ptr) {
    if (!ck.object(ptr)) return std::nullopt;
    const auto k = ck.integer(ptr + "/K");
    const auto l = ck.number(ptr + "/L");
    const auto ns = ck.integer(ptr + "/Ns");
    if (!k || !l || !ns) return std::nullopt;
    Discretization d{static_cast<int>(*k), *l, static_cast<int>(*ns)};
    try {
        d.validate();
    } catch (const InputError& e) {
        ck.issue(ptr, e.what());
        return std::nullopt;
    }
    return d;
}

std::optional<SOLoop> so_in(Checker& ck, const std::string& ptr, bool top) {
    if (!ck.object(ptr)) return std::nullopt;
    ck.header(ptr, "so_loop", top);
    if (const auto named = ck.string(ptr + "/named", false)) {
        const auto turns = ck.integer(ptr + "/turns", false).value_or(1);
        const auto n = ck.integer(ptr + "/n", false).value_or(2);
        if (n < 2 || n > 8) {
            ck.issue(ptr + "/n", "n must lie in 2..8");
            return std::nullopt;
        }
        if (*named == "plane_rotation") return SOLoop::plane_rotation(static_cast<int>(n), static_cast<int>(turns));
        if (*named == "W_boundary") {
            SOLoop w = SOLoop::plane_rotation(2, 1);
            return n == 2 ? w : w.embedded(static_cast<int>(n));
        }
        ck.issue(ptr + "/named", "unknown named loop \"" + *named + "\"");
        return std::nullopt;
    }
    const auto n = ck.integer(ptr + "/n");
    if (!n) return std::nullopt;
    if (*n < 1 || *n > 8) {
        ck.issue(ptr + "/n", "n must lie in 1..8 (Clifford dimension cap)");
        return std::nullopt;
    }
    const json* arr = ck.at(ptr + "/samples");
    if (!arr || !arr->is_array() || arr->size() < 3) {
        ck.issue(ptr + "/samples", "expected at least three samples");
        return std::nullopt;
    }
    std::vector<Mat> samples;
    bool good = true;
    for (size_t i = 0; i < arr->size(); ++i) {
        const std::string sp = ptr + "/samples/" + std::to_string(i);
        auto m = ck.matrix(sp, static_cast<int>(*n));
        if (!m) {
            good = false;
            continue;
        }
        const double orth = (m->transpose() * *m - Mat::Identity(*n, *n)).cwiseAbs().maxCoeff();
        if (orth > 1e-8) {
            ck.issue(sp, "sample " + std::to_string(i) + " is not orthogonal (defect " + std::to_string(orth) + ")");
            good = false;
        } else if (m->determinant() < 0) {
            ck.issue(sp, "sample " + std::to_string(i) + " has determinant -1");
            good = false;
        }
        samples.push_back(*m);
    }
    if (!good) return std::nullopt;
    try {
        return SOLoop::sampled(std::move(samples));
    } catch (const InputError& e) {
        ck.issue(ptr + "/samples", e.what());
        return std::nullopt;
    }
}

std::optional<ComplexDatum> complex_in(Checker& ck, const std::string& ptr, bool top) {
    if (!ck.object(ptr)) return std::nullopt;
    ck.header(ptr, "complex_datum", top);
    const json* gens = ck.at(ptr + "/generators");
    const json* edges = ck.at(ptr + "/edges");
    if (!gens || !gens->is_array()) ck.issue(ptr + "/generators", "expected an array of generators");
    if (!edges || !edges->is_array()) ck.issue(ptr + "/edges", "expected an array of edges");
    if (!ck.ok()) return std::nullopt;

    std::vector<Generator> gv;
    std::map<std::string, int> grade;
    for (size_t i = 0; i < gens->size(); ++i) {
        const std::string gp = ptr + "/generators/" + std::to_string(i);
        const auto id = ck.string(gp + "/id");
        const auto g = ck.integer(gp + "/grade");
        std::optional<SOLoop> loop;
        if (ck.at(gp + "/loop")) loop = so_in(ck, gp + "/loop", false);
        if (!id || !g) continue;
        if (grade.count(*id)) {
            ck.issue(gp + "/id", "duplicate generator id \"" + *id + "\"");
            continue;
        }
        grade[*id] = static_cast<int>(*g);
        gv.push_back(Generator{*id, static_cast<int>(*g), loop});
    }
    std::vector<Edge> ev;
    for (size_t i = 0; i < edges->size(); ++i) {
        const std::string ep = ptr + "/edges/" + std::to_string(i);
        const auto src = ck.string(ep + "/src");
        const auto tgt = ck.string(ep + "/tgt");
        const auto eps = ck.integer(ep + "/eps");
        const bool has_delta = ck.at(ep + "/delta"), has_loop = ck.at(ep + "/delta_loop");
        if (has_delta == has_loop) ck.issue(ep, "edge " + std::to_string(i) + " needs exactly one of \"delta\", \"delta_loop\"");
        std::optional<long long> delta;
        std::optional<SOLoop> dloop;
        if (has_delta) delta = ck.integer(ep + "/delta");
        if (has_loop) dloop = so_in(ck, ep + "/delta_loop", false);
        if (eps && *eps != 1 && *eps != -1) ck.issue(ep + "/eps", "edge " + std::to_string(i) + ": eps must be +1 or -1");
        if (delta && *delta != 1 && *delta != -1)
            ck.issue(ep + "/delta", "edge " + std::to_string(i) + ": delta must be +1 or -1");
        if (!src || !tgt) continue;
        const bool known = grade.count(*src) && grade.count(*tgt);
        if (!grade.count(*src)) ck.issue(ep + "/src", "edge " + std::to_string(i) + ": unknown generator \"" + *src + "\"");
        if (!grade.count(*tgt)) ck.issue(ep + "/tgt", "edge " + std::to_string(i) + ": unknown generator \"" + *tgt + "\"");
        if (known && grade[*src] - grade[*tgt] != 1)
            ck.issue(ep, "edge " + std::to_string(i) + " (" + *src + " -> " + *tgt + ") has grade gap " +
                             std::to_string(grade[*src] - grade[*tgt]) + ", expected 1");
        Edge e{*src, *tgt, static_cast<int>(eps.value_or(1)), static_cast<int>(delta.value_or(1)), dloop};
        ev.push_back(e);
    }
    std::vector<Quadruple> qv;
    if (const json* qs = ck.at(ptr + "/quadruples")) {
        if (!qs->is_array()) ck.issue(ptr + "/quadruples", "expected an array");
        else
            for (size_t i = 0; i < qs->size(); ++i) {
                const std::string qp = ptr + "/quadruples/" + std::to_string(i);
                const json& q = (*qs)[i];
                if (!q.is_array() || q.size() != 4) {
                    ck.issue(qp, "quadruple must list four edge indices");
                    continue;
                }
                int v[4];
                bool good = true;
                for (int k = 0; k < 4; ++k) {
                    if (!q[k].is_number_integer() || q[k].get<long long>() < 0 ||
                        q[k].get<long long>() >= static_cast<long long>(edges->size())) {
                        ck.issue(qp + "/" + std::to_string(k), "edge index out of range");
                        good = false;
                    } else {
                        v[k] = q[k].get<int>();
                    }
                }
                if (good) qv.push_back(Quadruple{v[0], v[1], v[2], v[3]});
            }
    }
    if (!ck.ok()) return std::nullopt;
    try {
        return ComplexDatum(std::move(gv), std::move(ev), std::move(qv));
    } catch (const InputError& e) {
        ck.issue(ptr, e.what());
        return std::nullopt;
    }
}

template <class T, class F>
T run_parser(const JsonDocument& doc, const std::string& ptr, F f) {
    Checker ck(doc);
    auto r = f(ck, ptr, ptr.empty());
    ck.throw_if_any();
    if (!r) throw SchemaError(doc.source, {SchemaIssue{ptr, doc.line_of(ptr), "rejected"}});
    return std::move(*r);
}

}  // namespace

SymmetricLoop parse_symmetric_loop(const JsonDocument& doc, const std::string& pointer) {
    return run_parser<SymmetricLoop>(doc, pointer, loop_in);
}

OperatorField parse_operator_field(const JsonDocument& doc, const std::string& pointer) {
    return run_parser<OperatorField>(doc, pointer, field_in);
}

Discretization parse_discretization(const JsonDocument& doc, const std::string& pointer) {
    return run_parser<Discretization>(doc, pointer, [](Checker& ck, const std::string& p, bool) { return disc_in(ck, p); });
}

SOLoop parse_so_loop(const JsonDocument& doc, const std::string& pointer) {
    return run_parser<SOLoop>(doc, pointer, so_in);
}

ComplexDatum parse_complex_datum(const JsonDocument& doc, const std::string& pointer) {
    return run_parser<ComplexDatum>(doc, pointer, complex_in);
}

UnitaryField named_unitary_field(const std::string& name, int n) {
    const UnitaryField w = w_field();
    auto need = [&](int m) {
        if (n != m) throw InputError("unitary field \"" + name + "\" acts on C^" + std::to_string(m));
    };
    if (name == "I") return identity_field(n);
    if (name == "W") return need(2), w;
    if (name == "W2") return need(2), pointwise_product(w, w);
    if (name == "W+I") return need(3), block_sum(w, identity_field(1));
    if (name == "V") return need(2), wobble_field();
    if (name == "VW") return need(2), pointwise_product(wobble_field(), w);
    throw InputError("unknown unitary field \"" + name + "\" (expected I, W, W2, W+I, V, VW)");
}

SuiteConfig parse_suite_config(const JsonDocument& doc) {
    Checker ck(doc);
    SuiteConfig cfg;
    if (ck.object("")) {
        ck.header("", "suite_config", true);
        if (ck.at("/resolution"))
            if (auto d = disc_in(ck, "/resolution")) cfg.resolution = *d;
        if (ck.at("/doubled"))
            if (auto d = disc_in(ck, "/doubled")) cfg.doubled = *d;
        if (auto g = ck.integer("/transport_grid", false)) {
            if (*g < 1 || *g > 4096) ck.issue("/transport_grid", "transport_grid must lie in 1..4096");
            else cfg.transport_grid = static_cast<int>(*g);
        }
        if (auto b = ck.integer("/battery_bisections", false)) {
            if (*b < 0 || *b > 12) ck.issue("/battery_bisections", "battery_bisections must lie in 0..12");
            else cfg.battery_bisections = static_cast<int>(*b);
        }
    }
    ck.throw_if_any();
    return cfg;
}

ValidationReport validate_input(const std::string& path) {
    ValidationReport rep;
    try {
        const JsonDocument doc = load_json_file(path);
        Checker ck(doc);
        const auto kind = ck.string("/kind");
        ck.throw_if_any();
        rep.kind = *kind;
        if (rep.kind == "symmetric_loop") parse_symmetric_loop(doc);
        else if (rep.kind == "operator_field") parse_operator_field(doc);
        else if (rep.kind == "so_loop") parse_so_loop(doc);
        else if (rep.kind == "complex_datum") parse_complex_datum(doc);
        else if (rep.kind == "suite_config") parse_suite_config(doc);
        else if (rep.kind == "discretization") {
            Checker c2(doc);
            c2.header("", "discretization", true);
            c2.throw_if_any();
            parse_discretization(doc);
        } else {
            throw SchemaError(path, {SchemaIssue{"/kind", doc.line_of("/kind"), "unknown kind \"" + rep.kind + "\""}});
        }
        rep.ok = true;
    } catch (const IoError& e) {
        rep.io_error = true;
        rep.issues.push_back(SchemaIssue{"", 0, e.what()});
    } catch (const SchemaError& e) {
        rep.issues = e.issues;
    } catch (const InputError& e) {
        rep.issues.push_back(SchemaIssue{"", 1, e.what()});
    }
    return rep;
}

}  // namespace cr_orient
