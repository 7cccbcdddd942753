// cr-orient: command-line front end.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or schema error.

#include "cr_orient/json_io.hpp"
#include "cr_orient/orientation.hpp"
#include "cr_orient/suite.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cr_orient;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::string json_out;
    std::string resolution;
};

std::optional<Discretization> parse_resolution(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::stringstream in(s);
    std::string k, l, ns;
    if (!std::getline(in, k, ',') || !std::getline(in, l, ',') || !std::getline(in, ns) || ns.find(',') != std::string::npos)
        throw InputError("--resolution expects K,L,Ns");
    Discretization d;
    try {
        d = Discretization{std::stoi(k), std::stod(l), std::stoi(ns)};
    } catch (const std::exception&) {
        throw InputError("--resolution expects K,L,Ns with numeric entries");
    }
    d.validate();
    return d;
}

void emit(const Options& o, json j) {
    j["schema"] = schema_tag;
    if (o.json_out.empty()) return;
    const std::string text = j.dump(2) + "\n";
    if (o.json_out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(o.json_out);
    if (!out) throw IoError("cannot write " + o.json_out);
    out << text;
}

JsonDocument config_doc(const Options& o) {
    if (o.config.empty()) throw InputError("--config is required");
    return load_json_file(o.config);
}

Discretization resolution_or(const Options& o, const Discretization& d) {
    auto r = parse_resolution(o.resolution);
    return r ? *r : d;
}

int cmd_cz(const Options& o, int steps) {
    const auto loop = parse_symmetric_loop(config_doc(o));
    const auto path = integrate_symplectic_path(loop, steps);
    const int mu = conley_zehnder_index(path).value;
    std::cout << "mu_CZ = " << mu << "  (" << CZIndex::convention << ")\n";
    emit(o, {{"kind", "cz"}, {"mu_cz", mu}, {"steps", steps}, {"symplecticity_defect", symplecticity_defect(path)}});
    return 0;
}

json kernel_json(const KernelAnalysis& an) {
    return {{"kernel_dim", an.kernel.dim()},
            {"cokernel_dim", an.cokernel.cols()},
            {"gap_ratio", an.kernel.gap_ratio},
            {"singular_values", an.kernel.singular},
            {"left_singular_values", an.left_singular}};
}

int cmd_kernel(const Options& o) {
    const auto field = parse_operator_field(config_doc(o));
    const auto disc = resolution_or(o, Discretization{});
    const auto op = assemble(field, disc);
    const auto an = analyze_kernel(op);
    std::cout << "kernel dim " << an.kernel.dim() << ", cokernel dim " << an.cokernel.cols() << ", gap "
              << an.kernel.gap_ratio << "\n";
    json j = kernel_json(an);
    j["kind"] = "kernel";
    j["rows"] = op.rows();
    j["cols"] = op.cols();
    emit(o, j);
    return 0;
}

int cz_of(const SymmetricLoop& l) { return conley_zehnder_index(integrate_symplectic_path(l, 1024)).value; }

int cmd_index(const Options& o) {
    const auto field = parse_operator_field(config_doc(o));
    const auto disc = resolution_or(o, Discretization{});
    const auto op = assemble(field, disc);
    const auto an = analyze_kernel(op);
    const int expected = field.domain() == Domain::half ? -cz_of(field.s_plus())
                                                        : cz_of(field.s_minus()) - cz_of(field.s_plus());
    const bool ok = an.index() == expected;
    std::cout << "index " << an.index() << " (kernel " << an.kernel.dim() << ", cokernel " << an.cokernel.cols()
              << "), predicted from CZ " << expected << (ok ? "  PASS" : "  FAIL") << "\n";
    json j = kernel_json(an);
    j["kind"] = "index";
    j["index"] = an.index();
    j["predicted"] = expected;
    j["pass"] = ok;
    emit(o, j);
    return ok ? 0 : 1;
}

json transport_json(const TransportResult& r) {
    return {{"sign", r.sign}, {"dim", r.dim}, {"taus", r.taus}, {"step_dets", r.step_dets}, {"min_abs_det", r.min_abs_det}};
}

int cmd_transport(const Options& o, const std::string& field, int grid, int bisect) {
    const auto disc = resolution_or(o, Discretization{});
    OperatorPath path;
    if (field == "T_r") path = OperatorPath{[](double tau) { return build_T_r(tau); }, "T_r"};
    else if (field == "minus_pi_I")
        path = OperatorPath{[](double) { return OperatorField::constant(-pi * Mat::Identity(4, 4), Domain::half); },
                            "constant"};
    else throw InputError("--field must be T_r or minus_pi_I");
    const auto r = transport_orientation(path, disc, TransportOptions{grid, bisect});
    std::cout << "transport along " << field << ": sign " << r.sign << ", kernel dim " << r.dim << ", min |det| "
              << r.min_abs_det << " over " << r.step_dets.size() << " steps\n";
    json j = transport_json(r);
    j["kind"] = "transport";
    j["field"] = field;
    emit(o, j);
    return 0;
}

int cmd_conjugation(const Options& o, const std::string& u, const std::string& base, int n, int grid, int bisect) {
    const auto disc = resolution_or(o, Discretization{});
    double c;
    if (base == "minus_pi_I") c = -1.0;
    else if (base == "minus_3pi_I") c = -3.0;
    else throw InputError("--base must be minus_pi_I or minus_3pi_I");
    const UnitaryField uf = named_unitary_field(u, n);
    const int predicted = predict_sign(uf);
    const auto r = conjugation_sign(uf, OperatorField::constant(c * pi * Mat::Identity(2 * n, 2 * n), Domain::half),
                                    disc, TransportOptions{grid, bisect});
    const bool ok = r.sign == predicted;
    std::cout << "conjugation by " << u << ": sign " << r.sign << ", predicted " << predicted
              << (ok ? "  PASS" : "  FAIL") << "\n";
    json j = transport_json(r.transport);
    j["kind"] = "conjugation";
    j["u"] = u;
    j["sign"] = r.sign;
    j["predicted"] = predicted;
    j["pushforward_residual"] = r.pushforward_residual;
    j["pass"] = ok;
    emit(o, j);
    return ok ? 0 : 1;
}

int cmd_spin(const Options& o) {
    const auto loop = parse_so_loop(config_doc(o));
    const auto lr = lifts_to_spin(loop);
    json j{{"kind", "spin"}, {"n", loop.n()}, {"lifts", lr.lifts}};
    std::cout << "n " << loop.n() << ": " << (lr.lifts ? "lifts" : "does not lift") << " to Spin";
    if (lr.winding) {
        std::cout << ", winding " << *lr.winding;
        j["winding"] = *lr.winding;
    }
    std::cout << "\n";
    emit(o, j);
    return 0;
}

json homology_json(const IntegerHomology& h) {
    json a = json::array();
    for (const auto& g : h.groups) {
        json t = json::array();
        for (const auto& x : g.torsion) t.push_back(x.str());
        a.push_back({{"degree", g.degree}, {"free_rank", g.free_rank}, {"torsion", t}});
    }
    return a;
}

std::string homology_text(const IntegerHomology& h) {
    std::ostringstream o;
    for (const auto& g : h.groups) {
        o << "  H_" << g.degree << " = ";
        bool first = true;
        if (g.free_rank) {
            o << "Z^" << g.free_rank;
            first = false;
        }
        for (const auto& t : g.torsion) {
            o << (first ? "" : " + ") << "Z/" << t;
            first = false;
        }
        if (first) o << "0";
        o << "\n";
    }
    return o.str();
}

int cmd_complex(const Options& o) {
    const auto d = parse_complex_datum(config_doc(o));
    const bool sq = check_boundary_squared(d, false), sqt = check_boundary_squared(d, true);
    const auto viol = d.cpr_violations();
    json j{{"kind", "complex"}, {"d_squared_zero", sq}, {"twisted_d_squared_zero", sqt}, {"pairing_violations", viol}};
    std::cout << "d^2 = 0: " << (sq ? "yes" : "no") << ", twisted d^2 = 0: " << (sqt ? "yes" : "no") << "\n";
    for (const auto& v : viol) std::cout << "  violation: " << v << "\n";
    if (sq) {
        const auto h = homology(d, false);
        std::cout << "standard homology\n" << homology_text(h);
        j["homology"] = homology_json(h);
    }
    if (sqt) {
        const auto h = homology(d, true);
        std::cout << "twisted homology\n" << homology_text(h);
        j["twisted_homology"] = homology_json(h);
    }
    emit(o, j);
    return sq && sqt ? 0 : 1;
}

int cmd_suite(const Options& o, const std::string& name) {
    SuiteConfig cfg;
    if (!o.config.empty()) cfg = parse_suite_config(load_json_file(o.config));
    if (auto r = parse_resolution(o.resolution)) cfg.resolution = *r;
    suite_criteria(name);  // reject unknown names before running anything
    const SuiteReport rep = run_suite(name, cfg, o.seed);
    std::cout << report_text(rep);
    emit(o, report_json(rep));
    return rep.all_pass() ? 0 : 1;
}

int cmd_validate(const Options& o, const std::string& path) {
    const ValidationReport r = validate_input(path);
    if (r.ok) std::cout << path << ": ok (" << r.kind << ")\n";
    else if (r.io_error) std::cerr << path << ": io error: " << r.issues.front().message << "\n";
    else std::cerr << format_issues(path, r.issues) << "\n";
    json issues = json::array();
    for (const auto& i : r.issues) issues.push_back({{"pointer", i.pointer}, {"line", i.line}, {"message", i.message}});
    emit(o, {{"kind", "validation"}, {"ok", r.ok}, {"io_error", r.io_error}, {"input_kind", r.kind}, {"issues", issues}});
    return r.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orientation checks for Cauchy-Riemann operators on half-cylinders"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sc, bool config) {
        if (config) sc->add_option("--config", o.config, "input JSON")->check(CLI::ExistingFile);
        sc->add_option("--seed", o.seed, "64-bit seed for random data");
        sc->add_option("--json", o.json_out, "write a JSON report (\"-\" for stdout)");
        sc->add_option("--resolution", o.resolution, "K,L,Ns");
    };

    int steps = 1024;
    auto* cz = app.add_subcommand("cz", "Conley-Zehnder index of a symmetric loop");
    common(cz, true);
    cz->add_option("--steps", steps)->check(CLI::Range(16, 1 << 20));

    auto* kernel = app.add_subcommand("kernel", "numerical kernel of a discretized operator");
    common(kernel, true);
    auto* index = app.add_subcommand("index", "Fredholm index against -CZ");
    common(index, true);

    auto* orient = app.add_subcommand("orient", "orientation transport");
    orient->require_subcommand(1);
    std::string field = "T_r", u = "W", base = "minus_pi_I";
    int grid = 64, bisect = 0, n = 2;
    auto* transport = orient->add_subcommand("transport", "transport a kernel frame along a path");
    common(transport, false);
    transport->add_option("--field", field, "T_r or minus_pi_I");
    transport->add_option("--grid", grid)->check(CLI::Range(1, 100000));
    transport->add_option("--bisections", bisect)->check(CLI::Range(0, 20));
    auto* conj = orient->add_subcommand("conjugation", "sign of u -> U u against transport");
    common(conj, false);
    conj->add_option("--u", u, "I, W, W2, W+I, V, VW");
    conj->add_option("--base", base, "minus_pi_I or minus_3pi_I");
    conj->add_option("--n", n)->check(CLI::Range(1, 8));
    conj->add_option("--grid", grid)->check(CLI::Range(1, 100000));
    conj->add_option("--bisections", bisect)->check(CLI::Range(0, 20));

    auto* spin = app.add_subcommand("spin", "winding and Spin lift of an SO(n) loop");
    common(spin, true);
    auto* complex = app.add_subcommand("complex", "standard and twisted homology of a complex datum");
    common(complex, true);

    std::string suite_name = "all";
    auto* suite = app.add_subcommand("suite", "run an acceptance battery");
    common(suite, true);
    suite->add_option("name", suite_name, "kernels, index, orientation, spin, complex, all");

    std::string vpath;
    auto* validate = app.add_subcommand("validate", "schema-check an input file");
    common(validate, false);
    validate->add_option("path", vpath)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cz) return cmd_cz(o, steps);
        if (*kernel) return cmd_kernel(o);
        if (*index) return cmd_index(o);
        if (*transport) return cmd_transport(o, field, grid, bisect);
        if (*conj) return cmd_conjugation(o, u, base, n, grid, bisect);
        if (*spin) return cmd_spin(o);
        if (*complex) return cmd_complex(o);
        if (*suite) return cmd_suite(o, suite_name);
        if (*validate) return cmd_validate(o, vpath);
    } catch (const SchemaError& e) {
        std::cerr << "schema error:\n" << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
