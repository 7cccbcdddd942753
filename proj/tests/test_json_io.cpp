#include "doctest.h"

#include "cr_orient/json_io.hpp"
#include "cr_orient/suite.hpp"

#include <cstdio>
#include <fstream>

using namespace cr_orient;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
    const std::string path = std::string("/tmp/cr_orient_test_") + name;
    std::ofstream(path) << text;
    return path;
}

bool mentions(const std::vector<SchemaIssue>& is, const std::string& what) {
    for (const auto& i : is)
        if (i.message.find(what) != std::string::npos || i.pointer.find(what) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("line tracking points at the offending value") {
    const std::string text = "{\n  \"a\": 1,\n  \"b\": [\n    2,\n    {\"c\": 3}\n  ]\n}\n";
    const JsonDocument d = parse_json_text(text);
    CHECK(d.line_of("/a") == 2);
    CHECK(d.line_of("/b/0") == 4);
    CHECK(d.line_of("/b/1/c") == 5);
    CHECK(d.line_of("/b/1/missing") == 5);
}

TEST_CASE("malformed JSON reports the line") {
    try {
        parse_json_text("{\n  \"a\": 1,\n  \"b\": ]\n}\n", "x.json");
        FAIL("accepted malformed JSON");
    } catch (const SchemaError& e) {
        REQUIRE(e.issues.size() == 1);
        CHECK(e.issues[0].line == 3);
    }
}

TEST_CASE("symmetric loops: constant, named, samples") {
    auto l1 = parse_symmetric_loop(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"symmetric_loop","n":1,"constant":[[1,2],[2,3]]})"));
    CHECK(l1.is_constant());
    CHECK(l1(0.3)(0, 1) == 2.0);
    auto l2 = parse_symmetric_loop(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"symmetric_loop","n":2,"named":"minus_pi_I"})"));
    CHECK(l2(0.0)(3, 3) == doctest::Approx(-pi));
    auto l3 = parse_symmetric_loop(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"symmetric_loop","n":1,"samples":[[[1,0],[0,1]],[[3,0],[0,3]]]})"));
    CHECK(l3(0.25)(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("schema errors are collected, never partially accepted") {
    try {
        parse_symmetric_loop(parse_json_text(
            R"({"schema":"cr-orient/2","kind":"symmetric_loop","n":1,"samples":[[[1,5],[0,1]],[[1,0]],[[1,0],[0,"x"]]]})"));
        FAIL("accepted");
    } catch (const SchemaError& e) {
        CHECK(e.issues.size() >= 4);
        CHECK(mentions(e.issues, "unsupported schema"));
        CHECK(mentions(e.issues, "sample 0 is not symmetric"));
        CHECK(mentions(e.issues, "/samples/1"));
        CHECK(mentions(e.issues, "/samples/2/1/1"));
    }
}

TEST_CASE("operator fields") {
    auto t = parse_operator_field(parse_json_text(R"({"schema":"cr-orient/1","kind":"operator_field","named":"T_r","r":0.25})"));
    CHECK(t.n() == 2);
    CHECK((t(0.1, 0.2) - build_T_r(0.25)(0.1, 0.2)).norm() == 0.0);
    CHECK_THROWS_AS(parse_operator_field(parse_json_text(
                        R"({"schema":"cr-orient/1","kind":"operator_field","named":"T_r","r":1.5})")),
                    SchemaError);
    auto c = parse_operator_field(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"operator_field","named":"conjugated","u":"W",
            "base":{"named":"minus_pi_I","n":2}})"));
    CHECK((c(0.3, 0.7) - build_T_r(0.0)(0.3, 0.7)).cwiseAbs().maxCoeff() < 1e-12);
    auto f = parse_operator_field(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"operator_field","domain":"full",
            "s_minus":{"n":1,"named":"minus_pi_I"},"s_plus":{"n":1,"named":"minus_3pi_I"}})"));
    CHECK(f.domain() == Domain::full);
    auto s = parse_operator_field(parse_json_text(
        R"({"schema":"cr-orient/1","kind":"operator_field","n":1,"s":[0,1],
            "values":[[[[-3,0],[0,-3]]],[[[-3.14159,0],[0,-3.14159]]]]})"));
    CHECK(s(0.5, 0.1)(0, 0) == doctest::Approx(-3.070795));
    CHECK(s.asymptotic_at(1.0));
}

TEST_CASE("SO loops and complex data") {
    auto w = parse_so_loop(parse_json_text(R"({"schema":"cr-orient/1","kind":"so_loop","named":"W_boundary"})"));
    CHECK(winding_number(w) == 1);
    auto d = parse_complex_datum(parse_json_text(R"({"schema":"cr-orient/1","kind":"complex_datum",
        "generators":[{"id":"x","grade":1},{"id":"y","grade":0}],
        "edges":[{"src":"x","tgt":"y","eps":1,"delta":1},
                 {"src":"x","tgt":"y","eps":1,"delta_loop":{"named":"plane_rotation","turns":1}}]})"));
    CHECK(d.edges()[1].delta == -1);
    CHECK(homology(d, true).at(0).free_rank == 1);
}

TEST_CASE("validate_input examples") {
    const auto ok = validate_input(temp_file("ok.json", R"({"schema":"cr-orient/1","kind":"complex_datum",
        "generators":[{"id":"x","grade":1},{"id":"y","grade":0}],"edges":[{"src":"x","tgt":"y","eps":1,"delta":1}]})"));
    CHECK(ok.ok);
    CHECK(ok.kind == "complex_datum");

    const auto gap = validate_input(temp_file("gap.json", "{\"schema\":\"cr-orient/1\",\"kind\":\"complex_datum\",\n"
        "\"generators\":[{\"id\":\"x\",\"grade\":2},{\"id\":\"y\",\"grade\":0}],\n"
        "\"edges\":[\n{\"src\":\"x\",\"tgt\":\"y\",\"eps\":1,\"delta\":1}]}"));
    CHECK_FALSE(gap.ok);
    CHECK_FALSE(gap.io_error);
    REQUIRE(gap.issues.size() == 1);
    CHECK(gap.issues[0].message.find("edge 0") != std::string::npos);
    CHECK(gap.issues[0].message.find("grade gap 2") != std::string::npos);
    CHECK(gap.issues[0].line == 4);

    const auto orth = validate_input(temp_file("orth.json", R"({"schema":"cr-orient/1","kind":"so_loop","n":2,
        "samples":[[[1,0],[0,1]],[[0,-1],[1,0]],[[2,0],[0,1]],[[0,1],[-1,0]]]})"));
    CHECK_FALSE(orth.ok);
    REQUIRE(orth.issues.size() == 1);
    CHECK(orth.issues[0].pointer == "/samples/2");
    CHECK(orth.issues[0].message.find("sample 2") != std::string::npos);

    const auto io = validate_input("/tmp/cr_orient_test_does_not_exist.json");
    CHECK_FALSE(io.ok);
    CHECK(io.io_error);
}

TEST_CASE("suite configuration") {
    auto cfg = parse_suite_config(parse_json_text(R"({"schema":"cr-orient/1","kind":"suite_config",
        "resolution":{"K":8,"L":4,"Ns":64},"transport_grid":8})"));
    CHECK(cfg.resolution.K == 8);
    CHECK(cfg.transport_grid == 8);
    CHECK_THROWS_AS(parse_suite_config(parse_json_text(
                        R"({"schema":"cr-orient/1","kind":"suite_config","resolution":{"K":2,"L":8,"Ns":200}})")),
                    SchemaError);
    CHECK_THROWS_AS(suite_criteria("bogus"), InputError);
    CHECK(suite_criteria("all").size() == 9);
}

TEST_CASE("fast suites pass and reports are deterministic") {
    SuiteConfig cfg;
    const auto a = run_suite("complex", cfg, 7);
    const auto b = run_suite("complex", cfg, 7);
    CHECK(a.all_pass());
    CHECK(report_json(a).dump() == report_json(b).dump());
    CHECK(report_json(a).dump().find("runtime") == std::string::npos);
    const auto s = run_suite("spin", cfg, 0);
    CHECK(s.all_pass());
    CHECK(run_criterion(6, cfg, 0).pass);
}
