#pragma once

// JSON ingestion for the "cr-orient/1" schemas. Every parser collects all
// schema issues (JSON pointer plus source line) before rejecting.

#include "cr_orient/cr_operator.hpp"
#include "cr_orient/spin_lift.hpp"
#include "cr_orient/twisted_complex.hpp"

#include <json.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace cr_orient {

inline constexpr const char* schema_tag = "cr-orient/1";

struct SchemaIssue {
    std::string pointer;
    int line = 0;
    std::string message;
};

struct SchemaError : InputError {
    SchemaError(const std::string& source, std::vector<SchemaIssue> issues);
    std::vector<SchemaIssue> issues;
};

// file missing or unreadable; distinct from schema problems
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct JsonDocument {
    nlohmann::json value;
    std::string source;
    std::map<std::string, int> lines;  // JSON pointer -> line where the value ends
    int line_of(const std::string& pointer) const;
};

JsonDocument parse_json_text(const std::string& text, const std::string& source = "<input>");
JsonDocument load_json_file(const std::string& path);

// pointer selects a nested object ("" = document root)
SymmetricLoop parse_symmetric_loop(const JsonDocument& doc, const std::string& pointer = "");
OperatorField parse_operator_field(const JsonDocument& doc, const std::string& pointer = "");
Discretization parse_discretization(const JsonDocument& doc, const std::string& pointer = "");
SOLoop parse_so_loop(const JsonDocument& doc, const std::string& pointer = "");
ComplexDatum parse_complex_datum(const JsonDocument& doc, const std::string& pointer = "");

// "I" (needs n), "W", "W2", "W+I", "V", "VW"
UnitaryField named_unitary_field(const std::string& name, int n = 2);

struct SuiteConfig {
    Discretization resolution{16, 8.0, 200};
    Discretization doubled{32, 8.0, 400};
    int transport_grid = 16;
    int battery_bisections = 4;
};
SuiteConfig parse_suite_config(const JsonDocument& doc);

struct ValidationReport {
    bool ok = false;
    bool io_error = false;
    std::string kind;
    std::vector<SchemaIssue> issues;
};

// Dispatches on the top-level "kind"; never partially accepts.
ValidationReport validate_input(const std::string& path);

std::string format_issues(const std::string& source, const std::vector<SchemaIssue>& issues);

}  // namespace cr_orient
