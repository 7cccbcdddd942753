#pragma once

// Acceptance battery shared by the command-line tool and the test gate.

#include "cr_orient/json_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cr_orient {

struct Check {
    int criterion = 0;
    std::string name;
    std::string anchor;     // the mathematical statement being reproduced
    bool pass = false;
    double measured = 0.0;
    std::string tolerance;
    std::string detail;
    double runtime = 0.0;   // seconds; text report only
    double runtime_limit = 0.0;  // 0 = none
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    bool all_pass() const;
};

// criteria 1..9
Check run_criterion(int criterion, const SuiteConfig& cfg, std::uint64_t seed);

// "kernels", "index", "orientation", "spin", "complex", "all"
std::vector<int> suite_criteria(const std::string& name);
SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg, std::uint64_t seed);

// deterministic: no runtimes
nlohmann::json report_json(const SuiteReport& r);
std::string report_text(const SuiteReport& r);

}  // namespace cr_orient
