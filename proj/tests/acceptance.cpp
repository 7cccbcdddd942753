// Acceptance gate: every criterion at its stated tolerance, one line each.

#include "cr_orient/suite.hpp"

#include <cstdio>
#include <iostream>

using namespace cr_orient;

int main() {
    const SuiteConfig cfg;
    int failed = 0;
    for (int k = 1; k <= 9; ++k) {
        const Check c = run_criterion(k, cfg, 0);
        failed += !c.pass;
        std::printf("%s criterion %d: %s (%.2f s)\n    %s\n", c.pass ? "PASS" : "FAIL", k, c.name.c_str(), c.runtime,
                    c.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
