#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace plyap {

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Quick property checks over every module. Each check runs in well under a second.
std::vector<SelftestResult> run_selftest();

/// Prints one PASS/FAIL line per check and returns the number of failures.
int report_selftest(std::ostream& out);

}  // namespace plyap
