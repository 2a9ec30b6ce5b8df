#pragma once

#include <string>
#include <vector>

namespace kinchem {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail; // measured margin, or the failure reason
};

/// Fast self-contained invariant suite covering every module: exact closed
/// forms, conservation laws, symmetry preservation, contraction bounds and
/// file round-trips. Each check is independent; an exception inside one is
/// reported as its failure.
std::vector<CheckResult> run_invariant_suite();

/// Prints one line per check plus a summary; returns true when all pass.
bool print_invariant_suite(const std::vector<CheckResult>& results);

} // namespace kinchem
