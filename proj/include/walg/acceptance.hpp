#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace walg {

struct CriterionResult {
    int index;
    std::string name;
    bool passed;
    double seconds;
    std::string detail;
};

/// Runs the full acceptance suite, streaming one line per criterion.
std::vector<CriterionResult> run_acceptance(std::ostream &out);

bool all_passed(const std::vector<CriterionResult> &results);

} // namespace walg
