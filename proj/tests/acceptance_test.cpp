// Acceptance gate: runs every criterion at its stated tolerance (identically
// zero, exact arithmetic) and prints one pass/fail line per criterion.
#include "walg/acceptance.hpp"

#include <iostream>

int main() {
    auto results = walg::run_acceptance(std::cout);
    int failed = 0;
    for (const auto &r : results)
        if (!r.passed)
            ++failed;
    if (failed) {
        std::cout << failed << " criteria failed" << std::endl;
        return 1;
    }
    std::cout << "all " << results.size() << " criteria passed" << std::endl;
    return 0;
}
