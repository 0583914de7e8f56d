// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [AC1 AC5 ...]

#include <iostream>
#include <string>
#include <vector>

#include "orbitchaos/cli/acceptance.hpp"

int main(int argc, char** argv) {
    using namespace orbitchaos::cli;
    std::vector<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& id : only.empty() ? criterion_ids() : only) {
        const auto r = run_criterion(id, AcceptanceOptions{});
        std::cout << format_result(r) << std::endl;
        failed += !r.passed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
