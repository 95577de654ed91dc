// Runs acceptance criteria 1-8 and prints one pass/fail line each; nonzero exit on any failure.
#include "suite.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    const unsigned seed = argc > 1 ? static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10)) : 1u;
    bool all = true;
    for (const auto& r : degmap::suite::run(seed)) {
        std::cout << degmap::suite::format_line(r, true) << std::endl;
        all = all && r.ok;
    }
    std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
    return all ? 0 : 1;
}
