// Acceptance criteria shared by the acceptance binary and `degmap selftest`.
#pragma once

#include <string>
#include <vector>

namespace degmap::suite {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool ok = false;
    long checks = 0;
    long violations = 0;
    double seconds = 0;
    double limit = 0;  // wall-clock limit in seconds; exceeding it fails the criterion
    std::string detail;
};

/// Runs the requested criteria (all when empty) in order; deterministic for a fixed seed.
std::vector<CriterionResult> run(unsigned seed, const std::vector<int>& only = {});

/// One line per criterion; timings are omitted unless requested so output stays byte-stable.
std::string format_line(const CriterionResult& r, bool with_time);

}  // namespace degmap::suite
