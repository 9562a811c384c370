#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bnsim {

// One benchmark criterion: the published quantity it reproduces, what was
// measured, and whether the measurement landed inside the stated tolerance.
struct CriterionResult {
    std::string id;
    std::string expected;
    std::string measured;
    bool pass = false;
    double seconds = 0.0;
};

struct ReproOptions {
    std::string fixtures_dir = "fixtures";
    std::string filter;  // substring match on the id; empty runs everything
    std::uint64_t seed = 20250810;
};

// Runs every criterion whose id contains the filter. Throws only on setup
// problems (missing fixtures); measurement failures are reported as pass=false.
std::vector<CriterionResult> run_repro(const ReproOptions& options);

// One line per criterion plus a summary; returns true when everything passed.
bool print_repro_table(std::ostream& out, const std::vector<CriterionResult>& results);

}  // namespace bnsim
