// Acceptance suite: runs every benchmark criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <cstring>
#include <iostream>

#include "bnsim/repro.hpp"

int main(int argc, char** argv) {
    bnsim::ReproOptions options;
    options.fixtures_dir = BNSIM_FIXTURES_DIR;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            options.filter = argv[++i];
        } else if (std::strcmp(argv[i], "--fixtures") == 0 && i + 1 < argc) {
            options.fixtures_dir = argv[++i];
        } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            options.seed = std::strtoull(argv[++i], nullptr, 10);
        } else {
            std::cerr << "usage: acceptance [--only SUBSTRING] [--fixtures DIR] [--seed N]\n";
            return 2;
        }
    }
    const auto results = bnsim::run_repro(options);
    if (results.empty()) {
        std::cerr << "no criteria matched\n";
        return 2;
    }
    return bnsim::print_repro_table(std::cout, results) ? 0 : 1;
}
