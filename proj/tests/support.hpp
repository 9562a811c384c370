#pragma once

// Shared helpers for the test binaries.

#include <string>

#include "bnsim/network.hpp"
#include "bnsim/rng.hpp"

namespace bnsim::test {

inline std::string fixture_path(const std::string& name) {
    return std::string(BNSIM_FIXTURES_DIR) + "/" + name;
}

inline BeliefNetwork fixture(const std::string& name) {
    return load_network_file(fixture_path(name));
}

// Random binary DAG with CPT entries in [0.05, 0.95]; arcs only from lower to
// higher indices.
inline BeliefNetwork random_binary_net(RngStream& rng, std::size_t n_vars,
                                       std::size_t max_parents = 3) {
    NetworkSpec spec;
    for (std::size_t i = 0; i < n_vars; ++i)
        spec.variables.push_back({"V" + std::to_string(i), {"FALSE", "TRUE"}});
    for (std::size_t i = 0; i < n_vars; ++i) {
        CptSpec c;
        c.child = spec.variables[i].name;
        for (std::size_t p = 0; p < i && c.parents.size() < max_parents; ++p)
            if (rng.next_unit() < 0.4) c.parents.push_back(spec.variables[p].name);
        for (std::size_t r = 0; r < (std::size_t{1} << c.parents.size()); ++r) {
            const double p = 0.05 + 0.9 * rng.next_unit();
            c.rows.push_back({1.0 - p, p});
        }
        spec.cpts.push_back(std::move(c));
    }
    return BeliefNetwork(spec);
}

}  // namespace bnsim::test
