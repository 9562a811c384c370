#pragma once

#include <vector>

#include "bnsim/network.hpp"

namespace bnsim {

// Exact inference is done by brute-force enumeration; this caps the number of
// joint states it will walk (about 22 binary variables).
inline constexpr std::size_t kEnumerationBudget = std::size_t{1} << 22;

struct PosteriorTable {
    std::vector<int> queries;
    std::vector<std::vector<double>> posteriors;  // aligned with queries
    double evidence_probability = 0.0;
    // False when P(evidence) == 0; posteriors are then meaningless zeros.
    bool defined = true;
};

struct MarkovBlanket {
    int node = -1;
    std::vector<int> parents;
    std::vector<int> children;
    std::vector<int> spouses;  // other parents of the node's children

    // Sorted union of the three sets.
    std::vector<int> members() const;
};

// A local conditional distribution. When `degenerate` is set every candidate
// value had probability zero and `probs` is the zero vector.
struct LocalConditional {
    std::vector<double> probs;
    bool degenerate = false;
};

// P(K | J) and P(J) by summing the full joint over all completions of the
// evidence. Throws BudgetError past kEnumerationBudget.
PosteriorTable exact_posteriors(const BeliefNetwork& net, const Assignment& evidence,
                                const std::vector<int>& queries);

MarkovBlanket markov_blanket(const BeliefNetwork& net, int node);
MarkovBlanket markov_blanket(const BeliefNetwork& net, const std::string& node);

// P(node | blanket state) ∝ P(node | parents) · Π_children P(child | parents).
// `others` must assign every blanket member; anything else it assigns is
// ignored (the blanket screens the node from the rest of the network).
LocalConditional blanket_conditional(const BeliefNetwork& net, int node,
                                     const Assignment& others);

// Joint conditional of a set of variables given the state of everything else:
// product of the members' CPTs and of every external child's CPT, normalized
// over member configurations (mixed-radix, first member most significant).
// `state` must assign every non-member variable that those CPTs touch.
LocalConditional group_conditional(const BeliefNetwork& net,
                                   const std::vector<int>& members,
                                   const Assignment& state);

// Transition matrix of one full systematic-scan sweep over the non-evidence
// variables: row s, column s' = probability the sweep maps free-state s to s'.
// States of zero posterior probability whose conditional degenerates keep
// their value (identity row), which never affects stationarity checks.
struct SweepKernel {
    std::vector<int> free_vars;     // declaration order
    std::vector<std::size_t> radix; // domain size per free var
    std::size_t state_count = 0;
    std::vector<double> matrix;     // row-major state_count × state_count

    double at(std::size_t row, std::size_t col) const {
        return matrix[row * state_count + col];
    }
    std::size_t index_of(std::span<const int> full_state) const;
    void decode(std::size_t index, Assignment& into) const;
};

// Budget: at most 2^12 free joint states.
inline constexpr std::size_t kKernelStateBudget = std::size_t{1} << 12;

SweepKernel gibbs_sweep_kernel(const BeliefNetwork& net, const Assignment& evidence,
                               const std::vector<int>& scan_order = {});

// Same, but updating whole groups jointly. Non-evidence variables not covered
// by a group act as singletons; units are visited in topological order of
// their first member.
SweepKernel blocked_sweep_kernel(const BeliefNetwork& net, const Assignment& evidence,
                                 const std::vector<std::vector<int>>& groups);

// Exact conditional joint over the kernel's free states (indexed identically).
std::vector<double> exact_free_joint(const BeliefNetwork& net, const Assignment& evidence);

// ‖πK − π‖∞ — zero (to rounding) when π is stationary for the kernel.
double stationarity_residual(const SweepKernel& kernel, const std::vector<double>& pi);

}  // namespace bnsim
