#pragma once

#include <cstdint>
#include <vector>

#include "bnsim/network.hpp"
#include "bnsim/rng.hpp"
#include "bnsim/trace.hpp"

namespace bnsim {

struct SamplerResult {
    EstimateReport report;
    SampleTrace trace;
};

// One forward simulation pass in topological order: each variable drawn from
// its CPT row given the already-drawn parents, by cumulative-threshold
// inversion in declared value order.
Assignment logic_sample(const BeliefNetwork& net, RngStream& rng);

// Forward sampling; instances that mismatch the evidence are recorded but
// rejected. Estimates are frequencies over accepted instances. Zero
// acceptances yield an undefined report, not an error.
SamplerResult rejection_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                 const std::vector<int>& queries, std::size_t n_simulations,
                                 RngStream& rng);

// Evidence variables are clamped during the forward pass; each instance is
// weighted by the product over evidence variables of P(observed | sampled
// parents). Estimates are weight-normalized frequencies.
SamplerResult likelihood_weighting_estimate(const BeliefNetwork& net,
                                            const Assignment& evidence,
                                            const std::vector<int>& queries,
                                            std::size_t n_simulations, RngStream& rng);

// Binary networks only: every variable (evidence included) is drawn uniformly,
// mismatching instances are discarded, and accepted instances carry weight
// joint_probability / 0.5^n. Expected acceptance is 2^-|evidence|.
SamplerResult uniform_proposal_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                        const std::vector<int>& queries,
                                        std::size_t n_simulations, RngStream& rng);

enum class GibbsInit {
    AllTrue,        // every unknown starts at its last declared value
    AllFalse,       // first declared value
    UniformRandom,  // uniform over each domain
    ForwardSample,  // topological walk with evidence clamped
};

struct GibbsOptions {
    GibbsInit init = GibbsInit::AllTrue;
    // Empty means topological order restricted to non-evidence variables.
    // Otherwise must be a permutation of the non-evidence variables.
    std::vector<int> scan_order;
    std::size_t burn_in = 0;   // sweeps run before recording starts
    bool rao_blackwell = false;  // average conditionals instead of indicators
};

// Clamped-network simulation: evidence variables stay fixed, every other
// variable is resampled in scan order from its conditional given the current
// state of its Markov blanket. Estimates cover all non-evidence variables with
// batch-means standard errors. Throws DegenerateConditionalError if some node
// has no value consistent with its neighbors, and PreconditionError when
// enumeration shows P(evidence) = 0.
SamplerResult gibbs_run(const BeliefNetwork& net, const Assignment& evidence,
                        std::size_t n_sweeps, RngStream& rng, const GibbsOptions& options = {});

// Variables whose CPT rows are all 0/1, grouped by connectivity: two
// functional variables belong together when one is a parent of the other.
struct DeterministicGroup {
    std::vector<int> members;
    std::vector<int> external_parents;   // parents of members outside the group
    std::vector<int> external_children;  // children of members outside the group
};

std::vector<DeterministicGroup> detect_deterministic_groups(const BeliefNetwork& net);

// Like gibbs_run, but each group is resampled jointly from its exact
// conditional given the joint Markov blanket. Non-grouped variables act as
// singletons; units are visited in topological order of their first member.
SamplerResult blocked_gibbs_run(const BeliefNetwork& net, const Assignment& evidence,
                                const std::vector<std::vector<int>>& groups,
                                std::size_t n_sweeps, RngStream& rng,
                                const GibbsOptions& options = {});

inline constexpr std::size_t kGroupConfigBudget = std::size_t{1} << 16;

// Forward sampling with evidence clamped. Requires every evidence variable's
// parents to be evidence as well (what absorb_evidence establishes); then
// every instance is usable and acceptance is exactly 1.
SamplerResult clamped_forward_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                       const std::vector<int>& queries, std::size_t n_simulations,
                                       RngStream& rng);

}  // namespace bnsim
