#pragma once

#include <string>
#include <vector>

#include "bnsim/network.hpp"

namespace bnsim {

struct TransformCost {
    std::size_t cpt_entries_created = 0;
    std::size_t arcs_added = 0;

    TransformCost& operator+=(const TransformCost& o) {
        cpt_entries_created += o.cpt_entries_created;
        arcs_added += o.arcs_added;
        return *this;
    }
};

struct TransformStep {
    enum class Kind { Prune, Reverse, Reduce };
    Kind kind;
    std::vector<std::string> operands;  // reverse: {from, to}; reduce: {node};
                                        // prune: removed variables
    TransformCost cost;
};

// Replayable record of a transformation pipeline.
struct TransformPlan {
    std::vector<TransformStep> steps;
    std::string input_digest;           // digest of the serialized input network
    std::vector<std::string> evidence;  // J, variable names
    std::vector<std::string> queries;   // K
    TransformCost total_cost;

    std::string to_json() const;
    static TransformPlan from_json(const std::string& text);
};

struct PruneResult {
    BeliefNetwork network;
    std::vector<std::string> removed;  // declaration order
};

// Removes every variable with no directed path into J ∪ K (each node reaches
// itself). P(K | J) on the result equals P(K | J) on the input.
PruneResult prune(const BeliefNetwork& net, const std::vector<int>& evidence_vars,
                  const std::vector<int>& query_vars);

// Bayes-rule reversal of the arc from→to. Both endpoints inherit the other's
// parents; the joint distribution over all variables is unchanged. Refuses
// when another directed path from→to exists (the reversal would create a
// cycle), naming the path.
BeliefNetwork reverse_arc(const BeliefNetwork& net, int from, int to,
                          TransformCost* cost = nullptr);

// Marginalizes a single-child variable out of the network by folding its CPT
// into the child's. Refuses when the node has 0 or ≥ 2 children.
BeliefNetwork reduce_node(const BeliefNetwork& net, int node,
                          TransformCost* cost = nullptr);

struct AbsorbResult {
    BeliefNetwork network;
    TransformPlan plan;
};

// Reverses arcs into evidence variables until every evidence parent is
// evidence, then prunes against J ∪ K. The output accepts clamped forward
// sampling and preserves P(K | J). Evidence nodes are processed earliest-first
// in the current topological order; within one node, the latest non-evidence
// parent is reversed first (that arc never has an alternate path).
AbsorbResult absorb_evidence(const BeliefNetwork& net, const std::vector<int>& evidence_vars,
                             const std::vector<int>& query_vars);

// Re-applies a recorded plan to a network (digest is not re-checked).
BeliefNetwork apply_plan(const BeliefNetwork& net, const TransformPlan& plan);

// FNV-1a over the canonical serialization.
std::string network_digest(const BeliefNetwork& net);

}  // namespace bnsim
