#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bnsim/network.hpp"
#include "bnsim/trace.hpp"

namespace bnsim {

// D = Σ min(p, 1−p) style dependence score with its simulation multiple
// SM = 1/D. SM is +infinity when D = 0 (never a large sentinel).
struct DependenceReport {
    std::string subject;  // "A-B" for an arc, node name otherwise
    std::string method;   // pairwise | blanket-formula | worst-case-flip
    double dependence = 0.0;
    double simulation_multiple = 0.0;  // may be +inf

    bool infinite_multiple() const;
};

// Arc dependence for a two-node-style link: `from` must be `to`'s only parent
// and both variables binary. D = Σ over the parent's values of
// min(P(to=TRUE | value), P(to=FALSE | value)).
DependenceReport pairwise_dependence(const BeliefNetwork& net, int from, int to);

// Markov-blanket extension, binary networks. The linking probabilities around
// a node are the rows of its blanket factors: its own CPT (one per parent
// configuration) and each child's CPT (one per configuration of that child's
// parents, which include the node). D sums, over the joint row space of all
// factors, the product of one min(p, 1−p) term per factor. Reduces exactly to
// pairwise_dependence on two-node networks, from either end of the arc. A
// node with no linking factor at all falls back to min(p, 1−p) of its prior.
DependenceReport blanket_dependence(const BeliefNetwork& net, int node);

inline constexpr std::size_t kBlanketConfigBudget = std::size_t{1} << 20;

// Smallest per-update move probability the clamped simulator can encounter at
// this node: min over evidence-consistent blanket configurations of
// (1 − max value probability) of the blanket conditional. Configurations with
// a degenerate conditional count as 0 — the sampler cannot move there at all.
double worst_case_flip_probability(const BeliefNetwork& net, int node,
                                   const Assignment& evidence);

// Maximal constant-value run lengths of one node's trace column, in sweeps.
struct SojournStats {
    struct PerValue {
        std::string label;
        std::size_t completed_runs = 0;
        double mean_length = 0.0;  // over completed runs; NaN when none
        std::size_t max_length = 0;
        // Length of the final (censored) run when it ended with this value.
        std::size_t censored_length = 0;
    };
    std::vector<PerValue> per_value;

    const PerValue& for_label(const std::string& label) const;
};

SojournStats sojourn_statistics(const SampleTrace& trace, const std::string& node);

// Integrated autocorrelation time of the {node == value} indicator series,
// estimated with the initial-positive-sequence truncation of the
// autocorrelation sum. Returns nothing for a constant series. Clamped below
// at 1 (the i.i.d. value); this is the empirical simulation multiple.
std::optional<double> integrated_autocorrelation_time(const SampleTrace& trace,
                                                      const std::string& node,
                                                      const std::string& value);
std::optional<double> integrated_autocorrelation_time(const std::vector<double>& series);

// Running-frequency error of one query value against the exact answer.
struct ConvergenceProfile {
    std::vector<double> running_estimate;  // index t = frequency over sweeps 1..t+1
    double truth = 0.0;
    double epsilon = 0.0;
    // 1-based first sweep from which |estimate − truth| < epsilon holds to the
    // end of the run; 0 when the run never settles.
    std::size_t entry_sweep = 0;

    void write_csv(std::ostream& out) const;  // sweep,estimate,error
};

ConvergenceProfile convergence_profile(const SampleTrace& trace, const std::string& node,
                                       const std::string& value, double truth, double epsilon);

// One row of the dependence-vs-mixing curve for the symmetric two-node family
// P(a) = 0.5, P(b|a) = 1−q, P(b|¬a) = q.
struct SmSweepRow {
    double q = 0.0;
    double dependence = 0.0;           // 2q
    double predicted_multiple = 0.0;   // 1/(2q)
    double measured_tau = 0.0;         // averaged over runs
    std::size_t runs = 0;
};

struct SmSweepOptions {
    std::size_t runs_per_point = 3;
    // 0 = auto: ceil(1000/q) sweeps per run.
    std::size_t sweeps_per_run = 0;
    std::uint64_t seed = 1;
};

std::vector<SmSweepRow> sm_sweep(const std::vector<double>& q_grid,
                                 const SmSweepOptions& options = {});

// CSV with header q,D,SM_pred,tau_hat,runs.
void write_sm_sweep_csv(std::ostream& out, const std::vector<SmSweepRow>& rows);

}  // namespace bnsim
