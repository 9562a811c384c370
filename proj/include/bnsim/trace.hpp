#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bnsim/network.hpp"

namespace bnsim {

// Per-iteration record of a sampling run: full state, importance weight
// (1 for unweighted schemes), and whether the instance counts toward the
// estimate. Value indices refer to `value_labels`, so a trace is
// self-describing and survives CSV round trips without the network.
class SampleTrace {
  public:
    SampleTrace() = default;
    SampleTrace(std::string scheme, const BeliefNetwork& net);

    void reserve(std::size_t records);
    void append(std::span<const int> state, double weight, bool accepted);

    std::size_t record_count() const { return weights_.size(); }
    std::size_t variable_count() const { return variable_names_.size(); }

    int value(std::size_t record, std::size_t var) const {
        return states_[record * variable_names_.size() + var];
    }
    double weight(std::size_t record) const { return weights_[record]; }
    bool accepted(std::size_t record) const { return accepted_[record] != 0; }

    const std::string& scheme() const { return scheme_; }
    const std::vector<std::string>& variable_names() const { return variable_names_; }
    const std::vector<std::vector<std::string>>& value_labels() const { return value_labels_; }

    // -1 when absent.
    int variable_index(const std::string& name) const;
    int value_index(std::size_t var, const std::string& label) const;

    // Run parameters, recorded for reproducibility.
    std::uint64_t seed = 0;
    std::string generator_id;
    std::string evidence_desc;    // e.g. "E=TRUE" or "(empty)"
    std::vector<std::string> scan_order;    // gibbs schemes
    std::vector<int> initial_state;         // gibbs schemes

    // CSV: header `sweep,<var1>,...,<varN>,weight,accepted`, values as labels.
    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;
    static SampleTrace read_csv(std::istream& in);
    static SampleTrace read_csv_file(const std::string& path);

  private:
    std::string scheme_;
    std::vector<std::string> variable_names_;
    std::vector<std::vector<std::string>> value_labels_;
    std::vector<int> states_;  // record-major
    std::vector<double> weights_;
    std::vector<char> accepted_;
};

// Frequency estimates with scheme-appropriate uncertainty.
struct EstimateReport {
    std::string scheme;
    std::uint64_t seed = 0;

    std::vector<int> queries;
    std::vector<std::vector<double>> estimates;   // per query, per value
    std::vector<std::vector<double>> std_errors;  // same shape

    std::size_t n_requested = 0;  // simulations or sweeps asked for
    std::size_t n_used = 0;       // records contributing to the estimate
    double acceptance_rate = 1.0;
    double effective_sample_size = 0.0;

    // Gibbs bookkeeping.
    std::size_t state_changes = 0;
    bool fixated = false;  // ran > 0 sweeps without the state ever changing

    // False when nothing was accepted / all weights were zero.
    bool defined = true;
};

}  // namespace bnsim
