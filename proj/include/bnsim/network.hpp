#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bnsim/errors.hpp"

namespace bnsim {

// A discrete variable. Binary variables use the canonical value order
// [FALSE, TRUE], so "probability of TRUE" is always the last entry of a row.
struct Variable {
    std::string name;
    std::vector<std::string> values;

    bool is_binary() const {
        return values.size() == 2 && values[0] == "FALSE" && values[1] == "TRUE";
    }
};

// Conditional probability table prior to index resolution: child/parents by name.
// rows[i] is the distribution over child values for the i-th parent
// configuration, row-major over the declared parent order (first parent is the
// most significant digit, each parent counting in declared value order).
struct CptSpec {
    std::string child;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;
};

// Unvalidated network content, exactly what the file format carries.
struct NetworkSpec {
    std::vector<Variable> variables;
    std::vector<CptSpec> cpts;
};

struct Finding {
    enum class Severity { Warning, Error };
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool ok() const { return !has_errors(); }
    bool has_errors() const {
        for (const auto& f : findings)
            if (f.severity == Finding::Severity::Error) return true;
        return false;
    }
    std::size_t warning_count() const {
        std::size_t n = 0;
        for (const auto& f : findings)
            if (f.severity == Finding::Severity::Warning) ++n;
        return n;
    }
};

// Thrown when building a network from a spec with error findings.
struct ValidationError : Error {
    ValidationError(std::string what, ValidationReport rep)
        : Error(std::move(what)), report(std::move(rep)) {}
    ValidationReport report;
};

// Index-resolved CPT. child/parents are variable indices.
struct Cpt {
    int child = -1;
    std::vector<int> parents;
    std::vector<std::vector<double>> rows;
};

// Row sums within this distance of 1 are normalized with a warning;
// larger deviations are validation errors.
inline constexpr double kRowSumTolerance = 1e-9;

// A (possibly partial) value assignment, dense over one network's variables.
// -1 marks "unassigned".
class Assignment {
  public:
    Assignment() = default;
    explicit Assignment(std::size_t n_variables) : values_(n_variables, -1) {}

    int operator[](int var) const { return values_[static_cast<std::size_t>(var)]; }
    void set(int var, int value) { values_[static_cast<std::size_t>(var)] = value; }
    void clear(int var) { values_[static_cast<std::size_t>(var)] = -1; }
    bool assigned(int var) const { return values_[static_cast<std::size_t>(var)] >= 0; }

    std::size_t size() const { return values_.size(); }
    bool total() const {
        for (int v : values_)
            if (v < 0) return false;
        return true;
    }
    std::size_t assigned_count() const {
        std::size_t n = 0;
        for (int v : values_)
            if (v >= 0) ++n;
        return n;
    }
    bool empty_assignment() const { return assigned_count() == 0; }

    std::span<const int> raw() const { return values_; }

    friend bool operator==(const Assignment&, const Assignment&) = default;

  private:
    std::vector<int> values_;
};

// Immutable belief network: a DAG of discrete variables with one CPT per
// variable. Construction validates and normalizes; afterwards the object is
// safe to share across threads.
class BeliefNetwork {
  public:
    // Validates, normalizes near-miss row sums, derives children lists and the
    // topological order. Throws ValidationError if the spec has error findings.
    explicit BeliefNetwork(const NetworkSpec& spec);

    std::size_t variable_count() const { return variables_.size(); }
    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(int i) const { return variables_[static_cast<std::size_t>(i)]; }
    const Cpt& cpt(int i) const { return cpts_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& parents(int i) const { return cpts_[static_cast<std::size_t>(i)].parents; }
    const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& topological_order() const { return topo_order_; }

    // -1 when the name is unknown.
    int index_of(const std::string& name) const;
    // Throws PreconditionError on unknown names/values.
    int require_variable(const std::string& name) const;
    int require_value(int var, const std::string& value_label) const;

    std::size_t domain_size(int i) const { return variables_[static_cast<std::size_t>(i)].values.size(); }
    bool all_binary() const;
    // Product of all domain sizes, saturating at 2^62.
    std::size_t joint_state_count() const;

    // Row index of var's CPT under the given (at least parent-covering) assignment.
    std::size_t cpt_row_index(int var, const Assignment& a) const;
    std::size_t cpt_row_index(int var, std::span<const int> full_state) const;
    const std::vector<double>& cpt_row(int var, const Assignment& a) const;

    // True when every row of var's CPT is 0/1: the variable is a deterministic
    // function of its parents.
    bool is_functional(int var) const;

    NetworkSpec to_spec() const;

    // Warnings recorded while building (row-sum normalizations).
    const ValidationReport& build_report() const { return build_report_; }

  private:
    std::vector<Variable> variables_;
    std::vector<Cpt> cpts_;  // cpts_[i].child == i
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_order_;
    std::map<std::string, int> index_;
    ValidationReport build_report_;
};

// Structural and numeric checks on an unvalidated spec. Findings are data;
// this never throws.
ValidationReport validate(const NetworkSpec& spec);
inline ValidationReport validate(const BeliefNetwork& net) { return validate(net.to_spec()); }

// JSON file format front end.
NetworkSpec parse_network_spec(const std::string& text);          // syntax only
BeliefNetwork parse_network(const std::string& text);             // parse + validate
std::string serialize_network(const BeliefNetwork& net);          // full precision
BeliefNetwork load_network_file(const std::string& path);

// Product of the CPT entries selected by a total assignment.
double joint_probability(const BeliefNetwork& net, const Assignment& full);
double joint_probability(const BeliefNetwork& net, std::span<const int> full_state);

// Topological order with parents before children; within a level, declaration
// order. (Level = longest path from a root, so all roots come first.)
std::vector<int> topological_order(const BeliefNetwork& net);

// "A=TRUE,B=FALSE" -> Assignment. Rejects unknown names/values and
// contradictory repeats.
Assignment parse_assignment(const BeliefNetwork& net, const std::string& text);
// "A,B,C" -> indices.
std::vector<int> parse_variable_list(const BeliefNetwork& net, const std::string& text);

std::string describe_assignment(const BeliefNetwork& net, const Assignment& a);

}  // namespace bnsim
