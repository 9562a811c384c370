#include "bnsim/trace.hpp"

#include <fstream>
#include <sstream>

#include "bnsim/errors.hpp"
#include "bnsim/format.hpp"

namespace bnsim {

SampleTrace::SampleTrace(std::string scheme, const BeliefNetwork& net)
    : scheme_(std::move(scheme)) {
    for (const Variable& v : net.variables()) {
        variable_names_.push_back(v.name);
        value_labels_.push_back(v.values);
    }
}

void SampleTrace::reserve(std::size_t records) {
    states_.reserve(records * variable_names_.size());
    weights_.reserve(records);
    accepted_.reserve(records);
}

void SampleTrace::append(std::span<const int> state, double weight, bool accepted) {
    states_.insert(states_.end(), state.begin(), state.end());
    weights_.push_back(weight);
    accepted_.push_back(accepted ? 1 : 0);
}

int SampleTrace::variable_index(const std::string& name) const {
    for (std::size_t i = 0; i < variable_names_.size(); ++i)
        if (variable_names_[i] == name) return static_cast<int>(i);
    return -1;
}

int SampleTrace::value_index(std::size_t var, const std::string& label) const {
    const auto& labels = value_labels_[var];
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    return -1;
}

void SampleTrace::write_csv(std::ostream& out) const {
    out << "sweep";
    for (const auto& n : variable_names_) out << ',' << n;
    out << ",weight,accepted\n";
    for (std::size_t r = 0; r < record_count(); ++r) {
        out << (r + 1);
        for (std::size_t v = 0; v < variable_names_.size(); ++v)
            out << ',' << value_labels_[v][static_cast<std::size_t>(value(r, v))];
        out << ',' << format_double(weights_[r]) << ',' << (accepted_[r] ? 1 : 0) << '\n';
    }
}

void SampleTrace::write_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trace file '" + path + "'");
    write_csv(out);
}

SampleTrace SampleTrace::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trace csv: empty file");
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    if (cols.size() < 3 || cols.front() != "sweep" || cols[cols.size() - 2] != "weight" ||
        cols.back() != "accepted")
        throw ParseError("trace csv: unexpected header '" + line + "'");

    SampleTrace t;
    t.scheme_ = "csv";
    t.variable_names_.assign(cols.begin() + 1, cols.end() - 2);
    t.value_labels_.resize(t.variable_names_.size());

    std::vector<int> state(t.variable_names_.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != t.variable_names_.size() + 3)
            throw ParseError("trace csv: line " + std::to_string(lineno) +
                             " has wrong field count");
        for (std::size_t v = 0; v < t.variable_names_.size(); ++v) {
            const std::string& label = fields[v + 1];
            int idx = t.value_index(v, label);
            if (idx < 0) {
                t.value_labels_[v].push_back(label);  // order of first appearance
                idx = static_cast<int>(t.value_labels_[v].size()) - 1;
            }
            state[v] = idx;
        }
        t.append(state, std::stod(fields[fields.size() - 2]),
                 fields.back() != "0" && fields.back() != "false");
    }
    return t;
}

SampleTrace SampleTrace::read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace file '" + path + "'");
    return read_csv(in);
}

}  // namespace bnsim
