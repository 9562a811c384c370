#include "bnsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bnsim {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string row_sum_message(const std::string& child, std::size_t row, double sum) {
    std::ostringstream os;
    os.precision(17);
    os << "cpt for '" << child << "', row " << row << ": entries sum to " << sum;
    return os.str();
}

// Longest-path level per variable; -1 while unknown. Returns false on a cycle.
bool compute_levels(std::size_t n, const std::vector<std::vector<int>>& parents,
                    std::vector<int>& level) {
    level.assign(n, -1);
    bool progress = true;
    std::size_t assigned = 0;
    while (progress && assigned < n) {
        progress = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (level[i] >= 0) continue;
            int lv = 0;
            bool ready = true;
            for (int p : parents[i]) {
                if (level[static_cast<std::size_t>(p)] < 0) {
                    ready = false;
                    break;
                }
                lv = std::max(lv, level[static_cast<std::size_t>(p)] + 1);
            }
            if (ready) {
                level[i] = lv;
                ++assigned;
                progress = true;
            }
        }
    }
    return assigned == n;
}

}  // namespace

ValidationReport validate(const NetworkSpec& spec) {
    ValidationReport rep;
    auto error = [&](std::string msg) {
        rep.findings.push_back({Finding::Severity::Error, std::move(msg)});
    };
    auto warning = [&](std::string msg) {
        rep.findings.push_back({Finding::Severity::Warning, std::move(msg)});
    };

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < spec.variables.size(); ++i) {
        const Variable& v = spec.variables[i];
        if (v.name.empty()) error("variable " + std::to_string(i) + " has an empty name");
        if (index.count(v.name)) error("duplicate variable name '" + v.name + "'");
        index[v.name] = static_cast<int>(i);
        if (v.values.size() < 2)
            error("variable '" + v.name + "' needs at least 2 values");
        std::set<std::string> seen(v.values.begin(), v.values.end());
        if (seen.size() != v.values.size())
            error("variable '" + v.name + "' has duplicate value labels");
    }

    std::map<std::string, std::size_t> cpt_of;
    for (std::size_t ci = 0; ci < spec.cpts.size(); ++ci) {
        const CptSpec& c = spec.cpts[ci];
        auto it = index.find(c.child);
        if (it == index.end()) {
            error("cpt " + std::to_string(ci) + " names unknown child '" + c.child + "'");
            continue;
        }
        if (cpt_of.count(c.child)) {
            error("variable '" + c.child + "' has more than one cpt");
            continue;
        }
        cpt_of[c.child] = ci;

        bool parents_ok = true;
        std::set<std::string> pseen;
        std::size_t row_count = 1;
        for (const std::string& p : c.parents) {
            if (!index.count(p)) {
                error("cpt for '" + c.child + "' names unknown parent '" + p + "'");
                parents_ok = false;
                continue;
            }
            if (!pseen.insert(p).second) {
                error("cpt for '" + c.child + "' repeats parent '" + p + "'");
                parents_ok = false;
            }
            if (p == c.child) {
                error("variable '" + c.child + "' lists itself as a parent");
                parents_ok = false;
            }
            row_count *= spec.variables[static_cast<std::size_t>(index[p])].values.size();
        }
        if (!parents_ok) continue;

        const std::size_t dom = spec.variables[static_cast<std::size_t>(it->second)].values.size();
        if (c.rows.size() != row_count) {
            error("cpt for '" + c.child + "': expected " + std::to_string(row_count) +
                  " rows, got " + std::to_string(c.rows.size()));
            continue;
        }
        for (std::size_t r = 0; r < c.rows.size(); ++r) {
            const auto& row = c.rows[r];
            if (row.size() != dom) {
                error("cpt for '" + c.child + "', row " + std::to_string(r) +
                      ": expected " + std::to_string(dom) + " entries, got " +
                      std::to_string(row.size()));
                continue;
            }
            bool range_ok = true;
            double sum = 0.0;
            for (double e : row) {
                if (!(e >= 0.0 && e <= 1.0)) {
                    error("cpt for '" + c.child + "', row " + std::to_string(r) +
                          ": entry outside [0, 1]");
                    range_ok = false;
                    break;
                }
                sum += e;
            }
            if (!range_ok) continue;
            const double dev = std::abs(sum - 1.0);
            if (dev > kRowSumTolerance) {
                error(row_sum_message(c.child, r, sum));
            } else if (dev > 0.0) {
                warning(row_sum_message(c.child, r, sum) + " (normalized)");
            }
        }
    }

    for (const auto& [name, i] : index)
        if (!cpt_of.count(name)) error("variable '" + name + "' has no cpt");

    // Acyclicity, only meaningful once references resolve.
    if (!rep.has_errors()) {
        std::vector<std::vector<int>> parents(spec.variables.size());
        for (const CptSpec& c : spec.cpts) {
            auto& ps = parents[static_cast<std::size_t>(index[c.child])];
            for (const std::string& p : c.parents) ps.push_back(index[p]);
        }
        std::vector<int> level;
        if (!compute_levels(spec.variables.size(), parents, level)) {
            std::string stuck;
            for (std::size_t i = 0; i < level.size(); ++i)
                if (level[i] < 0) stuck += (stuck.empty() ? "" : ", ") + spec.variables[i].name;
            error("parent relation is cyclic (involving: " + stuck + ")");
        }
    }
    return rep;
}

BeliefNetwork::BeliefNetwork(const NetworkSpec& spec) {
    ValidationReport rep = validate(spec);
    if (rep.has_errors()) {
        std::string what = "invalid network";
        for (const auto& f : rep.findings)
            if (f.severity == Finding::Severity::Error) {
                what += ": " + f.message;
                break;
            }
        throw ValidationError(what, std::move(rep));
    }
    build_report_ = rep;

    variables_ = spec.variables;
    for (std::size_t i = 0; i < variables_.size(); ++i)
        index_[variables_[i].name] = static_cast<int>(i);

    cpts_.resize(variables_.size());
    for (const CptSpec& c : spec.cpts) {
        Cpt cpt;
        cpt.child = index_.at(c.child);
        for (const std::string& p : c.parents) cpt.parents.push_back(index_.at(p));
        cpt.rows = c.rows;
        for (auto& row : cpt.rows) {
            double sum = 0.0;
            for (double e : row) sum += e;
            if (sum != 1.0 && sum > 0.0)
                for (double& e : row) e /= sum;
        }
        cpts_[static_cast<std::size_t>(cpt.child)] = std::move(cpt);
    }

    children_.resize(variables_.size());
    for (const Cpt& c : cpts_)
        for (int p : c.parents) children_[static_cast<std::size_t>(p)].push_back(c.child);

    std::vector<std::vector<int>> parent_lists(variables_.size());
    for (const Cpt& c : cpts_) parent_lists[static_cast<std::size_t>(c.child)] = c.parents;
    std::vector<int> level;
    compute_levels(variables_.size(), parent_lists, level);
    topo_order_.resize(variables_.size());
    for (std::size_t i = 0; i < topo_order_.size(); ++i) topo_order_[i] = static_cast<int>(i);
    std::stable_sort(topo_order_.begin(), topo_order_.end(), [&](int a, int b) {
        return level[static_cast<std::size_t>(a)] < level[static_cast<std::size_t>(b)];
    });
}

int BeliefNetwork::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

int BeliefNetwork::require_variable(const std::string& name) const {
    int i = index_of(name);
    if (i < 0) throw PreconditionError("unknown variable '" + name + "'");
    return i;
}

int BeliefNetwork::require_value(int var, const std::string& value_label) const {
    const Variable& v = variable(var);
    for (std::size_t k = 0; k < v.values.size(); ++k)
        if (v.values[k] == value_label) return static_cast<int>(k);
    throw PreconditionError("variable '" + v.name + "' has no value '" + value_label + "'");
}

bool BeliefNetwork::all_binary() const {
    for (const Variable& v : variables_)
        if (v.values.size() != 2) return false;
    return true;
}

std::size_t BeliefNetwork::joint_state_count() const {
    std::size_t n = 1;
    const std::size_t cap = std::size_t{1} << 62;
    for (const Variable& v : variables_) {
        if (n > cap / v.values.size()) return cap;
        n *= v.values.size();
    }
    return n;
}

std::size_t BeliefNetwork::cpt_row_index(int var, const Assignment& a) const {
    return cpt_row_index(var, a.raw());
}

std::size_t BeliefNetwork::cpt_row_index(int var, std::span<const int> full_state) const {
    const Cpt& c = cpts_[static_cast<std::size_t>(var)];
    std::size_t idx = 0;
    for (int p : c.parents) {
        const int v = full_state[static_cast<std::size_t>(p)];
        if (v < 0)
            throw PreconditionError("cpt row lookup for '" + variable(var).name +
                                    "': parent '" + variable(p).name + "' is unassigned");
        idx = idx * domain_size(p) + static_cast<std::size_t>(v);
    }
    return idx;
}

const std::vector<double>& BeliefNetwork::cpt_row(int var, const Assignment& a) const {
    return cpts_[static_cast<std::size_t>(var)].rows[cpt_row_index(var, a)];
}

bool BeliefNetwork::is_functional(int var) const {
    for (const auto& row : cpts_[static_cast<std::size_t>(var)].rows)
        for (double e : row)
            if (e != 0.0 && e != 1.0) return false;
    return true;
}

NetworkSpec BeliefNetwork::to_spec() const {
    NetworkSpec spec;
    spec.variables = variables_;
    for (const Cpt& c : cpts_) {
        CptSpec cs;
        cs.child = variable(c.child).name;
        for (int p : c.parents) cs.parents.push_back(variable(p).name);
        cs.rows = c.rows;
        spec.cpts.push_back(std::move(cs));
    }
    return spec;
}

NetworkSpec parse_network_spec(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network file: ") + e.what());
    }
    NetworkSpec spec;
    try {
        if (!j.is_object() || !j.contains("variables") || !j.contains("cpts"))
            throw ParseError("network file: expected an object with 'variables' and 'cpts'");
        for (const auto& jv : j.at("variables")) {
            Variable v;
            v.name = jv.at("name").get<std::string>();
            v.values = jv.at("values").get<std::vector<std::string>>();
            spec.variables.push_back(std::move(v));
        }
        for (const auto& jc : j.at("cpts")) {
            CptSpec c;
            c.child = jc.at("child").get<std::string>();
            c.parents = jc.at("parents").get<std::vector<std::string>>();
            c.rows = jc.at("rows").get<std::vector<std::vector<double>>>();
            spec.cpts.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network file: ") + e.what());
    }
    return spec;
}

BeliefNetwork parse_network(const std::string& text) {
    return BeliefNetwork(parse_network_spec(text));
}

std::string serialize_network(const BeliefNetwork& net) {
    const NetworkSpec spec = net.to_spec();
    ordered_json j;
    j["variables"] = ordered_json::array();
    for (const Variable& v : spec.variables)
        j["variables"].push_back({{"name", v.name}, {"values", v.values}});
    j["cpts"] = ordered_json::array();
    for (const CptSpec& c : spec.cpts)
        j["cpts"].push_back({{"child", c.child}, {"parents", c.parents}, {"rows", c.rows}});
    return j.dump(2) + "\n";
}

BeliefNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

double joint_probability(const BeliefNetwork& net, const Assignment& full) {
    if (!full.total())
        throw PreconditionError("joint_probability requires a total assignment");
    return joint_probability(net, full.raw());
}

double joint_probability(const BeliefNetwork& net, std::span<const int> full_state) {
    double p = 1.0;
    for (std::size_t i = 0; i < net.variable_count(); ++i) {
        const int var = static_cast<int>(i);
        const std::size_t row = net.cpt_row_index(var, full_state);
        p *= net.cpt(var).rows[row][static_cast<std::size_t>(full_state[i])];
        if (p == 0.0) return 0.0;
    }
    return p;
}

std::vector<int> topological_order(const BeliefNetwork& net) {
    return net.topological_order();
}

Assignment parse_assignment(const BeliefNetwork& net, const std::string& text) {
    Assignment a(net.variable_count());
    if (text.empty()) return a;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw PreconditionError("expected VAR=VALUE, got '" + item + "'");
        const int var = net.require_variable(item.substr(0, eq));
        const int val = net.require_value(var, item.substr(eq + 1));
        if (a.assigned(var) && a[var] != val)
            throw PreconditionError("contradictory assignment for '" +
                                    net.variable(var).name + "'");
        a.set(var, val);
    }
    return a;
}

std::vector<int> parse_variable_list(const BeliefNetwork& net, const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const int var = net.require_variable(item);
        if (std::find(out.begin(), out.end(), var) == out.end()) out.push_back(var);
    }
    return out;
}

std::string describe_assignment(const BeliefNetwork& net, const Assignment& a) {
    std::string out;
    for (std::size_t i = 0; i < net.variable_count(); ++i) {
        if (!a.assigned(static_cast<int>(i))) continue;
        if (!out.empty()) out += ",";
        out += net.variable(static_cast<int>(i)).name + "=" +
               net.variable(static_cast<int>(i)).values[static_cast<std::size_t>(a[static_cast<int>(i)])];
    }
    return out.empty() ? "(empty)" : out;
}

}  // namespace bnsim
