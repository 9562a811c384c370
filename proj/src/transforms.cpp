#include "bnsim/transforms.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include <json.hpp>

namespace bnsim {

namespace {

const char* kind_name(TransformStep::Kind k) {
    switch (k) {
        case TransformStep::Kind::Prune: return "prune";
        case TransformStep::Kind::Reverse: return "reverse";
        case TransformStep::Kind::Reduce: return "reduce";
    }
    return "?";
}

TransformStep::Kind kind_from(const std::string& s) {
    if (s == "prune") return TransformStep::Kind::Prune;
    if (s == "reverse") return TransformStep::Kind::Reverse;
    if (s == "reduce") return TransformStep::Kind::Reduce;
    throw ParseError("transform plan: unknown step kind '" + s + "'");
}

// Directed path from→to avoiding the direct arc; returns the node sequence or
// empty when none exists.
std::vector<int> alternate_path(const BeliefNetwork& net, int from, int to) {
    std::vector<int> parent(net.variable_count(), -2);  // -2 unvisited
    std::vector<int> stack{from};
    parent[static_cast<std::size_t>(from)] = -1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int c : net.children(u)) {
            if (u == from && c == to) continue;  // skip the direct arc
            if (parent[static_cast<std::size_t>(c)] != -2) continue;
            parent[static_cast<std::size_t>(c)] = u;
            if (c == to) {
                std::vector<int> path{to};
                for (int x = u; x != -1; x = parent[static_cast<std::size_t>(x)])
                    path.push_back(x);
                std::reverse(path.begin(), path.end());
                return path;
            }
            stack.push_back(c);
        }
    }
    return {};
}

// Ordered union of parent index sets, declaration order.
std::vector<int> union_parents(const std::vector<int>& a, const std::vector<int>& b,
                               int excluded) {
    std::set<int> all(a.begin(), a.end());
    all.insert(b.begin(), b.end());
    all.erase(excluded);
    return {all.begin(), all.end()};
}

// Row index of `var`'s declared parent list under a full configuration of
// `over` (mixed-radix digits, first of `over` most significant).
std::size_t project_row(const BeliefNetwork& net, const std::vector<int>& parents,
                        const std::vector<int>& over, const std::vector<int>& digits) {
    std::size_t idx = 0;
    for (int p : parents) {
        const auto at = std::find(over.begin(), over.end(), p) - over.begin();
        idx = idx * net.domain_size(p) + static_cast<std::size_t>(digits[static_cast<std::size_t>(at)]);
    }
    return idx;
}

bool advance_digits(const BeliefNetwork& net, const std::vector<int>& vars,
                    std::vector<int>& digits) {
    for (std::size_t k = vars.size(); k-- > 0;) {
        if (++digits[k] < static_cast<int>(net.domain_size(vars[k]))) return true;
        digits[k] = 0;
    }
    return false;
}

}  // namespace

std::string network_digest(const BeliefNetwork& net) {
    const std::string text = serialize_network(net);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PruneResult prune(const BeliefNetwork& net, const std::vector<int>& evidence_vars,
                  const std::vector<int>& query_vars) {
    // Keep exactly the ancestors of J ∪ K (self-inclusive); everything else
    // has no directed path into J ∪ K.
    std::vector<char> keep(net.variable_count(), 0);
    std::vector<int> stack;
    for (int v : evidence_vars) stack.push_back(v);
    for (int v : query_vars) stack.push_back(v);
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (keep[static_cast<std::size_t>(v)]) continue;
        keep[static_cast<std::size_t>(v)] = 1;
        for (int p : net.parents(v)) stack.push_back(p);
    }

    NetworkSpec spec = net.to_spec();
    NetworkSpec out;
    std::vector<std::string> removed;
    for (std::size_t i = 0; i < spec.variables.size(); ++i) {
        if (keep[i])
            out.variables.push_back(spec.variables[i]);
        else
            removed.push_back(spec.variables[i].name);
    }
    for (auto& c : spec.cpts)
        if (keep[static_cast<std::size_t>(net.index_of(c.child))]) out.cpts.push_back(std::move(c));
    return PruneResult{BeliefNetwork(out), std::move(removed)};
}

BeliefNetwork reverse_arc(const BeliefNetwork& net, int from, int to, TransformCost* cost) {
    const auto& to_parents = net.parents(to);
    if (std::find(to_parents.begin(), to_parents.end(), from) == to_parents.end())
        throw PreconditionError("reverse_arc: no arc " + net.variable(from).name + "->" +
                                net.variable(to).name);
    if (const std::vector<int> path = alternate_path(net, from, to); !path.empty()) {
        std::string desc;
        for (int v : path) desc += (desc.empty() ? "" : "->") + net.variable(v).name;
        throw PreconditionError("reverse_arc: reversing " + net.variable(from).name + "->" +
                                net.variable(to).name +
                                " would create a cycle via the path " + desc);
    }

    // Shared context: every other parent of either endpoint.
    const std::vector<int> shared = union_parents(net.parents(from), net.parents(to), from);
    std::vector<int> to_new_parents = shared;
    std::vector<int> from_new_parents = shared;
    from_new_parents.insert(
        std::upper_bound(from_new_parents.begin(), from_new_parents.end(), to), to);

    const std::size_t dom_from = net.domain_size(from);
    const std::size_t dom_to = net.domain_size(to);
    std::size_t shared_configs = 1;
    for (int p : shared) shared_configs *= net.domain_size(p);

    std::vector<std::vector<double>> new_to_rows(shared_configs,
                                                 std::vector<double>(dom_to, 0.0));
    std::vector<std::vector<double>> new_from_rows(shared_configs * dom_to,
                                                   std::vector<double>(dom_from, 0.0));

    std::vector<int> over = shared;
    over.push_back(from);

    // For each shared configuration, build the joint over (from, to) and
    // factor it the other way around.
    std::vector<int> cfg(shared.size(), 0);
    do {
        std::size_t shared_index = 0;
        for (std::size_t k = 0; k < shared.size(); ++k)
            shared_index = shared_index * net.domain_size(shared[k]) +
                           static_cast<std::size_t>(cfg[k]);

        std::vector<std::vector<double>> joint(dom_from, std::vector<double>(dom_to, 0.0));
        std::vector<int> full = cfg;
        full.push_back(0);
        for (std::size_t vf = 0; vf < dom_from; ++vf) {
            full.back() = static_cast<int>(vf);
            const double pf =
                net.cpt(from).rows[project_row(net, net.parents(from), over, full)][vf];
            const auto& to_row =
                net.cpt(to).rows[project_row(net, net.parents(to), over, full)];
            for (std::size_t vt = 0; vt < dom_to; ++vt) joint[vf][vt] = pf * to_row[vt];
        }
        for (std::size_t vt = 0; vt < dom_to; ++vt) {
            double marginal = 0.0;
            for (std::size_t vf = 0; vf < dom_from; ++vf) marginal += joint[vf][vt];
            new_to_rows[shared_index][vt] = marginal;
            auto& from_row = new_from_rows[shared_index * dom_to + vt];
            if (marginal > 0.0) {
                for (std::size_t vf = 0; vf < dom_from; ++vf)
                    from_row[vf] = joint[vf][vt] / marginal;
            } else {
                // Zero-probability context: any conditional preserves the
                // joint; uniform keeps the output deterministic.
                for (std::size_t vf = 0; vf < dom_from; ++vf)
                    from_row[vf] = 1.0 / static_cast<double>(dom_from);
            }
        }
    } while (advance_digits(net, shared, cfg));

    // The new row order must follow the declared parent order, which is the
    // declaration order of variables; remap from the (shared..., to) layout.
    NetworkSpec spec = net.to_spec();
    auto remap_rows = [&](int child, const std::vector<int>& new_parents,
                          const std::vector<int>& layout,
                          const std::vector<std::vector<double>>& rows_in) {
        std::vector<std::vector<double>> rows_out(rows_in.size());
        std::vector<int> d(layout.size(), 0);
        std::size_t flat = 0;
        do {
            rows_out[project_row(net, new_parents, layout, d)] = rows_in[flat++];
        } while (advance_digits(net, layout, d));
        CptSpec& cs = spec.cpts[static_cast<std::size_t>(child)];
        cs.parents.clear();
        for (int p : new_parents) cs.parents.push_back(net.variable(p).name);
        cs.rows = std::move(rows_out);
    };
    {
        std::vector<int> layout_to = shared;  // row per shared config
        remap_rows(to, to_new_parents, layout_to, new_to_rows);
        std::vector<int> layout_from = shared;  // row per (shared, to) config
        layout_from.push_back(to);
        remap_rows(from, from_new_parents, layout_from, new_from_rows);
    }

    if (cost) {
        cost->cpt_entries_created =
            new_to_rows.size() * dom_to + new_from_rows.size() * dom_from;
        std::size_t added = 1;  // the reversed arc itself
        for (int p : to_new_parents)
            if (std::find(to_parents.begin(), to_parents.end(), p) == to_parents.end())
                ++added;
        const auto& from_parents = net.parents(from);
        for (int p : shared)
            if (std::find(from_parents.begin(), from_parents.end(), p) == from_parents.end())
                ++added;
        cost->arcs_added = added;
    }
    return BeliefNetwork(spec);
}

BeliefNetwork reduce_node(const BeliefNetwork& net, int node, TransformCost* cost) {
    const auto& children = net.children(node);
    if (children.size() != 1)
        throw PreconditionError(
            "reduce_node: '" + net.variable(node).name + "' has " +
            std::to_string(children.size()) +
            " children; reduction is defined for exactly one (reverse arcs first)");
    const int child = children[0];

    std::vector<int> new_parents = union_parents(net.parents(child), net.parents(node), node);
    const std::size_t dom_child = net.domain_size(child);
    const std::size_t dom_node = net.domain_size(node);

    std::size_t config_count = 1;
    for (int p : new_parents) config_count *= net.domain_size(p);
    std::vector<std::vector<double>> new_rows(config_count,
                                              std::vector<double>(dom_child, 0.0));

    std::vector<int> over = new_parents;
    over.push_back(node);
    std::vector<int> cfg(new_parents.size(), 0);
    do {
        const std::size_t row = project_row(net, new_parents, new_parents, cfg);
        std::vector<int> full = cfg;
        full.push_back(0);
        for (std::size_t vx = 0; vx < dom_node; ++vx) {
            full.back() = static_cast<int>(vx);
            const double px =
                net.cpt(node).rows[project_row(net, net.parents(node), over, full)][vx];
            const auto& child_row =
                net.cpt(child).rows[project_row(net, net.parents(child), over, full)];
            for (std::size_t vc = 0; vc < dom_child; ++vc)
                new_rows[row][vc] += px * child_row[vc];
        }
    } while (advance_digits(net, new_parents, cfg));

    NetworkSpec spec = net.to_spec();
    CptSpec& cs = spec.cpts[static_cast<std::size_t>(child)];
    cs.parents.clear();
    for (int p : new_parents) cs.parents.push_back(net.variable(p).name);
    cs.rows = std::move(new_rows);

    spec.variables.erase(spec.variables.begin() + node);
    spec.cpts.erase(spec.cpts.begin() + node);

    if (cost) {
        cost->cpt_entries_created = config_count * dom_child;
        std::size_t added = 0;
        const auto& old_parents = net.parents(child);
        for (int p : new_parents)
            if (std::find(old_parents.begin(), old_parents.end(), p) == old_parents.end())
                ++added;
        cost->arcs_added = added;
    }
    return BeliefNetwork(spec);
}

AbsorbResult absorb_evidence(const BeliefNetwork& net, const std::vector<int>& evidence_vars,
                             const std::vector<int>& query_vars) {
    for (int j : evidence_vars)
        for (int k : query_vars)
            if (j == k)
                throw PreconditionError("absorb_evidence: '" + net.variable(j).name +
                                        "' is both evidence and query");

    TransformPlan plan;
    plan.input_digest = network_digest(net);
    for (int j : evidence_vars) plan.evidence.push_back(net.variable(j).name);
    for (int k : query_vars) plan.queries.push_back(net.variable(k).name);

    BeliefNetwork current = net;
    std::set<std::string> evidence_names(plan.evidence.begin(), plan.evidence.end());

    for (;;) {
        // Earliest (current topological order) evidence node with a
        // non-evidence parent; within it, the latest such parent. That arc can
        // never have an alternate path, so the reversal is always legal.
        std::vector<std::size_t> topo_pos(current.variable_count());
        const auto& topo = current.topological_order();
        for (std::size_t i = 0; i < topo.size(); ++i)
            topo_pos[static_cast<std::size_t>(topo[i])] = i;

        int target = -1, source = -1;
        for (int e : topo) {
            if (!evidence_names.count(current.variable(e).name)) continue;
            for (int p : current.parents(e)) {
                if (evidence_names.count(current.variable(p).name)) continue;
                if (source < 0 || topo_pos[static_cast<std::size_t>(p)] >
                                      topo_pos[static_cast<std::size_t>(source)])
                    source = p;
            }
            if (source >= 0) {
                target = e;
                break;
            }
        }
        if (target < 0) break;

        TransformStep step;
        step.kind = TransformStep::Kind::Reverse;
        step.operands = {current.variable(source).name, current.variable(target).name};
        current = reverse_arc(current, source, target, &step.cost);
        plan.total_cost += step.cost;
        plan.steps.push_back(std::move(step));
    }

    std::vector<int> j_now, k_now;
    for (const auto& n : plan.evidence) j_now.push_back(current.require_variable(n));
    for (const auto& n : plan.queries) k_now.push_back(current.require_variable(n));
    PruneResult pruned = prune(current, j_now, k_now);
    TransformStep step;
    step.kind = TransformStep::Kind::Prune;
    step.operands = pruned.removed;
    plan.steps.push_back(std::move(step));

    return AbsorbResult{std::move(pruned.network), std::move(plan)};
}

BeliefNetwork apply_plan(const BeliefNetwork& net, const TransformPlan& plan) {
    BeliefNetwork current = net;
    for (const TransformStep& step : plan.steps) {
        switch (step.kind) {
            case TransformStep::Kind::Reverse:
                if (step.operands.size() != 2)
                    throw PreconditionError("transform plan: reverse needs two operands");
                current = reverse_arc(current, current.require_variable(step.operands[0]),
                                      current.require_variable(step.operands[1]));
                break;
            case TransformStep::Kind::Reduce:
                if (step.operands.size() != 1)
                    throw PreconditionError("transform plan: reduce needs one operand");
                current = reduce_node(current, current.require_variable(step.operands[0]));
                break;
            case TransformStep::Kind::Prune: {
                // Recorded prunes list the removed variables directly; a prune
                // result never leaves a survivor with a removed parent.
                NetworkSpec spec = current.to_spec();
                std::set<std::string> drop(step.operands.begin(), step.operands.end());
                NetworkSpec out;
                for (auto& v : spec.variables)
                    if (!drop.count(v.name)) out.variables.push_back(std::move(v));
                for (auto& c : spec.cpts)
                    if (!drop.count(c.child)) out.cpts.push_back(std::move(c));
                current = BeliefNetwork(out);
                break;
            }
        }
    }
    return current;
}

std::string TransformPlan::to_json() const {
    nlohmann::ordered_json j;
    j["input_digest"] = input_digest;
    j["evidence"] = evidence;
    j["queries"] = queries;
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : steps) {
        j["steps"].push_back({{"kind", kind_name(s.kind)},
                              {"operands", s.operands},
                              {"cost",
                               {{"cpt_entries_created", s.cost.cpt_entries_created},
                                {"arcs_added", s.cost.arcs_added}}}});
    }
    j["total_cost"] = {{"cpt_entries_created", total_cost.cpt_entries_created},
                       {"arcs_added", total_cost.arcs_added}};
    return j.dump(2) + "\n";
}

TransformPlan TransformPlan::from_json(const std::string& text) {
    TransformPlan plan;
    try {
        const auto j = nlohmann::json::parse(text);
        plan.input_digest = j.value("input_digest", "");
        if (j.contains("evidence")) plan.evidence = j.at("evidence").get<std::vector<std::string>>();
        if (j.contains("queries")) plan.queries = j.at("queries").get<std::vector<std::string>>();
        for (const auto& js : j.at("steps")) {
            TransformStep s;
            s.kind = kind_from(js.at("kind").get<std::string>());
            s.operands = js.at("operands").get<std::vector<std::string>>();
            if (js.contains("cost")) {
                s.cost.cpt_entries_created = js.at("cost").value("cpt_entries_created", 0u);
                s.cost.arcs_added = js.at("cost").value("arcs_added", 0u);
            }
            plan.total_cost += s.cost;
            plan.steps.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("transform plan: ") + e.what());
    }
    return plan;
}

}  // namespace bnsim
