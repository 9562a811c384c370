#include "bnsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bnsim {

namespace {

std::vector<int> free_variables(const BeliefNetwork& net, const Assignment& evidence) {
    std::vector<int> free;
    for (std::size_t i = 0; i < net.variable_count(); ++i)
        if (!evidence.assigned(static_cast<int>(i))) free.push_back(static_cast<int>(i));
    return free;
}

std::size_t state_space_size(const BeliefNetwork& net, const std::vector<int>& vars,
                             std::size_t cap) {
    std::size_t n = 1;
    for (int v : vars) {
        const std::size_t d = net.domain_size(v);
        if (n > cap / d + 1) return cap + 1;
        n *= d;
    }
    return n;
}

// Mixed-radix odometer over `vars` (last variable fastest). Returns false once
// the sequence wraps.
bool advance(const BeliefNetwork& net, const std::vector<int>& vars, Assignment& a) {
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        const int v = *it;
        const int next = a[v] + 1;
        if (next < static_cast<int>(net.domain_size(v))) {
            a.set(v, next);
            return true;
        }
        a.set(v, 0);
    }
    return false;
}

}  // namespace

std::vector<int> MarkovBlanket::members() const {
    std::set<int> all(parents.begin(), parents.end());
    all.insert(children.begin(), children.end());
    all.insert(spouses.begin(), spouses.end());
    return {all.begin(), all.end()};
}

PosteriorTable exact_posteriors(const BeliefNetwork& net, const Assignment& evidence,
                                const std::vector<int>& queries) {
    const std::vector<int> free = free_variables(net, evidence);
    if (state_space_size(net, free, kEnumerationBudget) > kEnumerationBudget)
        throw BudgetError("exact_posteriors: joint state space exceeds enumeration budget");

    PosteriorTable table;
    table.queries = queries;
    table.posteriors.resize(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q)
        table.posteriors[q].assign(net.domain_size(queries[q]), 0.0);

    Assignment a = evidence;
    for (int v : free) a.set(v, 0);
    double total = 0.0;
    do {
        const double p = joint_probability(net, a.raw());
        total += p;
        if (p > 0.0)
            for (std::size_t q = 0; q < queries.size(); ++q)
                table.posteriors[q][static_cast<std::size_t>(a[queries[q]])] += p;
    } while (advance(net, free, a));

    table.evidence_probability = total;
    if (total <= 0.0) {
        table.defined = false;
        for (auto& v : table.posteriors) std::fill(v.begin(), v.end(), 0.0);
        return table;
    }
    for (auto& v : table.posteriors)
        for (double& e : v) e /= total;
    return table;
}

MarkovBlanket markov_blanket(const BeliefNetwork& net, int node) {
    if (node < 0 || static_cast<std::size_t>(node) >= net.variable_count())
        throw PreconditionError("markov_blanket: no such variable");
    MarkovBlanket mb;
    mb.node = node;
    std::set<int> parents(net.parents(node).begin(), net.parents(node).end());
    std::set<int> children(net.children(node).begin(), net.children(node).end());
    std::set<int> spouses;
    for (int c : children)
        for (int p : net.parents(c))
            if (p != node) spouses.insert(p);
    mb.parents = {parents.begin(), parents.end()};
    mb.children = {children.begin(), children.end()};
    mb.spouses = {spouses.begin(), spouses.end()};
    return mb;
}

MarkovBlanket markov_blanket(const BeliefNetwork& net, const std::string& node) {
    return markov_blanket(net, net.require_variable(node));
}

LocalConditional blanket_conditional(const BeliefNetwork& net, int node,
                                     const Assignment& others) {
    const MarkovBlanket mb = markov_blanket(net, node);
    for (int m : mb.members())
        if (!others.assigned(m))
            throw PreconditionError("blanket_conditional for '" + net.variable(node).name +
                                    "': blanket member '" + net.variable(m).name +
                                    "' is unassigned");
    return group_conditional(net, {node}, others);
}

LocalConditional group_conditional(const BeliefNetwork& net,
                                   const std::vector<int>& members,
                                   const Assignment& state) {
    // External children: variables outside the group with a parent inside it.
    std::set<int> member_set(members.begin(), members.end());
    std::vector<int> ext_children;
    {
        std::set<int> seen;
        for (int m : members)
            for (int c : net.children(m))
                if (!member_set.count(c) && seen.insert(c).second) ext_children.push_back(c);
    }

    std::size_t configs = 1;
    for (int m : members) configs *= net.domain_size(m);

    LocalConditional out;
    out.probs.assign(configs, 0.0);

    Assignment work = state;
    double total = 0.0;
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
        std::size_t rem = cfg;
        for (auto it = members.rbegin(); it != members.rend(); ++it) {
            const std::size_t d = net.domain_size(*it);
            work.set(*it, static_cast<int>(rem % d));
            rem /= d;
        }
        double w = 1.0;
        for (int m : members)
            w *= net.cpt(m).rows[net.cpt_row_index(m, work)][static_cast<std::size_t>(work[m])];
        for (int c : ext_children) {
            if (w == 0.0) break;
            if (!work.assigned(c))
                throw PreconditionError("group_conditional: child '" + net.variable(c).name +
                                        "' is unassigned");
            w *= net.cpt(c).rows[net.cpt_row_index(c, work)][static_cast<std::size_t>(work[c])];
        }
        out.probs[cfg] = w;
        total += w;
    }

    if (total <= 0.0) {
        out.degenerate = true;
        std::fill(out.probs.begin(), out.probs.end(), 0.0);
        return out;
    }
    for (double& p : out.probs) p /= total;
    return out;
}

std::size_t SweepKernel::index_of(std::span<const int> full_state) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < free_vars.size(); ++k)
        idx = idx * radix[k] + static_cast<std::size_t>(full_state[static_cast<std::size_t>(free_vars[k])]);
    return idx;
}

void SweepKernel::decode(std::size_t index, Assignment& into) const {
    for (std::size_t k = free_vars.size(); k-- > 0;) {
        into.set(free_vars[k], static_cast<int>(index % radix[k]));
        index /= radix[k];
    }
}

namespace {

// Shared construction: units are the blocks resampled jointly, visited in the
// given order. The kernel matrix starts as identity and each unit update is
// applied as a linear map.
SweepKernel build_kernel(const BeliefNetwork& net, const Assignment& evidence,
                         const std::vector<std::vector<int>>& units) {
    SweepKernel kernel;
    kernel.free_vars = free_variables(net, evidence);
    for (int v : kernel.free_vars) kernel.radix.push_back(net.domain_size(v));
    const std::size_t n = state_space_size(net, kernel.free_vars, kKernelStateBudget);
    if (n > kKernelStateBudget)
        throw BudgetError("sweep kernel: free state space exceeds budget");
    kernel.state_count = n;

    // Strides of each free var in the state index.
    std::vector<std::size_t> stride(kernel.free_vars.size(), 1);
    for (std::size_t k = kernel.free_vars.size(); k-- > 1;)
        stride[k - 1] = stride[k] * kernel.radix[k];
    std::vector<std::size_t> stride_of(net.variable_count(), 0);
    std::vector<std::size_t> radix_of(net.variable_count(), 0);
    for (std::size_t k = 0; k < kernel.free_vars.size(); ++k) {
        stride_of[static_cast<std::size_t>(kernel.free_vars[k])] = stride[k];
        radix_of[static_cast<std::size_t>(kernel.free_vars[k])] = kernel.radix[k];
    }

    kernel.matrix.assign(n * n, 0.0);
    for (std::size_t s = 0; s < n; ++s) kernel.matrix[s * n + s] = 1.0;

    std::vector<double> next(n * n);
    Assignment work(net.variable_count());
    for (const auto& unit : units) {
        // Per-state conditionals for this unit.
        std::size_t cfgs = 1;
        for (int m : unit) cfgs *= net.domain_size(m);
        std::vector<double> cond(n * cfgs);
        std::vector<char> stick(n, 0);
        for (std::size_t t = 0; t < n; ++t) {
            work = evidence;
            kernel.decode(t, work);
            const LocalConditional lc = group_conditional(net, unit, work);
            if (lc.degenerate) {
                stick[t] = 1;  // zero-probability state: keep current value
            } else {
                std::copy(lc.probs.begin(), lc.probs.end(), cond.begin() + static_cast<std::ptrdiff_t>(t * cfgs));
            }
        }
        // Base index of state t with the unit's digits zeroed, plus the offset
        // each unit configuration adds.
        std::vector<std::size_t> cfg_offset(cfgs, 0);
        for (std::size_t cfg = 0; cfg < cfgs; ++cfg) {
            std::size_t rem = cfg, off = 0;
            for (auto it = unit.rbegin(); it != unit.rend(); ++it) {
                const std::size_t d = net.domain_size(*it);
                off += (rem % d) * stride_of[static_cast<std::size_t>(*it)];
                rem /= d;
            }
            cfg_offset[cfg] = off;
        }
        auto unit_digits_cleared = [&](std::size_t t) {
            for (int m : unit) {
                const std::size_t str = stride_of[static_cast<std::size_t>(m)];
                const std::size_t dig = (t / str) % radix_of[static_cast<std::size_t>(m)];
                t -= dig * str;
            }
            return t;
        };

        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            const double* row = &kernel.matrix[s * n];
            double* out = &next[s * n];
            for (std::size_t t = 0; t < n; ++t) {
                const double mass = row[t];
                if (mass == 0.0) continue;
                if (stick[t]) {
                    out[t] += mass;
                    continue;
                }
                const std::size_t base = unit_digits_cleared(t);
                const double* c = &cond[t * cfgs];
                for (std::size_t cfg = 0; cfg < cfgs; ++cfg)
                    out[base + cfg_offset[cfg]] += mass * c[cfg];
            }
        }
        kernel.matrix.swap(next);
    }
    return kernel;
}

std::vector<std::vector<int>> expand_units(const BeliefNetwork& net,
                                           const Assignment& evidence,
                                           const std::vector<std::vector<int>>& groups) {
    // Drop evidence variables from groups; uncovered free variables become
    // singletons. Units ordered by the topological position of their first
    // member.
    std::vector<char> covered(net.variable_count(), 0);
    std::vector<std::vector<int>> units;
    for (const auto& g : groups) {
        std::vector<int> unit;
        for (int m : g) {
            if (covered[static_cast<std::size_t>(m)])
                throw PreconditionError("groups overlap on '" + net.variable(m).name + "'");
            covered[static_cast<std::size_t>(m)] = 1;
            if (!evidence.assigned(m)) unit.push_back(m);
        }
        if (!unit.empty()) units.push_back(std::move(unit));
    }
    for (int v : net.topological_order())
        if (!covered[static_cast<std::size_t>(v)] && !evidence.assigned(v))
            units.push_back({v});

    std::vector<std::size_t> topo_pos(net.variable_count());
    const auto& topo = net.topological_order();
    for (std::size_t i = 0; i < topo.size(); ++i)
        topo_pos[static_cast<std::size_t>(topo[i])] = i;
    std::stable_sort(units.begin(), units.end(),
                     [&](const std::vector<int>& a, const std::vector<int>& b) {
                         return topo_pos[static_cast<std::size_t>(a.front())] <
                                topo_pos[static_cast<std::size_t>(b.front())];
                     });
    return units;
}

}  // namespace

SweepKernel gibbs_sweep_kernel(const BeliefNetwork& net, const Assignment& evidence,
                               const std::vector<int>& scan_order) {
    std::vector<std::vector<int>> units;
    if (scan_order.empty()) {
        for (int v : net.topological_order())
            if (!evidence.assigned(v)) units.push_back({v});
    } else {
        for (int v : scan_order)
            if (!evidence.assigned(v)) units.push_back({v});
    }
    return build_kernel(net, evidence, units);
}

SweepKernel blocked_sweep_kernel(const BeliefNetwork& net, const Assignment& evidence,
                                 const std::vector<std::vector<int>>& groups) {
    return build_kernel(net, evidence, expand_units(net, evidence, groups));
}

std::vector<double> exact_free_joint(const BeliefNetwork& net, const Assignment& evidence) {
    const std::vector<int> free = free_variables(net, evidence);
    const std::size_t n = state_space_size(net, free, kKernelStateBudget);
    if (n > kKernelStateBudget)
        throw BudgetError("exact_free_joint: state space exceeds budget");
    std::vector<double> pi(n, 0.0);
    Assignment a = evidence;
    for (int v : free) a.set(v, 0);
    std::size_t idx = 0;
    double total = 0.0;
    do {
        const double p = joint_probability(net, a.raw());
        pi[idx++] = p;
        total += p;
    } while (advance(net, free, a));
    if (total > 0.0)
        for (double& p : pi) p /= total;
    return pi;
}

double stationarity_residual(const SweepKernel& kernel, const std::vector<double>& pi) {
    const std::size_t n = kernel.state_count;
    double worst = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        double acc = 0.0;
        for (std::size_t row = 0; row < n; ++row)
            acc += pi[row] * kernel.matrix[row * n + col];
        worst = std::max(worst, std::abs(acc - pi[col]));
    }
    return worst;
}

}  // namespace bnsim
