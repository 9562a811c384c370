#include "bnsim/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bnsim/oracle.hpp"

namespace bnsim {

namespace {

std::vector<int> free_variables(const BeliefNetwork& net, const Assignment& evidence) {
    std::vector<int> free;
    for (std::size_t i = 0; i < net.variable_count(); ++i)
        if (!evidence.assigned(static_cast<int>(i))) free.push_back(static_cast<int>(i));
    return free;
}

bool matches_evidence(std::span<const int> state, const Assignment& evidence) {
    for (std::size_t i = 0; i < evidence.size(); ++i)
        if (evidence.assigned(static_cast<int>(i)) && state[i] != evidence[static_cast<int>(i)])
            return false;
    return true;
}

void init_report(EstimateReport& rep, const std::vector<int>& queries,
                 const BeliefNetwork& net) {
    rep.queries = queries;
    rep.estimates.resize(queries.size());
    rep.std_errors.resize(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
        rep.estimates[q].assign(net.domain_size(queries[q]), 0.0);
        rep.std_errors[q].assign(net.domain_size(queries[q]), 0.0);
    }
}

// Frequency estimates with binomial standard errors over the accepted records.
void unweighted_estimates(EstimateReport& rep, const SampleTrace& trace,
                          const BeliefNetwork& net) {
    std::size_t m = 0;
    std::vector<std::vector<double>> counts(rep.queries.size());
    for (std::size_t q = 0; q < rep.queries.size(); ++q)
        counts[q].assign(net.domain_size(rep.queries[q]), 0.0);
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        if (!trace.accepted(r)) continue;
        ++m;
        for (std::size_t q = 0; q < rep.queries.size(); ++q)
            counts[q][static_cast<std::size_t>(
                trace.value(r, static_cast<std::size_t>(rep.queries[q])))] += 1.0;
    }
    rep.n_used = m;
    rep.effective_sample_size = static_cast<double>(m);
    if (m == 0) {
        rep.defined = false;
        return;
    }
    for (std::size_t q = 0; q < rep.queries.size(); ++q)
        for (std::size_t v = 0; v < counts[q].size(); ++v) {
            const double p = counts[q][v] / static_cast<double>(m);
            rep.estimates[q][v] = p;
            rep.std_errors[q][v] = std::sqrt(p * (1.0 - p) / static_cast<double>(m));
        }
}

// Self-normalized importance-sampling estimates over accepted records:
// p = Σ w·1 / Σ w, se = sqrt(Σ w²(1 − p)²-style linearization) / Σ w.
void weighted_estimates(EstimateReport& rep, const SampleTrace& trace,
                        const BeliefNetwork& net) {
    double wsum = 0.0, w2sum = 0.0;
    std::size_t m = 0;
    std::vector<std::vector<double>> wcounts(rep.queries.size());
    for (std::size_t q = 0; q < rep.queries.size(); ++q)
        wcounts[q].assign(net.domain_size(rep.queries[q]), 0.0);
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        if (!trace.accepted(r)) continue;
        ++m;
        const double w = trace.weight(r);
        wsum += w;
        w2sum += w * w;
        for (std::size_t q = 0; q < rep.queries.size(); ++q)
            wcounts[q][static_cast<std::size_t>(
                trace.value(r, static_cast<std::size_t>(rep.queries[q])))] += w;
    }
    rep.n_used = m;
    rep.effective_sample_size = w2sum > 0.0 ? wsum * wsum / w2sum : 0.0;
    if (m == 0 || wsum <= 0.0) {
        rep.defined = false;
        return;
    }
    for (std::size_t q = 0; q < rep.queries.size(); ++q)
        for (std::size_t v = 0; v < wcounts[q].size(); ++v)
            rep.estimates[q][v] = wcounts[q][v] / wsum;
    // Second pass for the linearized variance.
    for (std::size_t r = 0; r < trace.record_count(); ++r) {
        if (!trace.accepted(r)) continue;
        const double w = trace.weight(r);
        for (std::size_t q = 0; q < rep.queries.size(); ++q) {
            const auto val = static_cast<std::size_t>(
                trace.value(r, static_cast<std::size_t>(rep.queries[q])));
            for (std::size_t v = 0; v < rep.estimates[q].size(); ++v) {
                const double x = (v == val ? 1.0 : 0.0) - rep.estimates[q][v];
                rep.std_errors[q][v] += w * w * x * x;
            }
        }
    }
    for (auto& se : rep.std_errors)
        for (double& e : se) e = std::sqrt(e) / wsum;
}

// Batch-means standard error for a correlated 0/1 (or probability) series.
double batch_means_stderr(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 4) return 0.0;
    const std::size_t batches = std::min<std::size_t>(100, n / 2);
    const std::size_t len = n / batches;
    double grand = 0.0;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += series[i];
        means[b] = s / static_cast<double>(len);
        grand += means[b];
    }
    grand /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - grand) * (m - grand);
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

int draw_from_row(const std::vector<double>& row, RngStream& rng) {
    return draw_index(row, rng.next_unit());
}

}  // namespace

Assignment logic_sample(const BeliefNetwork& net, RngStream& rng) {
    Assignment a(net.variable_count());
    for (int v : net.topological_order())
        a.set(v, draw_from_row(net.cpt_row(v, a), rng));
    return a;
}

SamplerResult rejection_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                 const std::vector<int>& queries, std::size_t n_simulations,
                                 RngStream& rng) {
    if (n_simulations == 0) throw PreconditionError("rejection_estimate: n must be >= 1");
    SamplerResult res{EstimateReport{}, SampleTrace("rejection", net)};
    res.report.scheme = "rejection";
    res.report.seed = rng.seed();
    res.report.n_requested = n_simulations;
    res.trace.seed = rng.seed();
    res.trace.generator_id = RngStream::generator_id();
    res.trace.evidence_desc = describe_assignment(net, evidence);
    res.trace.reserve(n_simulations);
    init_report(res.report, queries, net);

    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n_simulations; ++i) {
        const Assignment a = logic_sample(net, rng);
        const bool ok = matches_evidence(a.raw(), evidence);
        accepted += ok ? 1 : 0;
        res.trace.append(a.raw(), 1.0, ok);
    }
    res.report.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(n_simulations);
    unweighted_estimates(res.report, res.trace, net);
    return res;
}

SamplerResult likelihood_weighting_estimate(const BeliefNetwork& net,
                                            const Assignment& evidence,
                                            const std::vector<int>& queries,
                                            std::size_t n_simulations, RngStream& rng) {
    if (n_simulations == 0)
        throw PreconditionError("likelihood_weighting_estimate: n must be >= 1");
    SamplerResult res{EstimateReport{}, SampleTrace("likelihood-weighting", net)};
    res.report.scheme = "likelihood-weighting";
    res.report.seed = rng.seed();
    res.report.n_requested = n_simulations;
    res.trace.seed = rng.seed();
    res.trace.generator_id = RngStream::generator_id();
    res.trace.evidence_desc = describe_assignment(net, evidence);
    res.trace.reserve(n_simulations);
    init_report(res.report, queries, net);

    Assignment a(net.variable_count());
    for (std::size_t i = 0; i < n_simulations; ++i) {
        for (std::size_t k = 0; k < net.variable_count(); ++k) a.clear(static_cast<int>(k));
        double w = 1.0;
        for (int v : net.topological_order()) {
            const auto& row = net.cpt_row(v, a);
            if (evidence.assigned(v)) {
                a.set(v, evidence[v]);
                w *= row[static_cast<std::size_t>(evidence[v])];
            } else {
                a.set(v, draw_from_row(row, rng));
            }
        }
        res.trace.append(a.raw(), w, true);
    }
    res.report.acceptance_rate = 1.0;
    weighted_estimates(res.report, res.trace, net);
    return res;
}

SamplerResult uniform_proposal_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                        const std::vector<int>& queries,
                                        std::size_t n_simulations, RngStream& rng) {
    if (n_simulations == 0)
        throw PreconditionError("uniform_proposal_estimate: n must be >= 1");
    if (!net.all_binary())
        throw PreconditionError(
            "uniform_proposal_estimate: the 0.5 proposal is defined for binary networks only");
    SamplerResult res{EstimateReport{}, SampleTrace("uniform-proposal", net)};
    res.report.scheme = "uniform-proposal";
    res.report.seed = rng.seed();
    res.report.n_requested = n_simulations;
    res.trace.seed = rng.seed();
    res.trace.generator_id = RngStream::generator_id();
    res.trace.evidence_desc = describe_assignment(net, evidence);
    res.trace.reserve(n_simulations);
    init_report(res.report, queries, net);

    const double scale = std::ldexp(1.0, static_cast<int>(net.variable_count()));  // 2^n
    std::vector<int> state(net.variable_count());
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n_simulations; ++i) {
        for (std::size_t k = 0; k < state.size(); ++k)
            state[k] = rng.next_unit() < 0.5 ? 0 : 1;
        const double w = joint_probability(net, state) * scale;
        const bool ok = matches_evidence(state, evidence);
        accepted += ok ? 1 : 0;
        res.trace.append(state, w, ok);
    }
    res.report.acceptance_rate =
        static_cast<double>(accepted) / static_cast<double>(n_simulations);
    weighted_estimates(res.report, res.trace, net);
    return res;
}

namespace {

std::vector<int> resolve_scan_order(const BeliefNetwork& net, const Assignment& evidence,
                                    const std::vector<int>& requested) {
    const std::vector<int> free = free_variables(net, evidence);
    if (requested.empty()) {
        std::vector<int> order;
        for (int v : net.topological_order())
            if (!evidence.assigned(v)) order.push_back(v);
        return order;
    }
    std::set<int> want(free.begin(), free.end());
    std::set<int> got(requested.begin(), requested.end());
    if (want != got || requested.size() != free.size())
        throw PreconditionError(
            "scan order must be a permutation of the non-evidence variables");
    return requested;
}

void check_evidence_possible(const BeliefNetwork& net, const Assignment& evidence) {
    if (evidence.empty_assignment()) return;
    try {
        if (exact_posteriors(net, evidence, {}).evidence_probability <= 0.0)
            throw PreconditionError("evidence has probability zero: " +
                                    describe_assignment(net, evidence));
    } catch (const BudgetError&) {
        // Too large to verify; the caller asserted it.
    }
}

std::vector<int> initial_state(const BeliefNetwork& net, const Assignment& evidence,
                               GibbsInit init, RngStream& rng) {
    std::vector<int> state(net.variable_count());
    switch (init) {
        case GibbsInit::AllTrue:
            for (std::size_t i = 0; i < state.size(); ++i)
                state[i] = static_cast<int>(net.domain_size(static_cast<int>(i))) - 1;
            break;
        case GibbsInit::AllFalse:
            std::fill(state.begin(), state.end(), 0);
            break;
        case GibbsInit::UniformRandom:
            for (std::size_t i = 0; i < state.size(); ++i)
                state[i] = static_cast<int>(rng.next_unit() *
                                            static_cast<double>(net.domain_size(static_cast<int>(i))));
            break;
        case GibbsInit::ForwardSample: {
            Assignment a(net.variable_count());
            for (int v : net.topological_order()) {
                if (evidence.assigned(v)) {
                    a.set(v, evidence[v]);
                } else {
                    a.set(v, draw_index(net.cpt_row(v, a), rng.next_unit()));
                }
            }
            for (std::size_t i = 0; i < state.size(); ++i) state[i] = a[static_cast<int>(i)];
            return state;
        }
    }
    for (std::size_t i = 0; i < state.size(); ++i)
        if (evidence.assigned(static_cast<int>(i))) state[i] = evidence[static_cast<int>(i)];
    return state;
}

std::string state_description(const BeliefNetwork& net, const std::vector<int>& state) {
    Assignment a(net.variable_count());
    for (std::size_t i = 0; i < state.size(); ++i) a.set(static_cast<int>(i), state[i]);
    return describe_assignment(net, a);
}

struct SweepUnit {
    std::vector<int> members;        // non-evidence, declaration order
    std::vector<int> ext_children;   // discovery order, matches group_conditional
    std::size_t configs = 1;
};

// Joint conditional of a unit, multiplication order identical to
// group_conditional.
double unit_conditional(const BeliefNetwork& net, const SweepUnit& unit,
                        std::vector<int>& state, std::vector<double>& probs) {
    probs.resize(unit.configs);
    double total = 0.0;
    std::vector<int> saved(unit.members.size());
    for (std::size_t k = 0; k < unit.members.size(); ++k)
        saved[k] = state[static_cast<std::size_t>(unit.members[k])];
    for (std::size_t cfg = 0; cfg < unit.configs; ++cfg) {
        std::size_t rem = cfg;
        for (std::size_t k = unit.members.size(); k-- > 0;) {
            const int m = unit.members[k];
            const std::size_t d = net.domain_size(m);
            state[static_cast<std::size_t>(m)] = static_cast<int>(rem % d);
            rem /= d;
        }
        double w = 1.0;
        for (int m : unit.members)
            w *= net.cpt(m).rows[net.cpt_row_index(m, state)]
                               [static_cast<std::size_t>(state[static_cast<std::size_t>(m)])];
        for (int c : unit.ext_children) {
            if (w == 0.0) break;
            w *= net.cpt(c).rows[net.cpt_row_index(c, state)]
                               [static_cast<std::size_t>(state[static_cast<std::size_t>(c)])];
        }
        probs[cfg] = w;
        total += w;
    }
    for (std::size_t k = 0; k < unit.members.size(); ++k)
        state[static_cast<std::size_t>(unit.members[k])] = saved[k];
    return total;
}

void apply_unit_config(const BeliefNetwork& net, const SweepUnit& unit, std::size_t cfg,
                       std::vector<int>& state) {
    for (std::size_t k = unit.members.size(); k-- > 0;) {
        const int m = unit.members[k];
        const std::size_t d = net.domain_size(m);
        state[static_cast<std::size_t>(m)] = static_cast<int>(cfg % d);
        cfg /= d;
    }
}

SamplerResult run_sweeps(const BeliefNetwork& net, const Assignment& evidence,
                         const std::vector<SweepUnit>& units, std::size_t n_sweeps,
                         RngStream& rng, const GibbsOptions& options, std::string scheme) {
    check_evidence_possible(net, evidence);

    SamplerResult res{EstimateReport{}, SampleTrace(scheme, net)};
    res.report.scheme = scheme;
    res.report.seed = rng.seed();
    res.report.n_requested = n_sweeps;
    res.trace.seed = rng.seed();
    res.trace.generator_id = RngStream::generator_id();
    res.trace.evidence_desc = describe_assignment(net, evidence);
    for (const auto& u : units)
        for (int m : u.members)
            res.trace.scan_order.push_back(net.variable(m).name);
    res.trace.reserve(n_sweeps);

    const std::vector<int> queries = free_variables(net, evidence);
    init_report(res.report, queries, net);

    std::vector<int> state = initial_state(net, evidence, options.init, rng);
    res.trace.initial_state = state;

    // Rao-Blackwell estimation keeps the per-sweep conditionals so the
    // batch-means error can be computed per (query, value).
    std::vector<std::vector<std::vector<float>>> rb_value_series;
    if (options.rao_blackwell) {
        rb_value_series.resize(queries.size());
        for (std::size_t q = 0; q < queries.size(); ++q)
            rb_value_series[q].assign(net.domain_size(queries[q]), {});
    }

    std::vector<double> probs;
    std::size_t changes = 0;
    const std::size_t total_sweeps = options.burn_in + n_sweeps;
    std::vector<std::vector<double>> sweep_rb;  // per query var: conditional this sweep
    if (options.rao_blackwell) {
        sweep_rb.resize(net.variable_count());
    }

    for (std::size_t sweep = 0; sweep < total_sweeps; ++sweep) {
        bool changed = false;
        for (const SweepUnit& unit : units) {
            const double total = unit_conditional(net, unit, state, probs);
            if (total <= 0.0) {
                std::string members;
                for (int m : unit.members)
                    members += (members.empty() ? "" : "+") + net.variable(m).name;
                throw DegenerateConditionalError(
                    members, state_description(net, state),
                    "degenerate conditional for '" + members + "' in state " +
                        state_description(net, state) +
                        ": every candidate value has probability zero");
            }
            for (double& p : probs) p /= total;
            const std::size_t cfg =
                static_cast<std::size_t>(draw_index(probs, rng.next_unit()));
            if (options.rao_blackwell && sweep >= options.burn_in) {
                // Marginalize the unit conditional onto each member.
                for (std::size_t k = 0; k < unit.members.size(); ++k) {
                    const int m = unit.members[k];
                    auto& dest = sweep_rb[static_cast<std::size_t>(m)];
                    dest.assign(net.domain_size(m), 0.0);
                    std::size_t inner = 1;
                    for (std::size_t j = k + 1; j < unit.members.size(); ++j)
                        inner *= net.domain_size(unit.members[j]);
                    for (std::size_t c = 0; c < unit.configs; ++c)
                        dest[(c / inner) % net.domain_size(m)] += probs[c];
                }
            }
            // Did the unit's value move?
            std::size_t old_cfg = 0;
            for (int m : unit.members)
                old_cfg = old_cfg * net.domain_size(m) +
                          static_cast<std::size_t>(state[static_cast<std::size_t>(m)]);
            if (cfg != old_cfg) changed = true;
            apply_unit_config(net, unit, cfg, state);
        }
        if (changed) ++changes;
        if (sweep < options.burn_in) continue;
        res.trace.append(state, 1.0, true);
        if (options.rao_blackwell) {
            for (std::size_t q = 0; q < queries.size(); ++q) {
                const auto& cond = sweep_rb[static_cast<std::size_t>(queries[q])];
                for (std::size_t v = 0; v < cond.size(); ++v) {
                    res.report.estimates[q][v] += cond[v];
                    rb_value_series[q][v].push_back(static_cast<float>(cond[v]));
                }
            }
        }
    }

    res.report.state_changes = changes;
    res.report.fixated = total_sweeps > 0 && changes == 0;
    res.report.n_used = n_sweeps;
    res.report.acceptance_rate = 1.0;
    res.report.effective_sample_size = static_cast<double>(n_sweeps);

    if (n_sweeps == 0) {
        res.report.defined = false;
        return res;
    }

    std::vector<double> series(n_sweeps);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const std::size_t var = static_cast<std::size_t>(queries[q]);
        for (std::size_t v = 0; v < res.report.estimates[q].size(); ++v) {
            if (options.rao_blackwell) {
                res.report.estimates[q][v] /= static_cast<double>(n_sweeps);
                for (std::size_t r = 0; r < n_sweeps; ++r)
                    series[r] = static_cast<double>(rb_value_series[q][v][r]);
            } else {
                for (std::size_t r = 0; r < n_sweeps; ++r)
                    series[r] =
                        res.trace.value(r, var) == static_cast<int>(v) ? 1.0 : 0.0;
                double s = 0.0;
                for (double x : series) s += x;
                res.report.estimates[q][v] = s / static_cast<double>(n_sweeps);
            }
            res.report.std_errors[q][v] = batch_means_stderr(series);
        }
    }
    return res;
}

}  // namespace

SamplerResult gibbs_run(const BeliefNetwork& net, const Assignment& evidence,
                        std::size_t n_sweeps, RngStream& rng, const GibbsOptions& options) {
    const std::vector<int> order = resolve_scan_order(net, evidence, options.scan_order);
    std::vector<SweepUnit> units;
    for (int v : order) {
        SweepUnit u;
        u.members = {v};
        u.ext_children = net.children(v);
        u.configs = net.domain_size(v);
        units.push_back(std::move(u));
    }
    return run_sweeps(net, evidence, units, n_sweeps, rng, options, "gibbs");
}

std::vector<DeterministicGroup> detect_deterministic_groups(const BeliefNetwork& net) {
    const std::size_t n = net.variable_count();
    std::vector<char> functional(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        functional[i] = net.is_functional(static_cast<int>(i)) ? 1 : 0;

    // Union-find over functional variables linked by an arc.
    std::vector<int> root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = static_cast<int>(i);
    auto find = [&](int x) {
        while (root[static_cast<std::size_t>(x)] != x) {
            root[static_cast<std::size_t>(x)] =
                root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
            x = root[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!functional[i]) continue;
        for (int p : net.parents(static_cast<int>(i))) {
            if (!functional[static_cast<std::size_t>(p)]) continue;
            root[static_cast<std::size_t>(find(static_cast<int>(i)))] = find(p);
        }
    }

    std::map<int, std::vector<int>> buckets;
    for (std::size_t i = 0; i < n; ++i)
        if (functional[i]) buckets[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    std::vector<DeterministicGroup> groups;
    for (auto& [r, members] : buckets) {
        DeterministicGroup g;
        g.members = members;
        std::set<int> member_set(members.begin(), members.end());
        std::set<int> ext_parents, ext_children;
        for (int m : members) {
            for (int p : net.parents(m))
                if (!member_set.count(p)) ext_parents.insert(p);
            for (int c : net.children(m))
                if (!member_set.count(c)) ext_children.insert(c);
        }
        g.external_parents = {ext_parents.begin(), ext_parents.end()};
        g.external_children = {ext_children.begin(), ext_children.end()};
        groups.push_back(std::move(g));
    }
    std::sort(groups.begin(), groups.end(),
              [](const DeterministicGroup& a, const DeterministicGroup& b) {
                  return a.members.front() < b.members.front();
              });
    return groups;
}

SamplerResult blocked_gibbs_run(const BeliefNetwork& net, const Assignment& evidence,
                                const std::vector<std::vector<int>>& groups,
                                std::size_t n_sweeps, RngStream& rng,
                                const GibbsOptions& options) {
    if (!options.scan_order.empty())
        throw PreconditionError("blocked_gibbs_run: custom scan order is not supported");

    std::vector<char> covered(net.variable_count(), 0);
    std::vector<SweepUnit> units;
    for (const auto& g : groups) {
        SweepUnit u;
        for (int m : g) {
            if (m < 0 || static_cast<std::size_t>(m) >= net.variable_count())
                throw PreconditionError("blocked_gibbs_run: group names unknown variable");
            if (covered[static_cast<std::size_t>(m)])
                throw PreconditionError("blocked_gibbs_run: groups overlap on '" +
                                        net.variable(m).name + "'");
            covered[static_cast<std::size_t>(m)] = 1;
        }
        // Keep declaration order within the unit; drop clamped members.
        for (std::size_t i = 0; i < net.variable_count(); ++i) {
            const int v = static_cast<int>(i);
            if (std::find(g.begin(), g.end(), v) != g.end() && !evidence.assigned(v))
                u.members.push_back(v);
        }
        if (u.members.empty()) continue;
        units.push_back(std::move(u));
    }
    for (int v : net.topological_order())
        if (!covered[static_cast<std::size_t>(v)] && !evidence.assigned(v)) {
            SweepUnit u;
            u.members = {v};
            units.push_back(std::move(u));
        }

    // Order units like the blocked kernel does, fill in bookkeeping.
    std::vector<std::size_t> topo_pos(net.variable_count());
    const auto& topo = net.topological_order();
    for (std::size_t i = 0; i < topo.size(); ++i)
        topo_pos[static_cast<std::size_t>(topo[i])] = i;
    std::stable_sort(units.begin(), units.end(), [&](const SweepUnit& a, const SweepUnit& b) {
        return topo_pos[static_cast<std::size_t>(a.members.front())] <
               topo_pos[static_cast<std::size_t>(b.members.front())];
    });
    for (SweepUnit& u : units) {
        u.configs = 1;
        for (int m : u.members) {
            u.configs *= net.domain_size(m);
            if (u.configs > kGroupConfigBudget)
                throw PreconditionError("blocked_gibbs_run: group state space exceeds budget");
        }
        std::set<int> member_set(u.members.begin(), u.members.end());
        std::set<int> seen;
        for (int m : u.members)
            for (int c : net.children(m))
                if (!member_set.count(c) && seen.insert(c).second)
                    u.ext_children.push_back(c);
    }
    return run_sweeps(net, evidence, units, n_sweeps, rng, options, "blocked-gibbs");
}

SamplerResult clamped_forward_estimate(const BeliefNetwork& net, const Assignment& evidence,
                                       const std::vector<int>& queries, std::size_t n_simulations,
                                       RngStream& rng) {
    if (n_simulations == 0)
        throw PreconditionError("clamped_forward_estimate: n must be >= 1");
    std::string offending;
    for (std::size_t i = 0; i < net.variable_count(); ++i) {
        const int v = static_cast<int>(i);
        if (!evidence.assigned(v)) continue;
        for (int p : net.parents(v))
            if (!evidence.assigned(p))
                offending += (offending.empty() ? "" : ", ") + net.variable(p).name + "->" +
                             net.variable(v).name;
    }
    if (!offending.empty())
        throw PreconditionError(
            "clamped_forward_estimate: evidence variables have unobserved parents (" +
            offending + "); absorb the evidence first");

    SamplerResult res{EstimateReport{}, SampleTrace("clamped-forward", net)};
    res.report.scheme = "clamped-forward";
    res.report.seed = rng.seed();
    res.report.n_requested = n_simulations;
    res.trace.seed = rng.seed();
    res.trace.generator_id = RngStream::generator_id();
    res.trace.evidence_desc = describe_assignment(net, evidence);
    res.trace.reserve(n_simulations);
    init_report(res.report, queries, net);

    Assignment a(net.variable_count());
    for (std::size_t i = 0; i < n_simulations; ++i) {
        for (std::size_t k = 0; k < net.variable_count(); ++k) a.clear(static_cast<int>(k));
        for (int v : net.topological_order()) {
            if (evidence.assigned(v))
                a.set(v, evidence[v]);
            else
                a.set(v, draw_from_row(net.cpt_row(v, a), rng));
        }
        res.trace.append(a.raw(), 1.0, true);
    }
    res.report.acceptance_rate = 1.0;
    unweighted_estimates(res.report, res.trace, net);
    return res;
}

}  // namespace bnsim
