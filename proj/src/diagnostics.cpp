#include "bnsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include <fftw3.h>

#include "bnsim/format.hpp"
#include "bnsim/oracle.hpp"
#include "bnsim/samplers.hpp"

namespace bnsim {

namespace {

double min_term(double p) { return std::min(p, 1.0 - p); }

DependenceReport make_report(std::string subject, std::string method, double d) {
    DependenceReport rep;
    rep.subject = std::move(subject);
    rep.method = std::move(method);
    rep.dependence = d;
    rep.simulation_multiple =
        d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
    return rep;
}

// Autocovariance of a mean-subtracted series for all lags, via FFT
// (biased 1/N normalization).
std::vector<double> autocovariance(const std::vector<double>& series) {
    const std::size_t n = series.size();
    std::size_t padded = 1;
    while (padded < 2 * n) padded <<= 1;

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);

    std::vector<double> buf(padded, 0.0);
    for (std::size_t i = 0; i < n; ++i) buf[i] = series[i] - mean;

    const std::size_t nc = padded / 2 + 1;
    fftw_complex* spec =
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc));
    fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(padded), buf.data(), spec,
                                         FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (std::size_t i = 0; i < nc; ++i) {
        spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
        spec[i][1] = 0.0;
    }
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(padded), spec, buf.data(),
                                         FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    fftw_free(spec);

    std::vector<double> gamma(n);
    const double scale = 1.0 / (static_cast<double>(padded) * static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) gamma[k] = buf[k] * scale;
    return gamma;
}

std::vector<double> indicator_series(const SampleTrace& trace, const std::string& node,
                                     const std::string& value) {
    const int var = trace.variable_index(node);
    if (var < 0) throw PreconditionError("trace has no column for '" + node + "'");
    const int val = trace.value_index(static_cast<std::size_t>(var), value);
    std::vector<double> series(trace.record_count(), 0.0);
    if (val < 0) return series;  // label never appears: constant zero series
    for (std::size_t r = 0; r < trace.record_count(); ++r)
        series[r] = trace.value(r, static_cast<std::size_t>(var)) == val ? 1.0 : 0.0;
    return series;
}

}  // namespace

bool DependenceReport::infinite_multiple() const {
    return std::isinf(simulation_multiple);
}

DependenceReport pairwise_dependence(const BeliefNetwork& net, int from, int to) {
    const auto& parents = net.parents(to);
    if (parents.size() != 1 || parents[0] != from)
        throw PreconditionError("pairwise_dependence: '" + net.variable(from).name +
                                "' must be the only parent of '" + net.variable(to).name +
                                "' (use the blanket variant otherwise)");
    if (net.domain_size(from) != 2 || net.domain_size(to) != 2)
        throw PreconditionError("pairwise_dependence is defined for binary variables");
    double d = 0.0;
    for (const auto& row : net.cpt(to).rows) d += min_term(row[1]);
    return make_report(net.variable(from).name + "-" + net.variable(to).name, "pairwise", d);
}

DependenceReport blanket_dependence(const BeliefNetwork& net, int node) {
    if (!net.all_binary())
        throw PreconditionError("blanket_dependence is defined for binary networks");
    const MarkovBlanket mb = markov_blanket(net, node);

    // The linking probabilities are the rows of the blanket factors: the
    // node's own CPT (one entry per parent configuration) and each child's
    // CPT (one entry per configuration of the child's parents, the node
    // included). Sum over the joint row space, multiplying one
    // min(p, 1−p) term per factor; min(p, 1−p) already covers the
    // factor's target value. On a two-node network this is exactly the
    // pairwise arc dependence, seen from either end.
    std::set<int> scope_set(mb.parents.begin(), mb.parents.end());
    for (int c : mb.children)
        for (int p : net.parents(c)) scope_set.insert(p);  // includes the node
    const std::vector<int> scope(scope_set.begin(), scope_set.end());

    // A node with no linking factor at all: fall back to its own prior.
    // This is a convention, not forced by anything.
    if (scope.empty())
        return make_report(net.variable(node).name, "blanket-formula",
                           min_term(net.cpt(node).rows[0][1]));

    std::size_t configs = 1;
    for (int v : scope) {
        configs *= net.domain_size(v);
        if (configs > kBlanketConfigBudget)
            throw BudgetError("blanket_dependence: blanket configuration space exceeds budget");
    }

    Assignment w(net.variable_count());
    double d = 0.0;
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
        std::size_t rem = cfg;
        for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
            w.set(*it, static_cast<int>(rem % net.domain_size(*it)));
            rem /= net.domain_size(*it);
        }
        double term = mb.parents.empty() ? 1.0 : min_term(net.cpt_row(node, w)[1]);
        for (int c : mb.children) {
            if (term == 0.0) break;
            term *= min_term(net.cpt_row(c, w)[1]);
        }
        d += term;
    }
    return make_report(net.variable(node).name, "blanket-formula", d);
}

double worst_case_flip_probability(const BeliefNetwork& net, int node,
                                   const Assignment& evidence) {
    const MarkovBlanket mb = markov_blanket(net, node);
    const std::vector<int> blanket = mb.members();

    std::vector<int> open;  // blanket members not pinned by evidence
    std::size_t configs = 1;
    for (int b : blanket) {
        if (evidence.assigned(b)) continue;
        open.push_back(b);
        configs *= net.domain_size(b);
        if (configs > kBlanketConfigBudget)
            throw BudgetError(
                "worst_case_flip_probability: blanket configuration space exceeds budget");
    }

    Assignment w = evidence;
    w.clear(node);
    double worst = 1.0;
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
        std::size_t rem = cfg;
        for (auto it = open.rbegin(); it != open.rend(); ++it) {
            w.set(*it, static_cast<int>(rem % net.domain_size(*it)));
            rem /= net.domain_size(*it);
        }
        const LocalConditional lc = blanket_conditional(net, node, w);
        double flip = 0.0;
        if (!lc.degenerate) {
            const double stickiest = *std::max_element(lc.probs.begin(), lc.probs.end());
            flip = 1.0 - stickiest;
        }
        worst = std::min(worst, flip);
        if (worst == 0.0) break;
    }
    return worst;
}

const SojournStats::PerValue& SojournStats::for_label(const std::string& label) const {
    for (const auto& pv : per_value)
        if (pv.label == label) return pv;
    throw PreconditionError("no sojourn statistics for value '" + label + "'");
}

SojournStats sojourn_statistics(const SampleTrace& trace, const std::string& node) {
    const int var = trace.variable_index(node);
    if (var < 0) throw PreconditionError("trace has no column for '" + node + "'");
    if (trace.record_count() == 0)
        throw PreconditionError("sojourn_statistics: empty trace");

    const auto& labels = trace.value_labels()[static_cast<std::size_t>(var)];
    SojournStats stats;
    stats.per_value.resize(labels.size());
    std::vector<double> sums(labels.size(), 0.0);
    for (std::size_t v = 0; v < labels.size(); ++v) stats.per_value[v].label = labels[v];

    int cur = trace.value(0, static_cast<std::size_t>(var));
    std::size_t run = 1;
    for (std::size_t r = 1; r < trace.record_count(); ++r) {
        const int x = trace.value(r, static_cast<std::size_t>(var));
        if (x == cur) {
            ++run;
            continue;
        }
        auto& pv = stats.per_value[static_cast<std::size_t>(cur)];
        ++pv.completed_runs;
        sums[static_cast<std::size_t>(cur)] += static_cast<double>(run);
        pv.max_length = std::max(pv.max_length, run);
        cur = x;
        run = 1;
    }
    // The final run never observed its end.
    stats.per_value[static_cast<std::size_t>(cur)].censored_length = run;

    for (std::size_t v = 0; v < labels.size(); ++v) {
        auto& pv = stats.per_value[v];
        pv.mean_length = pv.completed_runs > 0
                             ? sums[v] / static_cast<double>(pv.completed_runs)
                             : std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

std::optional<double> integrated_autocorrelation_time(const std::vector<double>& series) {
    if (series.size() < 4) return std::nullopt;
    bool constant = true;
    for (double x : series)
        if (x != series[0]) {
            constant = false;
            break;
        }
    if (constant) return std::nullopt;

    const std::vector<double> gamma = autocovariance(series);
    const double g0 = gamma[0];
    if (g0 <= 0.0) return std::nullopt;

    // Geyer initial positive sequence: accumulate paired lag sums while they
    // stay positive.
    double acc = 0.0;  // Σ Γ_m over kept pairs, Γ_m = γ(2m) + γ(2m+1)
    for (std::size_t m = 0; 2 * m + 1 < gamma.size(); ++m) {
        const double pair = gamma[2 * m] + gamma[2 * m + 1];
        if (pair <= 0.0) break;
        acc += pair;
    }
    const double tau = 2.0 * acc / g0 - 1.0;
    return std::max(1.0, tau);
}

std::optional<double> integrated_autocorrelation_time(const SampleTrace& trace,
                                                      const std::string& node,
                                                      const std::string& value) {
    return integrated_autocorrelation_time(indicator_series(trace, node, value));
}

void ConvergenceProfile::write_csv(std::ostream& out) const {
    out << "sweep,estimate,error\n";
    for (std::size_t t = 0; t < running_estimate.size(); ++t)
        out << (t + 1) << ',' << format_double(running_estimate[t]) << ','
            << format_double(running_estimate[t] - truth) << '\n';
}

ConvergenceProfile convergence_profile(const SampleTrace& trace, const std::string& node,
                                       const std::string& value, double truth,
                                       double epsilon) {
    const std::vector<double> x = indicator_series(trace, node, value);
    ConvergenceProfile prof;
    prof.truth = truth;
    prof.epsilon = epsilon;
    prof.running_estimate.resize(x.size());
    double s = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        s += x[t];
        prof.running_estimate[t] = s / static_cast<double>(t + 1);
    }
    prof.entry_sweep = 0;
    for (std::size_t t = x.size(); t-- > 0;) {
        if (std::abs(prof.running_estimate[t] - truth) >= epsilon) {
            prof.entry_sweep = t + 2 <= x.size() ? t + 2 : 0;  // next sweep, 1-based
            return prof;
        }
    }
    prof.entry_sweep = x.empty() ? 0 : 1;
    return prof;
}

std::vector<SmSweepRow> sm_sweep(const std::vector<double>& q_grid,
                                 const SmSweepOptions& options) {
    std::vector<SmSweepRow> rows;
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        const double q = q_grid[i];
        if (!(q > 0.0 && q <= 0.5))
            throw PreconditionError("sm_sweep: q must lie in (0, 0.5]");
        NetworkSpec spec;
        spec.variables = {{"A", {"FALSE", "TRUE"}}, {"B", {"FALSE", "TRUE"}}};
        spec.cpts = {{"A", {}, {{0.5, 0.5}}},
                     {"B", {"A"}, {{1.0 - q, q}, {q, 1.0 - q}}}};
        const BeliefNetwork net{spec};

        const std::size_t sweeps =
            options.sweeps_per_run > 0
                ? options.sweeps_per_run
                : static_cast<std::size_t>(std::ceil(1000.0 / q));

        SmSweepRow row;
        row.q = q;
        row.dependence = 2.0 * q;
        row.predicted_multiple = 1.0 / (2.0 * q);
        row.runs = options.runs_per_point;
        double tau_sum = 0.0;
        std::size_t measured = 0;
        for (std::size_t r = 0; r < options.runs_per_point; ++r) {
            RngStream rng(options.seed + 1000 * i + r);
            const SamplerResult res =
                gibbs_run(net, Assignment(net.variable_count()), sweeps, rng);
            if (auto tau = integrated_autocorrelation_time(res.trace, "A", "TRUE")) {
                tau_sum += *tau;
                ++measured;
            }
        }
        row.measured_tau = measured > 0 ? tau_sum / static_cast<double>(measured)
                                        : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

void write_sm_sweep_csv(std::ostream& out, const std::vector<SmSweepRow>& rows) {
    out << "q,D,SM_pred,tau_hat,runs\n";
    for (const auto& r : rows)
        out << format_double(r.q) << ',' << format_double(r.dependence) << ','
            << format_double(r.predicted_multiple) << ',' << format_double(r.measured_tau)
            << ',' << r.runs << '\n';
}

}  // namespace bnsim
