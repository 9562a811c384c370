// bnsim — belief-network stochastic simulation laboratory.
//
// Subcommands: validate, exact, sample, diagnose, transform, repro.
// Reports are JSON on stdout (or --out); traces and curve data are CSV files.
// Exit codes: 0 success, 1 validation/criterion/runtime failure, 2 usage error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnsim/diagnostics.hpp"
#include "bnsim/network.hpp"
#include "bnsim/oracle.hpp"
#include "bnsim/repro.hpp"
#include "bnsim/samplers.hpp"
#include "bnsim/transforms.hpp"
#include "bnsim/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace bnsim;

void emit(const ordered_json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write report to '" + out_path + "'");
        out << report.dump(2) << "\n";
    }
}

ordered_json report_header(const std::string& command, const ordered_json& config) {
    ordered_json j;
    j["tool"] = "bnsim";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    return j;
}

// JSON has no infinity; report it explicitly.
ordered_json json_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

std::uint64_t resolve_seed(std::int64_t requested) {
    if (requested >= 0) return static_cast<std::uint64_t>(requested);
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "seed: " << seed << " (generated)\n";
    return seed;
}

ordered_json estimates_json(const BeliefNetwork& net, const EstimateReport& rep) {
    ordered_json j = ordered_json::object();
    for (std::size_t q = 0; q < rep.queries.size(); ++q) {
        const Variable& var = net.variable(rep.queries[q]);
        j[var.name] = {{"values", var.values},
                       {"probabilities", rep.estimates[q]},
                       {"std_errors", rep.std_errors[q]}};
    }
    return j;
}

std::vector<int> parse_query_or_all_free(const BeliefNetwork& net, const std::string& text,
                                         const Assignment& evidence) {
    if (!text.empty()) return parse_variable_list(net, text);
    std::vector<int> free;
    for (std::size_t v = 0; v < net.variable_count(); ++v)
        if (!evidence.assigned(static_cast<int>(v))) free.push_back(static_cast<int>(v));
    return free;
}

// "A-B" -> (A, B)
std::pair<int, int> parse_arc(const BeliefNetwork& net, const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos)
        throw PreconditionError("expected an arc of the form FROM-TO, got '" + text + "'");
    return {net.require_variable(text.substr(0, dash)),
            net.require_variable(text.substr(dash + 1))};
}

// "A+B,C+D" -> {{A,B},{C,D}}
std::vector<std::vector<int>> parse_groups(const BeliefNetwork& net, const std::string& text) {
    std::vector<std::vector<int>> groups;
    std::stringstream ss(text);
    std::string group;
    while (std::getline(ss, group, ',')) {
        std::vector<int> members;
        std::stringstream gs(group);
        std::string name;
        while (std::getline(gs, name, '+')) members.push_back(net.require_variable(name));
        if (!members.empty()) groups.push_back(std::move(members));
    }
    return groups;
}

int cmd_validate(const std::string& net_path, const std::string& out_path) {
    std::ifstream in(net_path);
    if (!in) throw Error("cannot open network file '" + net_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const NetworkSpec spec = parse_network_spec(buf.str());
    const ValidationReport rep = validate(spec);

    ordered_json config{{"net", net_path}};
    ordered_json j = report_header("validate", config);
    j["findings"] = ordered_json::array();
    for (const auto& f : rep.findings)
        j["findings"].push_back(
            {{"severity", f.severity == Finding::Severity::Error ? "error" : "warning"},
             {"message", f.message}});
    j["ok"] = rep.ok();
    emit(j, out_path);
    return rep.ok() ? 0 : 1;
}

int cmd_exact(const std::string& net_path, const std::string& evidence_text,
              const std::string& query_text, const std::string& out_path) {
    const BeliefNetwork net = load_network_file(net_path);
    const Assignment evidence = parse_assignment(net, evidence_text);
    const std::vector<int> queries = parse_query_or_all_free(net, query_text, evidence);

    const auto start = std::chrono::steady_clock::now();
    const PosteriorTable table = exact_posteriors(net, evidence, queries);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ordered_json config{{"net", net_path}, {"evidence", evidence_text}, {"query", query_text}};
    ordered_json j = report_header("exact", config);
    j["evidence_probability"] = table.evidence_probability;
    j["defined"] = table.defined;
    j["posteriors"] = ordered_json::object();
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const Variable& var = net.variable(queries[q]);
        j["posteriors"][var.name] = {{"values", var.values},
                                     {"probabilities", table.posteriors[q]}};
    }
    j["elapsed_seconds"] = secs;
    emit(j, out_path);
    if (!table.defined)
        std::cerr << "evidence has probability zero; posteriors undefined\n";
    return table.defined ? 0 : 1;
}

struct SampleArgs {
    std::string scheme;
    std::string net_path;
    std::string evidence_text;
    std::string query_text;
    std::size_t n = 10000;
    std::size_t sweeps = 10000;
    std::int64_t seed = -1;
    std::string trace_path;
    std::string scan_order_text;
    std::string init_text = "all-true";
    std::string groups_text;
    std::size_t burn_in = 0;
    bool rao_blackwell = false;
    std::string out_path;
};

int cmd_sample(const SampleArgs& args) {
    const BeliefNetwork net = load_network_file(args.net_path);
    const Assignment evidence = parse_assignment(net, args.evidence_text);
    const std::vector<int> queries = parse_query_or_all_free(net, args.query_text, evidence);
    const std::uint64_t seed = resolve_seed(args.seed);
    RngStream rng(seed);

    GibbsOptions gopt;
    gopt.burn_in = args.burn_in;
    gopt.rao_blackwell = args.rao_blackwell;
    if (!args.scan_order_text.empty())
        gopt.scan_order = parse_variable_list(net, args.scan_order_text);
    if (args.init_text == "all-true") gopt.init = GibbsInit::AllTrue;
    else if (args.init_text == "all-false") gopt.init = GibbsInit::AllFalse;
    else if (args.init_text == "random") gopt.init = GibbsInit::UniformRandom;
    else if (args.init_text == "forward") gopt.init = GibbsInit::ForwardSample;
    else throw PreconditionError("unknown init policy '" + args.init_text + "'");

    const bool is_gibbs = args.scheme == "gibbs" || args.scheme == "blocked-gibbs";
    SamplerResult result;
    if (args.scheme == "logic") {
        if (!evidence.empty_assignment())
            throw PreconditionError(
                "logic sampling cannot condition on evidence; use rejection, lw, or gibbs");
        result = rejection_estimate(net, evidence, queries, args.n, rng);
        result.report.scheme = "logic";
    } else if (args.scheme == "rejection") {
        result = rejection_estimate(net, evidence, queries, args.n, rng);
    } else if (args.scheme == "lw") {
        result = likelihood_weighting_estimate(net, evidence, queries, args.n, rng);
    } else if (args.scheme == "uniform") {
        result = uniform_proposal_estimate(net, evidence, queries, args.n, rng);
    } else if (args.scheme == "gibbs") {
        result = gibbs_run(net, evidence, args.sweeps, rng, gopt);
    } else if (args.scheme == "blocked-gibbs") {
        std::vector<std::vector<int>> groups;
        if (!args.groups_text.empty()) {
            groups = parse_groups(net, args.groups_text);
        } else {
            for (const auto& g : detect_deterministic_groups(net)) groups.push_back(g.members);
        }
        result = blocked_gibbs_run(net, evidence, groups, args.sweeps, rng, gopt);
    } else if (args.scheme == "clamped-forward") {
        result = clamped_forward_estimate(net, evidence, queries, args.n, rng);
    } else {
        throw PreconditionError("unknown scheme '" + args.scheme + "'");
    }

    ordered_json config{{"scheme", args.scheme},
                        {"net", args.net_path},
                        {"evidence", args.evidence_text},
                        {"query", args.query_text},
                        {"n", args.n},
                        {"sweeps", args.sweeps},
                        {"seed", seed},
                        {"generator", RngStream::generator_id()},
                        {"init", args.init_text},
                        {"scan_order", args.scan_order_text},
                        {"groups", args.groups_text},
                        {"burn_in", args.burn_in},
                        {"rao_blackwell", args.rao_blackwell}};
    ordered_json j = report_header("sample", config);
    j["scheme"] = result.report.scheme;
    j["seed"] = seed;
    j["n_requested"] = result.report.n_requested;
    j["n_used"] = result.report.n_used;
    j["acceptance_rate"] = result.report.acceptance_rate;
    j["effective_sample_size"] = result.report.effective_sample_size;
    j["defined"] = result.report.defined;
    if (is_gibbs) {
        j["state_changes"] = result.report.state_changes;
        j["fixated"] = result.report.fixated;
        j["scan_order"] = result.trace.scan_order;
    }
    // Queries differ from the request for gibbs schemes (all free variables).
    j["estimates"] = estimates_json(net, result.report);

    if (!args.trace_path.empty()) {
        result.trace.write_csv_file(args.trace_path);
        j["trace"] = args.trace_path;
    }
    emit(j, args.out_path);

    if (is_gibbs && result.report.fixated) {
        std::cerr << "fixation: the state never changed over "
                  << (args.burn_in + args.sweeps)
                  << " sweeps; estimates reflect the initial state only. Deterministic "
                     "dependencies need blocked resampling (--scheme blocked-gibbs) or a "
                     "transformed network.\n";
        return 1;
    }
    if (!result.report.defined) {
        std::cerr << "estimate undefined: no usable samples (evidence may be impossible)\n";
        return 1;
    }
    return 0;
}

struct DiagnoseArgs {
    std::string metric;
    std::string net_path;
    std::string arc_text;
    std::string node;
    std::string value = "TRUE";
    std::string evidence_text;
    std::string trace_path;
    double truth = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.05;
    std::string grid_text = "0.5,0.25,0.1,0.05,0.01,0.005,0.001";
    std::size_t runs = 3;
    std::size_t sweeps = 0;
    std::int64_t seed = -1;
    std::string out_path;
};

int cmd_diagnose(const DiagnoseArgs& args) {
    ordered_json config{{"metric", args.metric},   {"net", args.net_path},
                        {"arc", args.arc_text},    {"node", args.node},
                        {"value", args.value},     {"evidence", args.evidence_text},
                        {"trace", args.trace_path}};
    ordered_json j = report_header("diagnose", config);

    auto dependence_json = [&](const DependenceReport& rep) {
        j["subject"] = rep.subject;
        j["method"] = rep.method;
        j["D"] = rep.dependence;
        j["SM"] = json_number(rep.simulation_multiple);
        j["SM_infinite"] = rep.infinite_multiple();
    };

    if (args.metric == "D") {
        const BeliefNetwork net = load_network_file(args.net_path);
        const auto [from, to] = parse_arc(net, args.arc_text);
        dependence_json(pairwise_dependence(net, from, to));
    } else if (args.metric == "blanket-D") {
        const BeliefNetwork net = load_network_file(args.net_path);
        dependence_json(blanket_dependence(net, net.require_variable(args.node)));
    } else if (args.metric == "flip") {
        const BeliefNetwork net = load_network_file(args.net_path);
        const Assignment evidence = parse_assignment(net, args.evidence_text);
        j["node"] = args.node;
        j["worst_case_flip_probability"] =
            worst_case_flip_probability(net, net.require_variable(args.node), evidence);
    } else if (args.metric == "tau") {
        const SampleTrace trace = SampleTrace::read_csv_file(args.trace_path);
        const auto tau = integrated_autocorrelation_time(trace, args.node, args.value);
        j["node"] = args.node;
        j["value"] = args.value;
        j["defined"] = tau.has_value();
        j["tau"] = tau ? ordered_json(*tau) : ordered_json(nullptr);
        if (!tau) std::cerr << "tau undefined: the series is constant\n";
    } else if (args.metric == "sojourn") {
        const SampleTrace trace = SampleTrace::read_csv_file(args.trace_path);
        const SojournStats stats = sojourn_statistics(trace, args.node);
        j["node"] = args.node;
        j["per_value"] = ordered_json::array();
        for (const auto& pv : stats.per_value)
            j["per_value"].push_back({{"value", pv.label},
                                      {"completed_runs", pv.completed_runs},
                                      {"mean_length", json_number(pv.mean_length)},
                                      {"max_length", pv.max_length},
                                      {"censored_length", pv.censored_length}});
    } else if (args.metric == "profile") {
        const SampleTrace trace = SampleTrace::read_csv_file(args.trace_path);
        double truth = args.truth;
        if (std::isnan(truth)) {
            if (args.net_path.empty())
                throw PreconditionError("profile needs --truth or --net to compute it");
            const BeliefNetwork net = load_network_file(args.net_path);
            const Assignment evidence = parse_assignment(net, args.evidence_text);
            const int node = net.require_variable(args.node);
            const PosteriorTable table = exact_posteriors(net, evidence, {node});
            truth = table.posteriors[0][static_cast<std::size_t>(
                net.require_value(node, args.value))];
        }
        const ConvergenceProfile prof =
            convergence_profile(trace, args.node, args.value, truth, args.epsilon);
        if (args.out_path.empty()) {
            prof.write_csv(std::cout);
        } else {
            std::ofstream out(args.out_path);
            if (!out) throw Error("cannot write '" + args.out_path + "'");
            prof.write_csv(out);
        }
        std::cerr << "truth " << truth << ", entry sweep "
                  << (prof.entry_sweep == 0 ? std::string("never")
                                            : std::to_string(prof.entry_sweep))
                  << " at epsilon " << args.epsilon << "\n";
        return 0;
    } else if (args.metric == "sm-sweep") {
        SmSweepOptions sopt;
        sopt.runs_per_point = args.runs;
        sopt.sweeps_per_run = args.sweeps;
        sopt.seed = resolve_seed(args.seed);
        std::vector<double> grid;
        std::stringstream ss(args.grid_text);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
        const std::vector<SmSweepRow> rows = sm_sweep(grid, sopt);
        if (args.out_path.empty()) {
            write_sm_sweep_csv(std::cout, rows);
        } else {
            std::ofstream out(args.out_path);
            if (!out) throw Error("cannot write '" + args.out_path + "'");
            write_sm_sweep_csv(out, rows);
        }
        return 0;
    } else {
        throw PreconditionError("unknown metric '" + args.metric + "'");
    }
    emit(j, args.out_path);
    return 0;
}

struct TransformArgs {
    std::string op;
    std::string net_path;
    std::string arc_text;
    std::string node;
    std::string evidence_text;  // variable names (values are irrelevant here)
    std::string query_text;
    std::string out_net_path;
    std::string plan_path;
};

int cmd_transform(const TransformArgs& args) {
    const BeliefNetwork net = load_network_file(args.net_path);
    TransformPlan plan;
    plan.input_digest = network_digest(net);
    BeliefNetwork out = net;

    if (args.op == "prune") {
        const std::vector<int> j = parse_variable_list(net, args.evidence_text);
        const std::vector<int> k = parse_variable_list(net, args.query_text);
        PruneResult pr = prune(net, j, k);
        TransformStep step;
        step.kind = TransformStep::Kind::Prune;
        step.operands = pr.removed;
        plan.steps.push_back(step);
        for (int v : j) plan.evidence.push_back(net.variable(v).name);
        for (int v : k) plan.queries.push_back(net.variable(v).name);
        out = std::move(pr.network);
    } else if (args.op == "reverse") {
        const auto [from, to] = parse_arc(net, args.arc_text);
        TransformStep step;
        step.kind = TransformStep::Kind::Reverse;
        step.operands = {net.variable(from).name, net.variable(to).name};
        out = reverse_arc(net, from, to, &step.cost);
        plan.total_cost += step.cost;
        plan.steps.push_back(step);
    } else if (args.op == "reduce") {
        const int node = net.require_variable(args.node);
        TransformStep step;
        step.kind = TransformStep::Kind::Reduce;
        step.operands = {args.node};
        out = reduce_node(net, node, &step.cost);
        plan.total_cost += step.cost;
        plan.steps.push_back(step);
    } else if (args.op == "absorb") {
        const std::vector<int> j = parse_variable_list(net, args.evidence_text);
        const std::vector<int> k = parse_variable_list(net, args.query_text);
        AbsorbResult ab = absorb_evidence(net, j, k);
        plan = std::move(ab.plan);
        out = std::move(ab.network);
    } else {
        throw PreconditionError("unknown transform op '" + args.op + "'");
    }

    const std::string net_json = serialize_network(out);
    if (args.out_net_path.empty()) {
        std::cout << net_json;
    } else {
        std::ofstream f(args.out_net_path);
        if (!f) throw Error("cannot write '" + args.out_net_path + "'");
        f << net_json;
    }
    if (!args.plan_path.empty()) {
        std::ofstream f(args.plan_path);
        if (!f) throw Error("cannot write '" + args.plan_path + "'");
        f << plan.to_json();
    }
    std::cerr << "steps: " << plan.steps.size()
              << ", cpt entries created: " << plan.total_cost.cpt_entries_created
              << ", arcs added: " << plan.total_cost.arcs_added << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"belief-network stochastic simulation laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    auto* validate_cmd = app.add_subcommand("validate", "check a network file");
    std::string v_net, v_out;
    validate_cmd->add_option("--net", v_net, "network file")->required();
    validate_cmd->add_option("--out", v_out, "report path (default stdout)");

    auto* exact_cmd = app.add_subcommand("exact", "exact posteriors by enumeration");
    std::string e_net, e_evidence, e_query, e_out;
    exact_cmd->add_option("--net", e_net, "network file")->required();
    exact_cmd->add_option("--evidence", e_evidence, "VAR=VALUE,...");
    exact_cmd->add_option("--query", e_query, "VAR,... (default: all non-evidence)");
    exact_cmd->add_option("--out", e_out, "report path (default stdout)");

    auto* sample_cmd = app.add_subcommand("sample", "run a stochastic simulation scheme");
    SampleArgs s;
    sample_cmd->add_option("--scheme", s.scheme,
                           "logic|rejection|lw|uniform|gibbs|blocked-gibbs|clamped-forward")
        ->required();
    sample_cmd->add_option("--net", s.net_path, "network file")->required();
    sample_cmd->add_option("--evidence", s.evidence_text, "VAR=VALUE,...");
    sample_cmd->add_option("--query", s.query_text, "VAR,... (default: all non-evidence)");
    sample_cmd->add_option("-n,--n", s.n, "simulations (forward schemes)");
    sample_cmd->add_option("--sweeps", s.sweeps, "sweeps (gibbs schemes)");
    sample_cmd->add_option("--seed", s.seed, "rng seed (generated and printed if absent)");
    sample_cmd->add_option("--trace", s.trace_path, "write the sample trace CSV here");
    sample_cmd->add_option("--scan-order", s.scan_order_text, "VAR,... (gibbs)");
    sample_cmd->add_option("--init", s.init_text, "all-true|all-false|random|forward");
    sample_cmd->add_option("--groups", s.groups_text,
                           "A+B,C... (blocked-gibbs; default: detected deterministic groups)");
    sample_cmd->add_option("--burn-in", s.burn_in, "sweeps discarded before recording");
    sample_cmd->add_flag("--rao-blackwell", s.rao_blackwell,
                         "average conditionals instead of indicators (gibbs)");
    sample_cmd->add_option("--out", s.out_path, "report path (default stdout)");

    auto* diagnose_cmd = app.add_subcommand("diagnose", "dependence and mixing diagnostics");
    DiagnoseArgs d;
    diagnose_cmd->add_option("--metric", d.metric,
                             "D|blanket-D|flip|tau|sojourn|profile|sm-sweep")
        ->required();
    diagnose_cmd->add_option("--net", d.net_path, "network file");
    diagnose_cmd->add_option("--arc", d.arc_text, "FROM-TO (metric D)");
    diagnose_cmd->add_option("--node", d.node, "variable name");
    diagnose_cmd->add_option("--value", d.value, "value label (default TRUE)");
    diagnose_cmd->add_option("--evidence", d.evidence_text, "VAR=VALUE,...");
    diagnose_cmd->add_option("--trace", d.trace_path, "trace CSV (tau/sojourn/profile)");
    diagnose_cmd->add_option("--truth", d.truth, "exact probability for profile");
    diagnose_cmd->add_option("--eps", d.epsilon, "profile tolerance (default 0.05)");
    diagnose_cmd->add_option("--grid", d.grid_text, "q grid for sm-sweep");
    diagnose_cmd->add_option("--runs", d.runs, "runs per sm-sweep point");
    diagnose_cmd->add_option("--sweeps", d.sweeps, "sweeps per sm-sweep run (0 = 1000/q)");
    diagnose_cmd->add_option("--seed", d.seed, "rng seed for sm-sweep");
    diagnose_cmd->add_option("--out", d.out_path, "report/CSV path (default stdout)");

    auto* transform_cmd = app.add_subcommand("transform", "modify a network");
    TransformArgs t;
    transform_cmd->add_option("--op", t.op, "prune|reverse|reduce|absorb")->required();
    transform_cmd->add_option("--net", t.net_path, "network file")->required();
    transform_cmd->add_option("--arc", t.arc_text, "FROM-TO (reverse)");
    transform_cmd->add_option("--node", t.node, "variable (reduce)");
    transform_cmd->add_option("--evidence", t.evidence_text, "J variable names (prune/absorb)");
    transform_cmd->add_option("--query", t.query_text, "K variable names (prune/absorb)");
    transform_cmd->add_option("--out-net", t.out_net_path, "output network path (default stdout)");
    transform_cmd->add_option("--plan", t.plan_path, "write the transform plan JSON here");

    auto* repro_cmd = app.add_subcommand("repro", "run the benchmark reproduction suite");
    ReproOptions r;
    std::int64_t r_seed = -1;
    repro_cmd->add_option("--only", r.filter, "run only criteria whose id contains this");
    repro_cmd->add_option("--fixtures", r.fixtures_dir, "fixtures directory (default ./fixtures)");
    repro_cmd->add_option("--seed", r_seed, "base seed (default fixed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*validate_cmd) return cmd_validate(v_net, v_out);
        if (*exact_cmd) return cmd_exact(e_net, e_evidence, e_query, e_out);
        if (*sample_cmd) return cmd_sample(s);
        if (*diagnose_cmd) return cmd_diagnose(d);
        if (*transform_cmd) return cmd_transform(t);
        if (*repro_cmd) {
            if (r_seed >= 0) r.seed = static_cast<std::uint64_t>(r_seed);
            const auto results = run_repro(r);
            return print_repro_table(std::cout, results) ? 0 : 1;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& f : e.report.findings)
            std::cerr << "  [" << (f.severity == Finding::Severity::Error ? "error" : "warning")
                      << "] " << f.message << "\n";
        return 1;
    } catch (const DegenerateConditionalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
