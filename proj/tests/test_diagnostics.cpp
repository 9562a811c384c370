#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bnsim/diagnostics.hpp"
#include "bnsim/oracle.hpp"
#include "bnsim/samplers.hpp"
#include "support.hpp"

using namespace bnsim;

namespace {

// A trace with one column built from an explicit 0/1 series.
SampleTrace trace_from_series(const std::vector<int>& series) {
    NetworkSpec spec;
    spec.variables = {{"X", {"FALSE", "TRUE"}}};
    spec.cpts = {{"X", {}, {{0.5, 0.5}}}};
    const BeliefNetwork net{spec};
    SampleTrace t("synthetic", net);
    for (int v : series) {
        const int state[1] = {v};
        t.append(state, 1.0, true);
    }
    return t;
}

}  // namespace

TEST_CASE("pairwise dependence: the three published points") {
    {
        const BeliefNetwork net = test::fixture("fig2-2.json");
        const DependenceReport rep = pairwise_dependence(net, 0, 1);
        CHECK(rep.dependence == doctest::Approx(0.002).epsilon(1e-12));
        CHECK(rep.simulation_multiple == doctest::Approx(500.0).epsilon(1e-12));
        CHECK(rep.subject == "A-B");
        CHECK_FALSE(rep.infinite_multiple());
    }
    {
        const BeliefNetwork net = test::fixture("fig2-4.json");
        const DependenceReport rep = pairwise_dependence(net, 0, 1);
        CHECK(rep.dependence == doctest::Approx(0.501).epsilon(1e-12));
        CHECK(rep.simulation_multiple == doctest::Approx(1.0 / 0.501).epsilon(1e-12));
    }
    {
        // Equal rows: dependence 1, random-simulation equivalent.
        const BeliefNetwork net = parse_network(R"({
          "variables": [{"name": "A", "values": ["FALSE","TRUE"]},
                        {"name": "B", "values": ["FALSE","TRUE"]}],
          "cpts": [
            {"child": "A", "parents": [], "rows": [[0.5,0.5]]},
            {"child": "B", "parents": ["A"], "rows": [[0.5,0.5],[0.5,0.5]]}
          ]})");
        const DependenceReport rep = pairwise_dependence(net, 0, 1);
        CHECK(rep.dependence == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.simulation_multiple == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pairwise dependence refuses multi-parent targets") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    CHECK_THROWS_AS((void)pairwise_dependence(net, net.require_variable("B"),
                                              net.require_variable("E")),
                    PreconditionError);
}

TEST_CASE("blanket dependence: two-node reduction, zero with a deterministic child") {
    {
        const BeliefNetwork net = test::fixture("fig2-2.json");
        CHECK(blanket_dependence(net, 0).dependence == doctest::Approx(0.002).epsilon(1e-12));
        CHECK(blanket_dependence(net, 1).dependence == doctest::Approx(0.002).epsilon(1e-12));
    }
    {
        const BeliefNetwork net = test::fixture("fig2-1.json");
        const DependenceReport rep = blanket_dependence(net, net.require_variable("B"));
        CHECK(rep.dependence == 0.0);
        CHECK(rep.infinite_multiple());
    }
    {
        const BeliefNetwork net = parse_network(R"({
          "variables": [{"name": "X", "values": ["FALSE","TRUE"]}],
          "cpts": [{"child": "X", "parents": [], "rows": [[0.7,0.3]]}]})");
        const DependenceReport rep = blanket_dependence(net, 0);
        CHECK(rep.dependence == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(rep.simulation_multiple == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
    }
}

TEST_CASE("blanket dependence reduces to pairwise on random two-node networks") {
    RngStream rng(81);
    for (int trial = 0; trial < 25; ++trial) {
        NetworkSpec spec;
        spec.variables = {{"A", {"FALSE", "TRUE"}}, {"B", {"FALSE", "TRUE"}}};
        const double pa = 0.05 + 0.9 * rng.next_unit();
        const double p0 = 0.05 + 0.9 * rng.next_unit();
        const double p1 = 0.05 + 0.9 * rng.next_unit();
        spec.cpts = {{"A", {}, {{1.0 - pa, pa}}},
                     {"B", {"A"}, {{1.0 - p0, p0}, {1.0 - p1, p1}}}};
        const BeliefNetwork net{spec};
        const DependenceReport pw = pairwise_dependence(net, 0, 1);
        CHECK(blanket_dependence(net, 0).dependence ==
              doctest::Approx(pw.dependence).epsilon(1e-12));
        CHECK(blanket_dependence(net, 1).dependence ==
              doctest::Approx(pw.dependence).epsilon(1e-12));
        // The multiple is the exact inverse whenever D > 0.
        CHECK(std::abs(pw.simulation_multiple * pw.dependence - 1.0) <= 1e-15);
    }
}

TEST_CASE("worst-case flip probability") {
    {
        const BeliefNetwork net = test::fixture("fig2-2.json");
        CHECK(worst_case_flip_probability(net, 0, Assignment(2)) ==
              doctest::Approx(0.001).epsilon(1e-12));
    }
    {
        const BeliefNetwork net = test::fixture("fig2-1.json");
        const Assignment evidence = parse_assignment(net, "E=TRUE");
        // The configuration with D false clamps B outright.
        CHECK(worst_case_flip_probability(net, net.require_variable("B"), evidence) == 0.0);
    }
    {
        const BeliefNetwork net = parse_network(R"({
          "variables": [{"name": "X", "values": ["FALSE","TRUE"]}],
          "cpts": [{"child": "X", "parents": [], "rows": [[0.5,0.5]]}]})");
        CHECK(worst_case_flip_probability(net, 0, Assignment(1)) ==
              doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("flip probability is zero exactly when some context pins the node") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    // Unclamped D: context (C fixed, B and E free) includes e,~b... every
    // context with E observed true and B false forces D true.
    const double flip_d =
        worst_case_flip_probability(net, net.require_variable("D"), Assignment(5));
    CHECK(flip_d == 0.0);
    // A has no deterministic neighbor: strictly positive worst case.
    const double flip_a =
        worst_case_flip_probability(net, net.require_variable("A"), Assignment(5));
    CHECK(flip_a > 0.0);
}

TEST_CASE("sojourn statistics on a hand trace") {
    const SampleTrace t = trace_from_series({1, 1, 0, 1});
    const SojournStats stats = sojourn_statistics(t, "X");
    const auto& tru = stats.for_label("TRUE");
    const auto& fal = stats.for_label("FALSE");
    CHECK(tru.completed_runs == 1);     // the leading TT run
    CHECK(tru.mean_length == doctest::Approx(2.0));
    CHECK(tru.max_length == 2);
    CHECK(tru.censored_length == 1);    // the trailing T
    CHECK(fal.completed_runs == 1);
    CHECK(fal.mean_length == doctest::Approx(1.0));
    CHECK(fal.censored_length == 0);
}

TEST_CASE("sojourn statistics: constant trace is one censored run") {
    const SampleTrace t = trace_from_series(std::vector<int>(100, 1));
    const SojournStats stats = sojourn_statistics(t, "X");
    CHECK(stats.for_label("TRUE").completed_runs == 0);
    CHECK(stats.for_label("TRUE").censored_length == 100);
    CHECK(std::isnan(stats.for_label("TRUE").mean_length));
    CHECK_THROWS_AS((void)sojourn_statistics(t, "Y"), PreconditionError);
}

TEST_CASE("sojourn statistics: fixation length on the clamped five-node fixture" *
          doctest::timeout(120)) {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    const Assignment evidence = parse_assignment(net, "E=TRUE");
    RngStream rng(33);
    const SamplerResult res = gibbs_run(net, evidence, 100000, rng);
    const SojournStats stats = sojourn_statistics(res.trace, "D");
    const double mean_false = stats.for_label("FALSE").mean_length;
    // Per-sweep escape probability is 0.01 while the other branch holds the
    // collector, so runs average about 100 sweeps.
    CHECK(mean_false >= 50.0);
    CHECK(mean_false <= 200.0);
}

TEST_CASE("autocorrelation time: i.i.d. series sits at one") {
    RngStream rng(34);
    std::vector<double> series(200000);
    for (double& x : series) x = rng.next_unit() < 0.3 ? 1.0 : 0.0;
    const auto tau = integrated_autocorrelation_time(series);
    REQUIRE(tau.has_value());
    CHECK(*tau >= 0.9);
    CHECK(*tau <= 1.1);
}

TEST_CASE("autocorrelation time: two-state chain matches the analytic value") {
    // Flip probability 0.02 per step: tau = (2 - 2q)/(2q) with q = 0.02,
    // i.e. (1 + lambda)/(1 - lambda) with lambda = 1 - 2q = 0.96 -> 49.
    RngStream rng(35);
    std::vector<double> series(1000000);
    double x = 1.0;
    for (double& s : series) {
        if (rng.next_unit() < 0.02) x = 1.0 - x;
        s = x;
    }
    const auto tau = integrated_autocorrelation_time(series);
    REQUIRE(tau.has_value());
    CHECK(*tau >= 49.0 * 0.75);
    CHECK(*tau <= 49.0 * 1.25);
}

TEST_CASE("autocorrelation time: constant series is flagged undefined") {
    CHECK_FALSE(integrated_autocorrelation_time(std::vector<double>(1000, 1.0)).has_value());
    const SampleTrace t = trace_from_series(std::vector<int>(1000, 0));
    CHECK_FALSE(integrated_autocorrelation_time(t, "X", "TRUE").has_value());
}

TEST_CASE("sojourn mean matches the kernel-derived flip probability" *
          doctest::timeout(120)) {
    // Mean TRUE-sojourn of A should sit near 1 / P(A flips | A true), with
    // the exit probability read off the exact sweep kernel under the
    // stationary law.
    const BeliefNetwork net = test::fixture("fig2-4.json");
    const Assignment none(net.variable_count());
    const SweepKernel kernel = gibbs_sweep_kernel(net, none);
    const std::vector<double> pi = exact_free_joint(net, none);

    double mass_true = 0.0, exit_mass = 0.0;
    for (std::size_t s = 0; s < kernel.state_count; ++s) {
        Assignment st(net.variable_count());
        kernel.decode(s, st);
        if (st[0] != 1) continue;  // condition on A currently TRUE
        mass_true += pi[s];
        for (std::size_t t = 0; t < kernel.state_count; ++t) {
            Assignment to(net.variable_count());
            kernel.decode(t, to);
            if (to[0] == 0) exit_mass += pi[s] * kernel.at(s, t);
        }
    }
    const double expected_mean = mass_true / exit_mass;

    RngStream rng(39);
    const SamplerResult run = gibbs_run(net, none, 300000, rng);
    const double measured = sojourn_statistics(run.trace, "A").for_label("TRUE").mean_length;
    CHECK(measured >= expected_mean / 2.0);
    CHECK(measured <= expected_mean * 2.0);
}

TEST_CASE("autocorrelation time on the two-node fixtures" * doctest::timeout(300)) {
    {
        const BeliefNetwork net = test::fixture("fig2-2.json");
        RngStream rng(36);
        const SamplerResult res = gibbs_run(net, Assignment(2), 1000000, rng);
        const auto tau = integrated_autocorrelation_time(res.trace, "A", "TRUE");
        REQUIRE(tau.has_value());
        CHECK(*tau >= 250.0);
        CHECK(*tau <= 1000.0);
    }
    {
        const BeliefNetwork net = test::fixture("fig2-4.json");
        RngStream rng(37);
        const SamplerResult res = gibbs_run(net, Assignment(2), 200000, rng);
        const auto tau = integrated_autocorrelation_time(res.trace, "A", "TRUE");
        REQUIRE(tau.has_value());
        CHECK(*tau >= 1.0);
        CHECK(*tau <= 4.0);
    }
}

TEST_CASE("convergence profile: immediate entry when the truth matches from the start") {
    const SampleTrace t = trace_from_series({1, 0, 1, 0, 1, 0});
    const ConvergenceProfile prof = convergence_profile(t, "X", "TRUE", 1.0, 10.0);
    CHECK(prof.entry_sweep == 1);
    CHECK(prof.running_estimate[0] == doctest::Approx(1.0));
    CHECK(prof.running_estimate[5] == doctest::Approx(0.5));
}

TEST_CASE("convergence profile: i.i.d. entry index has the binomial order") {
    const BeliefNetwork net = parse_network(R"({
      "variables": [{"name": "X", "values": ["FALSE","TRUE"]}],
      "cpts": [{"child": "X", "parents": [], "rows": [[0.5,0.5]]}]})");
    RngStream rng(38);
    const SamplerResult res = gibbs_run(net, Assignment(1), 200000, rng);
    const ConvergenceProfile prof =
        convergence_profile(res.trace, "X", "TRUE", 0.5, 0.01);
    // Scale (p(1-p))/eps^2 = 2500; allow an order of magnitude both ways.
    CHECK(prof.entry_sweep >= 250);
    CHECK(prof.entry_sweep <= 25000);
}

TEST_CASE("convergence profile: never-settling run is flagged") {
    const SampleTrace t = trace_from_series({1, 1, 1, 1, 0});
    // Truth 0 with a tiny band: the run ends still outside.
    const ConvergenceProfile prof = convergence_profile(t, "X", "TRUE", 0.0, 0.05);
    CHECK(prof.entry_sweep == 0);
}

TEST_CASE("convergence profile CSV shape") {
    const SampleTrace t = trace_from_series({1, 0});
    const ConvergenceProfile prof = convergence_profile(t, "X", "TRUE", 0.5, 0.5);
    std::ostringstream out;
    prof.write_csv(out);
    CHECK(out.str().rfind("sweep,estimate,error\n", 0) == 0);
    CHECK(out.str().find("\n1,1,0.5") != std::string::npos);
}

TEST_CASE("profile entry ratio between the coupled pair and i.i.d. sampling" *
          doctest::timeout(600)) {
    // The running-frequency error of the coupled pair needs about SM = 500
    // times more sweeps to settle than an i.i.d. estimator of the same
    // marginal. Entry sweeps are heavy-tailed, so average several runs of
    // each before taking the ratio; a never-settling run counts as the full
    // run length.
    const BeliefNetwork coupled = test::fixture("fig2-2.json");
    const BeliefNetwork iid = parse_network(R"({
      "variables": [{"name": "A", "values": ["FALSE","TRUE"]}],
      "cpts": [{"child": "A", "parents": [], "rows": [[0.5,0.5]]}]})");
    double entry_coupled = 0.0, entry_iid = 0.0;
    const int runs = 8;
    const std::size_t sweeps = 2000000;
    for (int r = 0; r < runs; ++r) {
        RngStream rng1(40 + r), rng2(140 + r);
        const SamplerResult g = gibbs_run(coupled, Assignment(2), sweeps, rng1);
        const SamplerResult s = gibbs_run(iid, Assignment(1), sweeps / 100, rng2);
        const std::size_t eg =
            convergence_profile(g.trace, "A", "TRUE", 0.5, 0.05).entry_sweep;
        const std::size_t ei =
            convergence_profile(s.trace, "A", "TRUE", 0.5, 0.05).entry_sweep;
        entry_coupled += static_cast<double>(eg == 0 ? sweeps : eg);
        entry_iid += static_cast<double>(ei == 0 ? sweeps / 100 : ei);
    }
    const double ratio = entry_coupled / entry_iid;
    CHECK(ratio >= 250.0);
    CHECK(ratio <= 1000.0);
}

TEST_CASE("sm sweep endpoints" * doctest::timeout(300)) {
    SmSweepOptions opt;
    opt.runs_per_point = 2;
    opt.seed = 77;
    const std::vector<SmSweepRow> rows = sm_sweep({0.5, 0.05}, opt);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].dependence == doctest::Approx(1.0));
    CHECK(rows[0].predicted_multiple == doctest::Approx(1.0));
    CHECK(rows[0].measured_tau >= 0.5);
    CHECK(rows[0].measured_tau <= 2.0);
    CHECK(rows[1].dependence == doctest::Approx(0.1));
    CHECK(rows[1].predicted_multiple == doctest::Approx(10.0));
    CHECK(rows[1].measured_tau >= 5.0);
    CHECK(rows[1].measured_tau <= 20.0);

    std::ostringstream out;
    write_sm_sweep_csv(out, rows);
    CHECK(out.str().rfind("q,D,SM_pred,tau_hat,runs\n", 0) == 0);

    CHECK_THROWS_AS((void)sm_sweep({0.7}, opt), PreconditionError);
}
