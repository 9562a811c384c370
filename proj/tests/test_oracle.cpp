#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bnsim/oracle.hpp"
#include "support.hpp"

using namespace bnsim;

namespace {

std::vector<std::string> names(const BeliefNetwork& net, const std::vector<int>& vars) {
    std::vector<std::string> out;
    for (int v : vars) out.push_back(net.variable(v).name);
    return out;
}

// Hand values for the five-node fixture, derived independently of the
// enumeration code: P(~b) = 0.01*0.01 + 0.99*0.99 = 0.9802 = P(~d), B and D
// independent, E = B or D.
constexpr double kPNotB = 0.9802;
constexpr double kPe = 1.0 - kPNotB * kPNotB;                     // 0.03920796
const double kPaGivenE = 0.01 * (1.0 - 0.01 * kPNotB) / kPe;      // about 0.2526

}  // namespace

TEST_CASE("exact posteriors: fig2-2 marginals are both one half") {
    const BeliefNetwork net = test::fixture("fig2-2.json");
    const PosteriorTable t =
        exact_posteriors(net, Assignment(net.variable_count()), {0, 1});
    CHECK(t.evidence_probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.posteriors[0][1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(t.posteriors[1][1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact posteriors: fig2-1 with the collector node observed") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    const Assignment evidence = parse_assignment(net, "E=TRUE");
    const PosteriorTable t = exact_posteriors(net, evidence, {net.require_variable("A")});
    CHECK(t.evidence_probability == doctest::Approx(kPe).epsilon(1e-12));
    CHECK(t.posteriors[0][1] == doctest::Approx(kPaGivenE).epsilon(1e-12));
}

TEST_CASE("exact posteriors: impossible evidence is flagged, not thrown") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    // B true forces E true through the OR gate.
    const Assignment evidence = parse_assignment(net, "B=TRUE,E=FALSE");
    const PosteriorTable t = exact_posteriors(net, evidence, {0});
    CHECK(t.evidence_probability == 0.0);
    CHECK_FALSE(t.defined);
}

TEST_CASE("markov blankets on fig2-1") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    const MarkovBlanket b = markov_blanket(net, net.require_variable("B"));
    CHECK(names(net, b.parents) == std::vector<std::string>{"A"});
    CHECK(names(net, b.children) == std::vector<std::string>{"E"});
    CHECK(names(net, b.spouses) == std::vector<std::string>{"D"});

    const MarkovBlanket e = markov_blanket(net, net.require_variable("E"));
    CHECK(names(net, e.parents) == std::vector<std::string>{"B", "D"});
    CHECK(e.children.empty());
    CHECK(e.spouses.empty());

    CHECK_THROWS_AS((void)markov_blanket(net, "Z"), PreconditionError);
}

TEST_CASE("markov blanket of an isolated node is empty") {
    const BeliefNetwork net = parse_network(R"({
      "variables": [{"name": "X", "values": ["FALSE","TRUE"]}],
      "cpts": [{"child": "X", "parents": [], "rows": [[0.4,0.6]]}]})");
    const MarkovBlanket b = markov_blanket(net, 0);
    CHECK(b.parents.empty());
    CHECK(b.children.empty());
    CHECK(b.spouses.empty());
}

TEST_CASE("the six worked blanket conditionals") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    auto p_true = [&](const std::string& node, const std::string& others) {
        const LocalConditional lc = blanket_conditional(
            net, net.require_variable(node), parse_assignment(net, others));
        REQUIRE_FALSE(lc.degenerate);
        return lc.probs[1];
    };
    CHECK(p_true("B", "A=TRUE,E=TRUE,D=FALSE") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p_true("B", "A=FALSE,E=TRUE,D=FALSE") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p_true("C", "D=FALSE") == doctest::Approx(0.0001 / 0.9802).epsilon(1e-12));
    CHECK(p_true("D", "C=FALSE,B=TRUE,E=TRUE") == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(p_true("A", "B=TRUE") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p_true("B", "A=TRUE,D=TRUE,E=TRUE") == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(p_true("B", "A=FALSE,D=TRUE,E=TRUE") == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("blanket conditional ignores non-blanket assignments") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    // C's blanket is {D} alone; A and B values must not matter.
    const double with_extras = blanket_conditional(net, net.require_variable("C"),
                                                   parse_assignment(net, "D=FALSE,A=TRUE,B=TRUE"))
                                   .probs[1];
    const double bare = blanket_conditional(net, net.require_variable("C"),
                                            parse_assignment(net, "D=FALSE"))
                            .probs[1];
    CHECK(with_extras == bare);
}

TEST_CASE("blanket conditional requires the blanket to be assigned") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    CHECK_THROWS_AS((void)blanket_conditional(net, net.require_variable("B"),
                                              parse_assignment(net, "A=TRUE")),
                    PreconditionError);
}

TEST_CASE("degenerate conditional carries the zero vector") {
    // B copies A, C negates it; observing B=TRUE, C=TRUE leaves no value for A.
    const BeliefNetwork net = parse_network(R"({
      "variables": [{"name": "A", "values": ["FALSE","TRUE"]},
                    {"name": "B", "values": ["FALSE","TRUE"]},
                    {"name": "C", "values": ["FALSE","TRUE"]}],
      "cpts": [
        {"child": "A", "parents": [], "rows": [[0.5,0.5]]},
        {"child": "B", "parents": ["A"], "rows": [[1.0,0.0],[0.0,1.0]]},
        {"child": "C", "parents": ["A"], "rows": [[0.0,1.0],[1.0,0.0]]}
      ]})");
    const LocalConditional lc =
        blanket_conditional(net, 0, parse_assignment(net, "B=TRUE,C=TRUE"));
    CHECK(lc.degenerate);
    CHECK(lc.probs == std::vector<double>{0.0, 0.0});
}

TEST_CASE("blanket conditional agrees with exact posteriors over every context") {
    // Exhaustive: every node, every assignment of the remaining variables with
    // positive probability.
    auto verify = [](const BeliefNetwork& net) {
        const std::size_t n = net.variable_count();
        for (std::size_t node = 0; node < n; ++node) {
            std::vector<int> others;
            for (std::size_t v = 0; v < n; ++v)
                if (v != node) others.push_back(static_cast<int>(v));
            const std::size_t count = net.joint_state_count() / net.domain_size(static_cast<int>(node));
            for (std::size_t cfg = 0; cfg < count; ++cfg) {
                Assignment w(n);
                std::size_t rem = cfg;
                for (auto it = others.rbegin(); it != others.rend(); ++it) {
                    w.set(*it, static_cast<int>(rem % net.domain_size(*it)));
                    rem /= net.domain_size(*it);
                }
                const PosteriorTable t =
                    exact_posteriors(net, w, {static_cast<int>(node)});
                if (!t.defined) continue;  // zero-probability context
                const LocalConditional lc =
                    blanket_conditional(net, static_cast<int>(node), w);
                REQUIRE_FALSE(lc.degenerate);
                for (std::size_t val = 0; val < lc.probs.size(); ++val)
                    CHECK(std::abs(lc.probs[val] - t.posteriors[0][val]) < 1e-9);
            }
        }
    };
    verify(test::fixture("fig2-1.json"));
    RngStream rng(31);
    verify(test::random_binary_net(rng, 5));
}

TEST_CASE("sweep kernel on fig2-2: row-stochastic with the exact stationary law") {
    const BeliefNetwork net = test::fixture("fig2-2.json");
    const Assignment none(net.variable_count());
    const SweepKernel k = gibbs_sweep_kernel(net, none);
    REQUIRE(k.state_count == 4);
    for (std::size_t s = 0; s < 4; ++s) {
        double row = 0.0;
        for (std::size_t t = 0; t < 4; ++t) row += k.at(s, t);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(stationarity_residual(k, exact_free_joint(net, none)) < 1e-12);
}

TEST_CASE("sweep kernel of a single unclamped node: rows equal the prior") {
    const BeliefNetwork net = parse_network(R"({
      "variables": [{"name": "X", "values": ["FALSE","TRUE"]}],
      "cpts": [{"child": "X", "parents": [], "rows": [[0.3,0.7]]}]})");
    const SweepKernel k = gibbs_sweep_kernel(net, Assignment(1));
    REQUIRE(k.state_count == 2);
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(k.at(s, 0) == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(k.at(s, 1) == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("sweep kernel of a deterministic pair has two absorbing states") {
    const BeliefNetwork net = parse_network(R"({
      "variables": [{"name": "A", "values": ["FALSE","TRUE"]},
                    {"name": "B", "values": ["FALSE","TRUE"]}],
      "cpts": [
        {"child": "A", "parents": [], "rows": [[0.5,0.5]]},
        {"child": "B", "parents": ["A"], "rows": [[1.0,0.0],[0.0,1.0]]}
      ]})");
    const SweepKernel k = gibbs_sweep_kernel(net, Assignment(2));
    // States are (A,B) with B fastest: 0 = both false, 3 = both true.
    CHECK(k.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.at(3, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationarity holds on fixtures and random nets") {
    {
        const BeliefNetwork net = test::fixture("fig2-1.json");
        const Assignment evidence = parse_assignment(net, "E=TRUE");
        CHECK(stationarity_residual(gibbs_sweep_kernel(net, evidence),
                                    exact_free_joint(net, evidence)) < 1e-9);
    }
    RngStream rng(55);
    for (int trial = 0; trial < 5; ++trial) {
        const BeliefNetwork net = test::random_binary_net(rng, 4 + trial % 3);
        Assignment evidence(net.variable_count());
        if (trial % 2 == 0) evidence.set(0, 1);
        CHECK(stationarity_residual(gibbs_sweep_kernel(net, evidence),
                                    exact_free_joint(net, evidence)) < 1e-9);
    }
}

TEST_CASE("group conditional matches enumeration for a joint update") {
    const BeliefNetwork net = test::fixture("fig2-1.json");
    // Resample {B, D} jointly given A, C and the observed collector.
    const Assignment state = parse_assignment(net, "A=TRUE,C=FALSE,E=TRUE");
    const LocalConditional lc =
        group_conditional(net, {net.require_variable("B"), net.require_variable("D")}, state);
    REQUIRE_FALSE(lc.degenerate);
    REQUIRE(lc.probs.size() == 4);

    const PosteriorTable t = exact_posteriors(
        net, state, {net.require_variable("B"), net.require_variable("D")});
    // Config index: B major, D minor.
    const double pb = lc.probs[2] + lc.probs[3];
    const double pd = lc.probs[1] + lc.probs[3];
    CHECK(pb == doctest::Approx(t.posteriors[0][1]).epsilon(1e-9));
    CHECK(pd == doctest::Approx(t.posteriors[1][1]).epsilon(1e-9));
}

TEST_CASE("enumeration budget is enforced") {
    RngStream rng(5);
    const BeliefNetwork net = test::random_binary_net(rng, 13, 2);
    CHECK_THROWS_AS((void)gibbs_sweep_kernel(net, Assignment(net.variable_count())),
                    BudgetError);
}
