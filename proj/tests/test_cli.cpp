#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "support.hpp"

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(BNSIM_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.output.append(buf.data(), n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string fixture(const std::string& name) { return bnsim::test::fixture_path(name); }

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("bnsim_test_" + name);
}

}  // namespace

TEST_CASE("validate: clean fixture exits 0, cyclic file exits 1") {
    CHECK(run_cli("validate --net " + fixture("fig2-1.json")).exit_code == 0);

    const auto bad = temp_file("cycle.json");
    std::ofstream(bad) << R"({
      "variables": [{"name": "A", "values": ["FALSE","TRUE"]},
                    {"name": "B", "values": ["FALSE","TRUE"]}],
      "cpts": [
        {"child": "A", "parents": ["B"], "rows": [[0.5,0.5],[0.5,0.5]]},
        {"child": "B", "parents": ["A"], "rows": [[0.5,0.5],[0.5,0.5]]}
      ]})";
    const CliResult res = run_cli("validate --net " + bad.string());
    CHECK(res.exit_code == 1);
    const auto report = nlohmann::json::parse(res.output);
    CHECK_FALSE(report.at("ok").get<bool>());
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("exact").exit_code == 2);            // missing --net
    CHECK(run_cli("no-such-command").exit_code == 2);
}

TEST_CASE("exact: marginal and posterior values with config echoed") {
    const CliResult res =
        run_cli("exact --net " + fixture("fig2-2.json") + " --query A");
    REQUIRE(res.exit_code == 0);
    const auto report = nlohmann::json::parse(res.output);
    CHECK(report.at("tool") == "bnsim");
    CHECK(report.at("config").at("net").get<std::string>().find("fig2-2") !=
          std::string::npos);
    CHECK(report.at("posteriors").at("A").at("probabilities")[1].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-9));

    const CliResult cond = run_cli("exact --net " + fixture("fig2-1.json") +
                                   " --evidence E=TRUE --query A");
    REQUIRE(cond.exit_code == 0);
    const auto rep2 = nlohmann::json::parse(cond.output);
    CHECK(rep2.at("posteriors").at("A").at("probabilities")[1].get<double>() ==
          doctest::Approx(0.2525502474497526).epsilon(1e-9));
    CHECK(rep2.at("evidence_probability").get<double>() ==
          doctest::Approx(0.03920796).epsilon(1e-9));
}

TEST_CASE("exact: contradictory evidence exits 1") {
    const CliResult res = run_cli("exact --net " + fixture("fig2-1.json") +
                                  " --evidence E=TRUE,E=FALSE --query A");
    CHECK(res.exit_code == 1);
}

TEST_CASE("sample: same seed byte-reproduces the estimates") {
    const std::string cmd = "sample --scheme rejection --net " + fixture("fig2-1.json") +
                            " --evidence E=TRUE --query A -n 20000 --seed 7";
    const CliResult a = run_cli(cmd);
    const CliResult b = run_cli(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    const auto report = nlohmann::json::parse(a.output);
    CHECK(report.at("seed") == 7);
    CHECK(report.at("acceptance_rate").get<double>() ==
          doctest::Approx(0.0392).epsilon(0.15));
}

TEST_CASE("sample: gibbs writes a usable trace") {
    const auto trace = temp_file("trace.csv");
    const CliResult res = run_cli("sample --scheme gibbs --net " + fixture("fig2-2.json") +
                                  " --sweeps 5000 --seed 11 --trace " + trace.string());
    REQUIRE(res.exit_code == 0);
    std::ifstream in(trace);
    std::string header;
    std::getline(in, header);
    CHECK(header == "sweep,A,B,weight,accepted");

    // Trace-based diagnostics accept the file back.
    const CliResult soj =
        run_cli("diagnose --metric sojourn --trace " + trace.string() + " --node A");
    REQUIRE(soj.exit_code == 0);
    CHECK(nlohmann::json::parse(soj.output).contains("per_value"));
}

TEST_CASE("sample: fixation on a deterministic pair exits 1") {
    const auto net = temp_file("detpair.json");
    std::ofstream(net) << R"({
      "variables": [{"name": "A", "values": ["FALSE","TRUE"]},
                    {"name": "B", "values": ["FALSE","TRUE"]}],
      "cpts": [
        {"child": "A", "parents": [], "rows": [[0.5,0.5]]},
        {"child": "B", "parents": ["A"], "rows": [[1.0,0.0],[0.0,1.0]]}
      ]})";
    const CliResult res = run_cli("sample --scheme gibbs --net " + net.string() +
                                  " --sweeps 1000 --seed 3");
    CHECK(res.exit_code == 1);
    const auto report = nlohmann::json::parse(res.output);
    CHECK(report.at("fixated").get<bool>());

    // Blocked resampling with the detected-or-given group mixes fine.
    const CliResult blocked =
        run_cli("sample --scheme blocked-gibbs --net " + net.string() +
                " --groups A+B --sweeps 20000 --seed 3");
    REQUIRE(blocked.exit_code == 0);
    const auto rep2 = nlohmann::json::parse(blocked.output);
    CHECK(rep2.at("estimates").at("A").at("probabilities")[1].get<double>() ==
          doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("diagnose: dependence reports") {
    const CliResult res = run_cli("diagnose --metric D --net " + fixture("fig2-2.json") +
                                  " --arc A-B");
    REQUIRE(res.exit_code == 0);
    const auto report = nlohmann::json::parse(res.output);
    CHECK(report.at("D").get<double>() == doctest::Approx(0.002).epsilon(1e-9));
    CHECK(report.at("SM").get<double>() == doctest::Approx(500.0).epsilon(1e-9));

    // Infinite simulation multiple serializes explicitly.
    const CliResult inf = run_cli("diagnose --metric blanket-D --net " +
                                  fixture("fig2-1.json") + " --node B");
    REQUIRE(inf.exit_code == 0);
    const auto rep2 = nlohmann::json::parse(inf.output);
    CHECK(rep2.at("D").get<double>() == 0.0);
    CHECK(rep2.at("SM_infinite").get<bool>());
    CHECK(rep2.at("SM") == "inf");
}

TEST_CASE("diagnose: sm-sweep emits the plot CSV") {
    const CliResult res =
        run_cli("diagnose --metric sm-sweep --grid 0.5,0.25 --runs 1 --sweeps 4000 --seed 5");
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.rfind("q,D,SM_pred,tau_hat,runs\n", 0) == 0);
    CHECK(res.output.find("\n0.5,1,1,") != std::string::npos);
}

TEST_CASE("transform: reverse writes the reversed network") {
    const CliResult res = run_cli("transform --op reverse --net " + fixture("fig2-2.json") +
                                  " --arc A-B");
    REQUIRE(res.exit_code == 0);
    const auto net = nlohmann::json::parse(res.output);
    // B first in the cpts list still, now parentless with P(b) = 0.5.
    bool found = false;
    for (const auto& c : net.at("cpts"))
        if (c.at("child") == "B") {
            found = true;
            CHECK(c.at("parents").empty());
            CHECK(c.at("rows")[0][1].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
        }
    CHECK(found);
}

TEST_CASE("transform: absorb writes a replayable plan") {
    const auto out_net = temp_file("absorbed.json");
    const auto plan = temp_file("plan.json");
    const CliResult res = run_cli("transform --op absorb --net " + fixture("fig2-2.json") +
                                  " --evidence B --query A --out-net " + out_net.string() +
                                  " --plan " + plan.string());
    REQUIRE(res.exit_code == 0);
    std::ifstream pf(plan);
    REQUIRE(pf.good());
    const auto pj = nlohmann::json::parse(pf);
    REQUIRE(pj.at("steps").size() == 2);
    CHECK(pj.at("steps")[0].at("kind") == "reverse");
    CHECK(pj.at("steps")[0].at("operands") == nlohmann::json::array({"A", "B"}));

    // The absorbed network accepts clamped forward sampling.
    const CliResult clamped =
        run_cli("sample --scheme clamped-forward --net " + out_net.string() +
                " --evidence B=TRUE --query A -n 20000 --seed 9");
    REQUIRE(clamped.exit_code == 0);
    const auto rep = nlohmann::json::parse(clamped.output);
    CHECK(rep.at("acceptance_rate").get<double>() == 1.0);
    CHECK(rep.at("estimates").at("A").at("probabilities")[1].get<double>() ==
          doctest::Approx(0.999).epsilon(0.02));
}

TEST_CASE("transform: reduce refuses a fork, exits 1") {
    const auto net = temp_file("fork.json");
    std::ofstream(net) << R"({
      "variables": [{"name": "X", "values": ["FALSE","TRUE"]},
                    {"name": "B", "values": ["FALSE","TRUE"]},
                    {"name": "C", "values": ["FALSE","TRUE"]}],
      "cpts": [
        {"child": "X", "parents": [], "rows": [[0.5,0.5]]},
        {"child": "B", "parents": ["X"], "rows": [[0.7,0.3],[0.2,0.8]]},
        {"child": "C", "parents": ["X"], "rows": [[0.6,0.4],[0.1,0.9]]}
      ]})";
    CHECK(run_cli("transform --op reduce --net " + net.string() + " --node X").exit_code == 1);
}

TEST_CASE("repro: single fast criterion passes, corrupted fixture fails" *
          doctest::timeout(300)) {
    const CliResult res = run_cli("repro --only blanket-conditionals --fixtures " +
                                  std::string(BNSIM_FIXTURES_DIR));
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("[PASS] blanket-conditionals") != std::string::npos);

    // Point the suite at a directory with a broken fig2-1.
    const auto dir = std::filesystem::temp_directory_path() / "bnsim_bad_fixtures";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "fig2-1.json") << "{ broken";
    const CliResult bad = run_cli("repro --only blanket-conditionals --fixtures " +
                                  dir.string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.output.find("[FAIL]") != std::string::npos);
}
