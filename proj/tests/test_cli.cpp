#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
    json report;
};

const std::string kData = BCCLEAR_DATA_DIR;

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string(BCCLEAR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.report = json::parse(r.out, nullptr, false);
    return r;
}

// Runs a command that writes its report (success or error) to --out.
Run run_to_file(const std::string& args, const std::string& name) {
    const auto path = (std::filesystem::temp_directory_path() / ("bcclear_cli_" + name)).string();
    std::filesystem::remove(path);
    Run r = run(args + " --out " + path);
    std::ifstream in(path);
    r.report = json::parse(in, nullptr, false);
    return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::temp_directory_path() / ("bcclear_cli_" + name)).string();
    std::ofstream(path) << text;
    return path;
}

double approx(const json& v) { return v.at("approx").get<double>(); }

}  // namespace

TEST_CASE("validate accepts both sample networks") {
    for (const char* file : {"fee_race.json", "five_node.json"}) {
        const Run r = run("validate " + kData + "/" + file);
        CHECK(r.status == 0);
        CHECK(r.report["schema"] == "bcclear.report/1");
        CHECK(r.report["result"]["admissible"] == true);
        CHECK(r.report["inputs"]["network"]["sha256"].get<std::string>().size() == 64);
    }
}

TEST_CASE("centralized clearing of the five-node network") {
    const Run r = run("clear-centralized " + kData + "/five_node.json");
    REQUIRE(r.status == 0);
    const json& res = r.report["result"];
    CHECK(std::abs(approx(res["objective"]) - 15.9586) < 1e-4);
    const json& unstressed = res["scenarios"][0]["net_worths"];
    CHECK(unstressed[0]["exact"] == "11.75");
    CHECK(unstressed[2]["exact"] == "65/12");
}

TEST_CASE("symmetric mixed equilibrium of the fee race") {
    const Run r = run("solve-nash " + kData + "/fee_race.json --mode symmetric-mixed");
    REQUIRE(r.status == 0);
    const json& eq = r.report["result"]["equilibria"][0];
    CHECK(eq["probabilities"][0]["exact"] == "62/347");
    CHECK(eq["probabilities"][4]["exact"] == "128/347");
    CHECK(std::abs(approx(eq["expected_payout"]) - 0.5447) < 1e-4);
}

TEST_CASE("pure scan of the fee race finds nothing") {
    const Run r = run("solve-nash " + kData + "/fee_race.json --mode pure-scan");
    REQUIRE(r.status == 0);
    CHECK(r.report["result"]["equilibria"].empty());
}

TEST_CASE("limit and chain for the five-node network under the published bids") {
    const std::string bids = " --bids " + kData + "/five_node_bids.json";
    const Run lim = run("solve-limit " + kData + "/five_node.json" + bids);
    REQUIRE(lim.status == 0);
    CHECK(std::abs(approx(lim.report["result"]["objective"]) - 16.4838) < 1e-3);
    const Run chain = run("simulate-chain " + kData + "/five_node.json" + bids + " --scenario 0");
    REQUIRE(chain.status == 0);
    const json& cash = chain.report["result"]["final_cash"];
    CHECK(cash[2]["exact"] == "5.825");
    CHECK(cash[1]["exact"] == "0");
    CHECK(chain.report["result"]["limit_comparison"]["ok"] == true);
}

TEST_CASE("a network without liabilities yields an empty trace") {
    const auto path = temp_file("empty.json", R"({"n": 2, "cash": [1, 2], "liabilities": [[0, 0], [0, 0]],
        "discretization": {"D": 1, "F": 1}})");
    const Run r = run("simulate-chain " + path);
    REQUIRE(r.status == 0);
    CHECK(r.report["result"]["block_count"] == 0);
    CHECK(r.report["result"]["termination"] == "residuals_exhausted");
}

TEST_CASE("exit codes separate parse, validation and solver failures") {
    const auto broken = temp_file("broken.json", "{\"n\": 2,\n \"cash\": [1 2]}");
    Run r = run_to_file("validate " + broken, "err1.json");
    CHECK(r.status == 2);
    CHECK(r.report["schema"] == "bcclear.error/1");
    CHECK(r.report["kind"] == "parse");
    CHECK(r.report["location"].get<std::string>().find(":2:") != std::string::npos);

    const auto self = temp_file("self.json", R"({"n": 2, "cash": [1, 1], "liabilities": [[1, 0], [0, 0]],
        "discretization": {"D": 1, "F": 1}})");
    r = run_to_file("clear-centralized " + self, "err2.json");
    CHECK(r.status == 3);
    CHECK(r.report["kind"] == "validation");

    r = run_to_file("solve-limit " + kData + "/five_node.json --max-iter 1 --tol 1e-300", "err3.json");
    CHECK(r.status == 4);
    CHECK(r.report["kind"] == "convergence");
    CHECK(r.report["last_iterate"].size() == 5);

    r = run("no-such-command " + kData + "/fee_race.json");
    CHECK(r.status == 2);
    r = run("validate /nonexistent/file.json");
    CHECK(r.status == 2);
}

TEST_CASE("a report replays to the same result") {
    const auto first = temp_file("replay_source.json", "");
    Run a = run_to_file("solve-limit " + kData + "/five_node.json --bids " + kData + "/five_node_bids.json",
                        "replay_a.json");
    REQUIRE(a.status == 0);
    std::ofstream(first) << a.report.dump();
    const Run b = run("solve-limit " + first);
    REQUIRE(b.status == 0);
    CHECK(b.report["result"] == a.report["result"]);
    CHECK(b.report["inputs"]["network"]["sha256"] == a.report["inputs"]["network"]["sha256"]);
}
