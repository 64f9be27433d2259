// End-to-end drives of the command-line surface: subcommands, file outputs
// and exit codes.

#include "cyres/outputs.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& stdout_to = {}) {
    std::string command = std::string(CYRES_BIN) + " " + args;
    if (stdout_to.empty()) {
        command += " > /dev/null 2>&1";
    } else {
        command += " > " + stdout_to.string() + " 2>/dev/null";
    }
    return WEXITSTATUS(std::system(command.c_str()));
}

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cyres_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kScenario = (fs::path(CYRES_SCENARIO_DIR) / "outbreak.json").string();

} // namespace

TEST_CASE("run writes the four artifacts and exits zero") {
    const fs::path dir = work_dir("run");
    CHECK(run_cli("run " + kScenario + " --seed 7 --out " + dir.string()) == 0);
    for (const char* file : {"trace.csv", "summary.json", "decisions.jsonl", "chart.svg"}) {
        CHECK(fs::exists(dir / file));
    }
    CHECK(cyres::read_file(dir / "trace.csv").rfind("t,P\n", 0) == 0);
}

TEST_CASE("sweep writes one csv row per point") {
    const fs::path dir = work_dir("sweep");
    CHECK(run_cli("sweep " + kScenario +
                  " --param monitors.anomaly_rate --values 0.2,0.8 --runs 3 --seed 5 --out " +
                  dir.string()) == 0);
    const std::string csv = cyres::read_file(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3); // header + 2 points
    CHECK(csv.find("0,0.2,3,") != std::string::npos);
    CHECK(csv.find("1,0.8,3,") != std::string::npos);
}

TEST_CASE("verify-log distinguishes valid, corrupt and truncated evidence") {
    const fs::path dir = work_dir("verify");
    REQUIRE(run_cli("run " + kScenario + " --seed 7 --out " + dir.string()) == 0);
    CHECK(run_cli("verify-log " + dir.string()) == 0);

    const std::string jsonl = cyres::read_file(dir / "decisions.jsonl");
    std::string corrupt = jsonl;
    corrupt[corrupt.find("\"actor\"") + 9] ^= 0x01;
    cyres::write_file(dir / "decisions.jsonl", corrupt);
    CHECK(run_cli("verify-log " + dir.string()) == 2);

    std::string truncated = jsonl;
    truncated.resize(truncated.find_last_of('\n', truncated.size() - 2) + 1);
    cyres::write_file(dir / "decisions.jsonl", truncated);
    CHECK(run_cli("verify-log " + dir.string()) == 2);

    cyres::write_file(dir / "decisions.jsonl", jsonl);
    CHECK(run_cli("verify-log " + dir.string()) == 0);
}

TEST_CASE("report merges summaries into one certification document") {
    const fs::path a = work_dir("report_a");
    const fs::path b = work_dir("report_b");
    REQUIRE(run_cli("run " + kScenario + " --seed 1 --out " + a.string()) == 0);
    REQUIRE(run_cli("run " + kScenario + " --seed 2 --out " + b.string()) == 0);
    const fs::path out = work_dir("report_out") / "report.json";
    CHECK(run_cli("report " + a.string() + " " + b.string(), out) == 0);
    const std::string report = cyres::read_file(out);
    CHECK(report.find("\"runs\":2") != std::string::npos);
    CHECK(report.find("\"p_detect\":") != std::string::npos);
    CHECK(report.find("\"engineered_differences\":4") != std::string::npos);
}

TEST_CASE("usage and config errors exit with code one") {
    CHECK(run_cli("run /nonexistent/scenario.json --out /tmp/x") == 1);
    CHECK(run_cli("frobnicate") == 1);
    CHECK(run_cli("sweep " + kScenario +
                  " --param monitors.no_such_knob --values 1 --runs 1 --out /tmp/x") == 1);

    // Invalid scenario content also maps to the config exit code.
    const fs::path dir = work_dir("badcfg");
    cyres::write_file(dir / "bad.json", R"({"fleet": {"n": 0}, "run": {"horizon": 5}})");
    CHECK(run_cli("run " + (dir / "bad.json").string() + " --out " + dir.string()) == 1);
}
