#include "cyres/decision_log.hpp"
#include "cyres/errors.hpp"
#include "cyres/outputs.hpp"
#include "cyres/scenario.hpp"
#include "cyres/simulate.hpp"
#include "cyres/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

cyres::Scenario load_scenario(const std::string& path) {
    return cyres::parse_scenario(cyres::read_file(path));
}

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    cyres::Scenario scenario = load_scenario(scenario_path);
    const std::uint64_t effective_seed = seed.value_or(scenario.run.seed);
    const cyres::RunResult result = cyres::run_simulation(scenario, effective_seed);
    cyres::write_run_outputs(out_dir, result, scenario);
    std::printf("run: seed=%llu outcome=%s loss=%.6f log_entries=%zu -> %s\n",
                static_cast<unsigned long long>(effective_seed),
                cyres::to_string(result.report.outcome), result.report.loss, result.log.size(),
                out_dir.c_str());
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::vector<std::string>& values, int runs,
              std::optional<std::uint64_t> seed, const std::string& out_dir) {
    cyres::Scenario scenario = load_scenario(scenario_path);
    cyres::SweepSpec spec;
    spec.parameter_path = param;
    spec.values = values;
    spec.runs_per_point = runs;
    const std::uint64_t effective_seed = seed.value_or(scenario.run.seed);
    const cyres::SweepTable table = cyres::run_sweep(scenario, spec, effective_seed);
    fs::create_directories(out_dir);
    cyres::write_file(fs::path(out_dir) / "sweep.csv", cyres::sweep_to_csv(table));
    std::printf("sweep: %zu points x %d runs -> %s/sweep.csv\n", table.rows.size(), runs,
                out_dir.c_str());
    return kExitOk;
}

int cmd_verify_log(const std::string& dir) {
    const fs::path log_path = fs::path(dir) / "decisions.jsonl";
    std::vector<cyres::DecisionLogEntry> entries;
    const cyres::LogVerification verdict =
        cyres::DecisionLog::verify_jsonl(cyres::read_file(log_path), &entries);
    if (!verdict.valid) {
        std::printf("CorruptAt(%llu): %s\n", static_cast<unsigned long long>(verdict.corrupt_seq),
                    verdict.reason.c_str());
        return kExitVerification;
    }
    // The chain alone cannot see truncation; the summary's entry count can.
    const fs::path summary_path = fs::path(dir) / "summary.json";
    if (fs::exists(summary_path)) {
        const std::int64_t expected =
            cyres::log_entry_count_from_summary(cyres::read_file(summary_path));
        if (expected != static_cast<std::int64_t>(entries.size())) {
            std::printf("Truncated: log has %zu entries, summary records %lld\n", entries.size(),
                        static_cast<long long>(expected));
            return kExitVerification;
        }
    }
    std::printf("Valid (%zu entries)\n", entries.size());
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs) {
    std::vector<cyres::CertificationInputs> inputs;
    std::uint64_t seed = 0;
    bool first = true;
    for (const std::string& dir : dirs) {
        const std::string bytes = cyres::read_file(fs::path(dir) / "summary.json");
        inputs.push_back(cyres::certification_inputs_from_summary(bytes));
        if (first) {
            // CertificationReport.seed records the first run's master seed.
            const auto root = nlohmann::json::parse(bytes);
            seed = root.at("seed").get<std::uint64_t>();
            first = false;
        }
    }
    const cyres::CertificationReport report = cyres::certification_metrics(inputs, seed);
    std::fputs(cyres::certification_report_to_json(report).c_str(), stdout);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic fleet cyber-resilience simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;

    CLI::App* run = app.add_subcommand("run", "Execute one scenario run");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Master seed (defaults to run.seed in the scenario)");
    run->add_option("--out", out_dir, "Output directory");

    std::string param;
    std::string values_csv;
    int runs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a one-parameter sweep");
    sweep->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    sweep->add_option("--param", param, "Dotted scenario path, e.g. monitors.anomaly_rate")
        ->required();
    sweep->add_option("--values", values_csv, "Comma-separated values")->required();
    sweep->add_option("--runs", runs, "Runs per sweep point")->required();
    sweep->add_option("--seed", seed, "Master seed (defaults to run.seed in the scenario)");
    sweep->add_option("--out", out_dir, "Output directory");

    std::string verify_dir;
    CLI::App* verify = app.add_subcommand("verify-log", "Verify a run's decision log");
    verify->add_option("dir", verify_dir, "Run output directory")->required();

    std::vector<std::string> report_dirs;
    CLI::App* report = app.add_subcommand("report", "Merge run summaries into one report");
    report->add_option("dirs", report_dirs, "Run output directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(scenario_path, seed, out_dir);
        }
        if (sweep->parsed()) {
            std::vector<std::string> values;
            std::string current;
            for (char c : values_csv) {
                if (c == ',') {
                    values.push_back(current);
                    current.clear();
                } else {
                    current += c;
                }
            }
            values.push_back(current);
            if (values.size() == 1 && values.front().empty()) {
                values.clear();
            }
            return cmd_sweep(scenario_path, param, values, runs, seed, out_dir);
        }
        if (verify->parsed()) {
            return cmd_verify_log(verify_dir);
        }
        if (report->parsed()) {
            return cmd_report(report_dirs);
        }
    } catch (const cyres::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
