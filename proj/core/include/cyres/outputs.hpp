#pragma once

#include "cyres/scenario.hpp"
#include "cyres/simulate.hpp"

#include <filesystem>
#include <string>

namespace cyres {

/// Canonical JSON text: keys sorted, no insignificant whitespace, every
/// float rendered with fixed 6 decimals. (Implemented over nlohmann::json in
/// outputs.cpp; exposed here for the summary and report writers.)

/// trace.csv bytes: header "t,P", one fixed-6 row per sample, time order.
std::string trace_to_csv(const PerformanceTrace& trace);

/// summary.json bytes (canonical form).
std::string summary_to_json(const RunResult& result, const Scenario& scenario);

/// Merged certification report bytes (canonical form).
std::string certification_report_to_json(const CertificationReport& report);

/// Reads one summary.json back into the certification inputs it recorded.
CertificationInputs certification_inputs_from_summary(const std::string& summary_bytes);

/// Entry count recorded in a summary, for log truncation detection.
std::int64_t log_entry_count_from_summary(const std::string& summary_bytes);

/// chart.svg bytes: deterministic standalone step plot of P(t) with the
/// threshold lines and timeline markers.
std::string chart_to_svg(const PerformanceTrace& trace, const Thresholds& thresholds,
                         const IncidentTimeline& timeline);

void write_file(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

/// Writes trace.csv, summary.json, decisions.jsonl and chart.svg into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunResult& result,
                       const Scenario& scenario);

} // namespace cyres
