#include "cyres/outputs.hpp"

#include "cyres/errors.hpp"
#include "cyres/format.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace cyres {

using nlohmann::json;

namespace {

/// Canonical rendering: objects keep nlohmann's sorted key order; doubles
/// are printed %.6f; the infinity sentinel is the string "inf".
void render_canonical(const json& value, std::string& out) {
    switch (value.type()) {
    case json::value_t::object: {
        out += '{';
        bool first = true;
        for (const auto& item : value.items()) {
            if (!first) {
                out += ',';
            }
            first = false;
            out += '"';
            out += json_escape(item.key());
            out += "\":";
            render_canonical(item.value(), out);
        }
        out += '}';
        break;
    }
    case json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            render_canonical(value[i], out);
        }
        out += ']';
        break;
    }
    case json::value_t::string:
        out += '"';
        out += json_escape(value.get<std::string>());
        out += '"';
        break;
    case json::value_t::number_float:
        out += format_fixed6(value.get<double>());
        break;
    case json::value_t::number_integer:
        out += std::to_string(value.get<std::int64_t>());
        break;
    case json::value_t::number_unsigned:
        out += std::to_string(value.get<std::uint64_t>());
        break;
    case json::value_t::boolean:
        out += value.get<bool>() ? "true" : "false";
        break;
    default:
        out += "null";
        break;
    }
}

std::string canonical(const json& value) {
    std::string out;
    render_canonical(value, out);
    return out;
}

json time_or_inf(double value) {
    if (std::isinf(value)) {
        return json("inf");
    }
    return json(value);
}

json optional_time(const std::optional<double>& value) {
    if (!value) {
        return json(nullptr);
    }
    return json(*value);
}

json timeline_to_json(const IncidentTimeline& t) {
    return json{{"t_start", optional_time(t.t_start)},
                {"t_detect", optional_time(t.t_detect)},
                {"t_understand", optional_time(t.t_understand)},
                {"t_deploy_start", optional_time(t.t_deploy_start)},
                {"t_deploy_partial_complete", optional_time(t.t_deploy_partial_complete)},
                {"t_deploy_full_complete", optional_time(t.t_deploy_full_complete)},
                {"t_end", optional_time(t.t_end)}};
}

double time_from(const json& value, const std::string& what) {
    if (value.is_string()) {
        if (value.get<std::string>() == "inf") {
            return kInfiniteTime;
        }
        throw ParseError(what + ": unexpected string value");
    }
    if (!value.is_number()) {
        throw ParseError(what + ": expected a number or \"inf\"");
    }
    return value.get<double>();
}

} // namespace

std::string trace_to_csv(const PerformanceTrace& trace) {
    std::string out = "t,P\n";
    for (const TracePoint& pt : trace.points()) {
        out += format_fixed6(pt.t);
        out += ',';
        out += format_fixed6(pt.p);
        out += '\n';
    }
    return out;
}

std::string summary_to_json(const RunResult& result, const Scenario& scenario) {
    const ResilienceReport& r = result.report;
    json resilience{{"no_event", r.no_event},
                    {"t_start", r.t_start},
                    {"t_end", r.t_end},
                    {"recovered", r.recovered},
                    {"time_to_failure", optional_time(r.time_to_failure)},
                    {"time_to_recovery", optional_time(r.time_to_recovery)},
                    {"time_below_min", r.time_below_min},
                    {"resilience_raw", r.resilience_raw},
                    {"resilience_norm", r.resilience_norm},
                    {"loss", r.loss},
                    {"t_catastrophe", time_or_inf(r.t_catastrophe)},
                    {"outcome", to_string(r.outcome)},
                    {"timeline", timeline_to_json(r.timeline)},
                    {"residual_contained", r.residual_contained}};

    const CertificationInputs& c = result.certification;
    json certification{{"detected", c.detected},
                       {"t_detect", c.detected ? json(c.t_detect) : json(nullptr)},
                       {"understood", c.understood},
                       {"t_understand", c.understood ? json(c.t_understand) : json(nullptr)},
                       {"blocked_pre_event", c.blocked_pre_event},
                       {"t_catastrophe", time_or_inf(c.t_catastrophe)},
                       {"vehicles_treated", c.vehicles_treated},
                       {"deployment_active_time", c.deployment_active_time},
                       {"t_propagate", time_or_inf(c.t_propagate)},
                       {"peak_infected_fraction", c.peak_infected_fraction},
                       {"engineered_differences", c.engineered_differences},
                       {"update_frequency", c.update_frequency}};

    json incidents = json::array();
    for (const IncidentSummary& inc : result.incidents) {
        incidents.push_back(
            {{"index", inc.index},
             {"threat", inc.threat_id},
             {"seeded_at", inc.seeded_at},
             {"blocked", inc.blocked},
             {"detected", inc.detected},
             {"understood", inc.understood},
             {"understanding_latency", inc.understood ? json(inc.understanding_latency) : json(nullptr)},
             {"chosen_candidate",
              inc.chosen_candidate.empty() ? json(nullptr) : json(inc.chosen_candidate)},
             {"urgency", inc.urgency.empty() ? json(nullptr) : json(inc.urgency)},
             {"withdrawals", inc.withdrawals},
             {"timeline", timeline_to_json(inc.timeline)}});
    }

    json root{{"resilience_report", resilience},
              {"certification_inputs", certification},
              {"incidents", incidents},
              {"log_entries", static_cast<std::int64_t>(result.log.size())},
              {"scenario_digest", to_hex(scenario_digest(scenario))},
              {"seed", result.seed}};
    return canonical(root) + "\n";
}

std::string certification_report_to_json(const CertificationReport& report) {
    json root{{"p_detect", report.p_detect},
              {"p_understand", report.p_understand},
              {"p_understand_defined", report.p_understand_defined},
              {"deploy_rate_measured", report.deploy_rate_measured},
              {"t_propagate_mean", time_or_inf(report.t_propagate_mean)},
              {"engineered_differences", report.engineered_differences},
              {"update_frequency", report.update_frequency},
              {"runs", report.runs},
              {"seed", report.seed}};
    return canonical(root) + "\n";
}

CertificationInputs certification_inputs_from_summary(const std::string& summary_bytes) {
    json root = json::parse(summary_bytes, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("certification_inputs")) {
        throw ParseError("summary.json: missing certification_inputs");
    }
    const json& c = root["certification_inputs"];
    CertificationInputs inputs;
    inputs.detected = c.at("detected").get<bool>();
    if (!c.at("t_detect").is_null()) {
        inputs.t_detect = time_from(c.at("t_detect"), "t_detect");
    }
    inputs.understood = c.at("understood").get<bool>();
    if (!c.at("t_understand").is_null()) {
        inputs.t_understand = time_from(c.at("t_understand"), "t_understand");
    }
    inputs.blocked_pre_event = c.at("blocked_pre_event").get<bool>();
    inputs.t_catastrophe = time_from(c.at("t_catastrophe"), "t_catastrophe");
    inputs.vehicles_treated = c.at("vehicles_treated").get<std::int64_t>();
    inputs.deployment_active_time = c.at("deployment_active_time").get<double>();
    inputs.t_propagate = time_from(c.at("t_propagate"), "t_propagate");
    inputs.peak_infected_fraction = c.at("peak_infected_fraction").get<double>();
    inputs.engineered_differences = c.at("engineered_differences").get<int>();
    inputs.update_frequency = c.at("update_frequency").get<double>();
    return inputs;
}

std::int64_t log_entry_count_from_summary(const std::string& summary_bytes) {
    json root = json::parse(summary_bytes, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("log_entries")) {
        throw ParseError("summary.json: missing log_entries");
    }
    return root["log_entries"].get<std::int64_t>();
}

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct ChartScale {
    double t0, t1;
    static constexpr double left = 60.0, right = 820.0, top = 24.0, bottom = 420.0;

    double x(double t) const {
        return t1 > t0 ? left + (t - t0) / (t1 - t0) * (right - left) : left;
    }
    double y(double p) const { return bottom - p * (bottom - top); }
};

void marker(std::string& svg, const ChartScale& s, double t, const char* color,
            const char* label, double label_y) {
    const double x = s.x(t);
    svg += "<line x1=\"" + fixed2(x) + "\" y1=\"" + fixed2(ChartScale::top) + "\" x2=\"" +
           fixed2(x) + "\" y2=\"" + fixed2(ChartScale::bottom) +
           "\" stroke=\"" + color + "\" stroke-dasharray=\"2,4\"/>\n";
    svg += "<text x=\"" + fixed2(x + 3.0) + "\" y=\"" + fixed2(label_y) + "\" fill=\"" + color +
           "\" font-size=\"11\">" + label + "</text>\n";
}

} // namespace

std::string chart_to_svg(const PerformanceTrace& trace, const Thresholds& thresholds,
                         const IncidentTimeline& timeline) {
    if (trace.empty()) {
        throw Error("cannot chart an empty trace");
    }
    ChartScale s{trace.front().t, trace.back().t};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"860\" height=\"480\" "
           "viewBox=\"0 0 860 480\">\n";
    svg += "<rect width=\"860\" height=\"480\" fill=\"white\"/>\n";

    // axes
    svg += "<line x1=\"60.00\" y1=\"420.00\" x2=\"820.00\" y2=\"420.00\" stroke=\"black\"/>\n";
    svg += "<line x1=\"60.00\" y1=\"24.00\" x2=\"60.00\" y2=\"420.00\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double p = 0.25 * i;
        svg += "<text x=\"18.00\" y=\"" + fixed2(s.y(p) + 4.0) +
               "\" font-size=\"11\">" + format_fixed6(p).substr(0, 4) + "</text>\n";
        svg += "<line x1=\"56.00\" y1=\"" + fixed2(s.y(p)) + "\" x2=\"60.00\" y2=\"" +
               fixed2(s.y(p)) + "\" stroke=\"black\"/>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double t = s.t0 + (s.t1 - s.t0) * i / 5.0;
        svg += "<text x=\"" + fixed2(s.x(t) - 10.0) +
               "\" y=\"438.00\" font-size=\"11\">" + fixed2(t) + "</text>\n";
    }
    svg += "<text x=\"430.00\" y=\"466.00\" font-size=\"12\" text-anchor=\"middle\">t</text>\n";
    svg += "<text x=\"16.00\" y=\"16.00\" font-size=\"12\">P(t)</text>\n";

    // threshold lines
    svg += "<line x1=\"60.00\" y1=\"" + fixed2(s.y(thresholds.p_acceptable)) +
           "\" x2=\"820.00\" y2=\"" + fixed2(s.y(thresholds.p_acceptable)) +
           "\" stroke=\"seagreen\" stroke-dasharray=\"6,3\"/>\n";
    svg += "<text x=\"764.00\" y=\"" + fixed2(s.y(thresholds.p_acceptable) - 4.0) +
           "\" fill=\"seagreen\" font-size=\"11\">P_A</text>\n";
    svg += "<line x1=\"60.00\" y1=\"" + fixed2(s.y(thresholds.p_min)) +
           "\" x2=\"820.00\" y2=\"" + fixed2(s.y(thresholds.p_min)) +
           "\" stroke=\"firebrick\" stroke-dasharray=\"6,3\"/>\n";
    svg += "<text x=\"764.00\" y=\"" + fixed2(s.y(thresholds.p_min) - 4.0) +
           "\" fill=\"firebrick\" font-size=\"11\">P_min</text>\n";

    // timeline markers
    if (timeline.t_detect) {
        marker(svg, s, *timeline.t_detect, "steelblue", "detect", 40.0);
    }
    if (timeline.t_understand) {
        marker(svg, s, *timeline.t_understand, "darkorchid", "understand", 56.0);
    }
    if (timeline.t_deploy_start) {
        marker(svg, s, *timeline.t_deploy_start, "darkorange", "deploy", 72.0);
    }
    if (timeline.t_deploy_partial_complete) {
        marker(svg, s, *timeline.t_deploy_partial_complete, "darkorange", "partial", 88.0);
    }
    if (timeline.t_deploy_full_complete) {
        marker(svg, s, *timeline.t_deploy_full_complete, "darkorange", "full", 104.0);
    }
    if (timeline.t_end) {
        marker(svg, s, *timeline.t_end, "black", "T", 120.0);
    }

    // step plot (step-after)
    const auto& pts = trace.points();
    std::string path = "M " + fixed2(s.x(pts[0].t)) + " " + fixed2(s.y(pts[0].p));
    for (std::size_t i = 1; i < pts.size(); ++i) {
        path += " H " + fixed2(s.x(pts[i].t));
        path += " V " + fixed2(s.y(pts[i].p));
    }
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"navy\" stroke-width=\"1.5\"/>\n";
    svg += "</svg>\n";
    return svg;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("short write to " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

void write_run_outputs(const std::filesystem::path& dir, const RunResult& result,
                       const Scenario& scenario) {
    std::filesystem::create_directories(dir);
    write_file(dir / "trace.csv", trace_to_csv(result.trace));
    write_file(dir / "summary.json", summary_to_json(result, scenario));
    write_file(dir / "decisions.jsonl", result.log.to_jsonl());
    write_file(dir / "chart.svg",
               chart_to_svg(result.trace, scenario.thresholds, result.report.timeline));
}

} // namespace cyres
