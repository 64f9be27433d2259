#include "cyres/sweep.hpp"

#include "cyres/errors.hpp"
#include "cyres/format.hpp"
#include "cyres/rng.hpp"
#include "cyres/simulate.hpp"

#include <json.hpp>

#include <cmath>

namespace cyres {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : path) {
        if (c == '.') {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

/// Navigates the dotted path and overwrites the existing value. New keys may
/// not be introduced; a typo would otherwise silently sweep nothing.
void set_path(json& root, const std::string& path, const json& value) {
    json* node = &root;
    const std::vector<std::string> parts = split_path(path);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (part.empty()) {
            throw BadSweepSpecError("empty component in parameter path '" + path + "'");
        }
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            std::size_t index = 0;
            try {
                index = static_cast<std::size_t>(std::stoul(part));
            } catch (...) {
                throw BadSweepSpecError("non-numeric array index '" + part + "' in '" + path + "'");
            }
            if (index >= node->size()) {
                throw BadSweepSpecError("array index out of range in '" + path + "'");
            }
            node = &(*node)[index];
        } else if (node->is_object()) {
            if (!node->contains(part)) {
                throw BadSweepSpecError("parameter path '" + path + "' not found in scenario");
            }
            node = &(*node)[part];
        } else {
            throw BadSweepSpecError("parameter path '" + path + "' descends into a scalar");
        }
        if (last) {
            *node = value;
        }
    }
}

json parse_value_token(const std::string& token) {
    json parsed = json::parse(token, nullptr, false);
    if (parsed.is_discarded()) {
        return json(token); // bare strings (e.g. inf, seeded_random) pass through
    }
    return parsed;
}

} // namespace

std::uint64_t sweep_run_seed(std::uint64_t master_seed, std::size_t point, std::size_t run) {
    std::uint64_t state = master_seed ^ fnv1a64("sweep/" + std::to_string(point) + "/" +
                                                std::to_string(run));
    return splitmix64_next(state);
}

SweepTable run_sweep(const Scenario& base, const SweepSpec& spec, std::uint64_t master_seed) {
    if (spec.values.empty()) {
        throw BadSweepSpecError("sweep needs at least one value");
    }
    if (spec.runs_per_point < 1) {
        throw BadSweepSpecError("runs per point must be >= 1");
    }
    const json base_json = json::parse(scenario_to_canonical_json(base));

    SweepTable table;
    for (std::size_t point = 0; point < spec.values.size(); ++point) {
        json point_json = base_json;
        set_path(point_json, spec.parameter_path, parse_value_token(spec.values[point]));
        Scenario point_scenario;
        try {
            point_scenario = parse_scenario(point_json.dump());
        } catch (const ValidationError& e) {
            throw BadSweepSpecError("value '" + spec.values[point] + "' for '" +
                                    spec.parameter_path + "' is invalid: " + e.what());
        }

        SweepRow row;
        row.point = static_cast<int>(point);
        row.value = spec.values[point];
        row.runs = spec.runs_per_point;

        std::vector<double> losses;
        losses.reserve(static_cast<std::size_t>(spec.runs_per_point));
        for (int run = 0; run < spec.runs_per_point; ++run) {
            const std::uint64_t seed =
                sweep_run_seed(master_seed, point, static_cast<std::size_t>(run));
            const RunResult result = run_simulation(point_scenario, seed);
            losses.push_back(result.report.loss);
            switch (result.report.outcome) {
            case Outcome::Resilient: row.resilient_fraction += 1.0; break;
            case Outcome::NotDetectedInTime: row.not_detected_fraction += 1.0; break;
            case Outcome::NotUnderstoodInTime: row.not_understood_fraction += 1.0; break;
            case Outcome::FixTooLate: row.fix_too_late_fraction += 1.0; break;
            }
            if (result.report.no_event) {
                row.no_event_fraction += 1.0;
            }
            row.peak_infected_fraction_max =
                std::max(row.peak_infected_fraction_max,
                         result.certification.peak_infected_fraction);
        }
        const auto n = static_cast<double>(losses.size());
        double mean = 0.0;
        for (double loss : losses) {
            mean += loss;
        }
        mean /= n;
        double variance = 0.0;
        for (double loss : losses) {
            variance += (loss - mean) * (loss - mean);
        }
        row.loss_mean = mean;
        row.loss_stddev = losses.size() > 1 ? std::sqrt(variance / (n - 1.0)) : 0.0;
        row.resilient_fraction /= n;
        row.not_detected_fraction /= n;
        row.not_understood_fraction /= n;
        row.fix_too_late_fraction /= n;
        row.no_event_fraction /= n;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::string out =
        "point,value,runs,loss_mean,loss_stddev,resilient,not_detected,not_understood,"
        "fix_too_late,no_event,peak_infected_frac_max\n";
    for (const SweepRow& row : table.rows) {
        out += std::to_string(row.point);
        out += ',';
        out += row.value;
        out += ',';
        out += std::to_string(row.runs);
        out += ',';
        out += format_fixed6(row.loss_mean);
        out += ',';
        out += format_fixed6(row.loss_stddev);
        out += ',';
        out += format_fixed6(row.resilient_fraction);
        out += ',';
        out += format_fixed6(row.not_detected_fraction);
        out += ',';
        out += format_fixed6(row.not_understood_fraction);
        out += ',';
        out += format_fixed6(row.fix_too_late_fraction);
        out += ',';
        out += format_fixed6(row.no_event_fraction);
        out += ',';
        out += format_fixed6(row.peak_infected_fraction_max);
        out += '\n';
    }
    return out;
}

} // namespace cyres
