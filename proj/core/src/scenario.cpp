#include "cyres/scenario.hpp"

#include "cyres/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace cyres {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            const std::string where = path.empty() ? item.key() : path + "." + item.key();
            throw ValidationError(where, "unknown key");
        }
    }
}

const json* maybe(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double number_at(const json& value, const std::string& path) {
    if (!value.is_number()) {
        throw ValidationError(path, "must be a number");
    }
    return value.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    const json* v = maybe(obj, key);
    return v ? number_at(*v, path + "." + key) : fallback;
}

int integer_at(const json& value, const std::string& path) {
    if (!value.is_number_integer()) {
        throw ValidationError(path, "must be an integer");
    }
    return value.get<int>();
}

bool bool_or(const json& obj, const char* key, const std::string& path, bool fallback) {
    const json* v = maybe(obj, key);
    if (v == nullptr) {
        return fallback;
    }
    if (!v->is_boolean()) {
        throw ValidationError(path + "." + key, "must be a boolean");
    }
    return v->get<bool>();
}

std::string string_at(const json& value, const std::string& path) {
    if (!value.is_string()) {
        throw ValidationError(path, "must be a string");
    }
    return value.get<std::string>();
}

/// A duration that is either a non-negative number or the sentinel "inf".
double duration_or_inf(const json& value, const std::string& path) {
    if (value.is_string()) {
        if (value.get<std::string>() == "inf") {
            return kInfiniteTime;
        }
        throw ValidationError(path, "must be a non-negative number or \"inf\"");
    }
    const double d = number_at(value, path);
    if (d < 0.0) {
        throw ValidationError(path, "must be >= 0");
    }
    return d;
}

FleetConfig parse_fleet(const json& obj) {
    require_keys(obj, "fleet", {"n", "variants", "assignment"});
    FleetConfig fleet;
    const json* n = maybe(obj, "n");
    if (n == nullptr) {
        throw ValidationError("fleet.n", "required");
    }
    fleet.n = integer_at(*n, "fleet.n");
    if (fleet.n < 1) {
        throw ValidationError("fleet.n", "must be >= 1");
    }
    if (const json* variants = maybe(obj, "variants")) {
        fleet.variants = integer_at(*variants, "fleet.variants");
    }
    if (fleet.variants < 1) {
        throw ValidationError("fleet.variants", "must be >= 1");
    }
    if (fleet.variants > fleet.n) {
        throw ValidationError("fleet.variants", "must not exceed fleet.n");
    }
    if (const json* assignment = maybe(obj, "assignment")) {
        const std::string value = string_at(*assignment, "fleet.assignment");
        if (value == "round_robin") {
            fleet.assignment = VariantAssignment::RoundRobin;
        } else if (value == "seeded_random") {
            fleet.assignment = VariantAssignment::SeededRandom;
        } else {
            throw ValidationError("fleet.assignment", "must be round_robin or seeded_random");
        }
    }
    return fleet;
}

MonitorConfig parse_monitors(const json& obj) {
    require_keys(obj, "monitors",
                 {"signature_rate", "anomaly_rate", "specification_rate", "pre_event_probability",
                  "withdraw_epsilon", "withdraw_dwell"});
    MonitorConfig monitors;
    monitors.signature_rate = number_or(obj, "signature_rate", "monitors", 0.0);
    monitors.anomaly_rate = number_or(obj, "anomaly_rate", "monitors", 0.0);
    monitors.specification_rate = number_or(obj, "specification_rate", "monitors", 0.0);
    monitors.pre_event_probability = number_or(obj, "pre_event_probability", "monitors", 0.5);
    monitors.withdraw_epsilon = number_or(obj, "withdraw_epsilon", "monitors", 0.05);
    monitors.withdraw_dwell = number_or(obj, "withdraw_dwell", "monitors", 1.0);
    if (monitors.signature_rate < 0.0) throw ValidationError("monitors.signature_rate", "must be >= 0");
    if (monitors.anomaly_rate < 0.0) throw ValidationError("monitors.anomaly_rate", "must be >= 0");
    if (monitors.specification_rate < 0.0) {
        throw ValidationError("monitors.specification_rate", "must be >= 0");
    }
    if (monitors.pre_event_probability < 0.0 || monitors.pre_event_probability > 1.0) {
        throw ValidationError("monitors.pre_event_probability", "must lie in [0, 1]");
    }
    if (monitors.withdraw_epsilon < 0.0) {
        throw ValidationError("monitors.withdraw_epsilon", "must be >= 0");
    }
    if (monitors.withdraw_dwell <= 0.0) {
        throw ValidationError("monitors.withdraw_dwell", "must be > 0");
    }
    return monitors;
}

UnderstandingConfig parse_understanding(const json& obj) {
    require_keys(obj, "understanding", {"base_delay", "kappa", "plan_horizon"});
    UnderstandingConfig u;
    u.base_delay = number_or(obj, "base_delay", "understanding", 1.0);
    u.kappa = number_or(obj, "kappa", "understanding", 0.25);
    if (u.base_delay < 0.0) {
        throw ValidationError("understanding.base_delay", "must be >= 0");
    }
    if (u.kappa < 0.0 || u.kappa > 1.0) {
        throw ValidationError("understanding.kappa", "must lie in [0, 1]");
    }
    if (const json* ph = maybe(obj, "plan_horizon")) {
        const double value = number_at(*ph, "understanding.plan_horizon");
        if (value <= 0.0) {
            throw ValidationError("understanding.plan_horizon", "must be > 0");
        }
        u.plan_horizon = value;
    }
    return u;
}

UpdatesConfig parse_updates(const json& obj) {
    require_keys(obj, "updates", {"period", "trusted", "adaptation_delay"});
    UpdatesConfig updates;
    updates.period = number_or(obj, "period", "updates", 0.0);
    if (updates.period < 0.0) {
        throw ValidationError("updates.period", "must be >= 0 (0 disables updates)");
    }
    updates.trusted = bool_or(obj, "trusted", "updates", true);
    if (const json* tau = maybe(obj, "adaptation_delay")) {
        updates.adaptation_delay = duration_or_inf(*tau, "updates.adaptation_delay");
    }
    return updates;
}

Thresholds parse_thresholds(const json& obj) {
    require_keys(obj, "thresholds", {"p_a", "p_min", "dwell", "model"});
    Thresholds t;
    t.p_acceptable = number_or(obj, "p_a", "thresholds", 1.0);
    t.p_min = number_or(obj, "p_min", "thresholds", 0.0);
    t.dwell = number_or(obj, "dwell", "thresholds", 1.0);
    if (const json* model = maybe(obj, "model")) {
        // Only the dwell-below-minimum catastrophe model is implemented; the
        // key exists so scenarios can state it explicitly.
        if (string_at(*model, "thresholds.model") != "dwell") {
            throw ValidationError("thresholds.model", "only \"dwell\" is supported");
        }
    }
    if (t.p_acceptable <= 0.0 || t.p_acceptable > 1.0) {
        throw ValidationError("thresholds.p_a", "must lie in (0, 1]");
    }
    if (t.p_min < 0.0 || t.p_min >= t.p_acceptable) {
        throw ValidationError("thresholds.p_min", "must lie in [0, p_a)");
    }
    if (t.dwell <= 0.0) {
        throw ValidationError("thresholds.dwell", "must be > 0");
    }
    return t;
}

RunConfig parse_run(const json& obj) {
    require_keys(obj, "run", {"horizon", "dt", "seed", "shadow"});
    RunConfig run;
    const json* horizon = maybe(obj, "horizon");
    if (horizon == nullptr) {
        throw ValidationError("run.horizon", "required");
    }
    run.horizon = number_at(*horizon, "run.horizon");
    if (run.horizon <= 0.0) {
        throw ValidationError("run.horizon", "must be > 0");
    }
    run.dt = number_or(obj, "dt", "run", 0.1);
    if (run.dt <= 0.0 || run.dt > run.horizon) {
        throw ValidationError("run.dt", "must lie in (0, horizon]");
    }
    if (const json* seed = maybe(obj, "seed")) {
        if (!seed->is_number_unsigned() && !seed->is_number_integer()) {
            throw ValidationError("run.seed", "must be an unsigned integer");
        }
        run.seed = seed->get<std::uint64_t>();
    }
    run.shadow = bool_or(obj, "shadow", "run", true);
    return run;
}

ThreatSpec parse_threat(const json& obj, std::size_t index, int variants, int fleet_n,
                        double default_tau) {
    const std::string path = "threats." + std::to_string(index);
    require_keys(obj, path,
                 {"id", "susceptible_variants", "beta", "profile", "signature_known",
                  "adaptation_delay", "seeding"});
    ThreatSpec spec;

    const json* id = maybe(obj, "id");
    if (id == nullptr) {
        throw ValidationError(path + ".id", "required");
    }
    spec.threat.id = string_at(*id, path + ".id");
    if (spec.threat.id.empty()) {
        throw ValidationError(path + ".id", "must be non-empty");
    }

    const json* sus = maybe(obj, "susceptible_variants");
    if (sus == nullptr || !sus->is_array() || sus->empty()) {
        throw ValidationError(path + ".susceptible_variants", "must be a non-empty array");
    }
    std::set<int> variant_set;
    for (std::size_t i = 0; i < sus->size(); ++i) {
        const int v = integer_at((*sus)[i], path + ".susceptible_variants");
        if (v < 0 || v >= variants) {
            throw ValidationError(path + ".susceptible_variants",
                                  "variant index out of range [0, variants)");
        }
        variant_set.insert(v);
    }
    spec.threat.susceptible_variants.assign(variant_set.begin(), variant_set.end());

    spec.threat.beta = number_or(obj, "beta", path, 0.0);
    if (spec.threat.beta < 0.0) {
        throw ValidationError(path + ".beta", "must be >= 0");
    }

    const json* profile = maybe(obj, "profile");
    if (profile == nullptr || !profile->is_array() || profile->empty()) {
        throw ValidationError(path + ".profile", "must be a non-empty array of stages");
    }
    double prev_delay = -1.0;
    double prev_level = 1.0;
    for (std::size_t i = 0; i < profile->size(); ++i) {
        const std::string stage_path = path + ".profile." + std::to_string(i);
        const json& stage = (*profile)[i];
        if (!stage.is_object()) {
            throw ValidationError(stage_path, "must be an object {delay, level}");
        }
        require_keys(stage, stage_path, {"delay", "level"});
        DegradationStage parsed;
        const json* delay = maybe(stage, "delay");
        const json* level = maybe(stage, "level");
        if (delay == nullptr || level == nullptr) {
            throw ValidationError(stage_path, "needs both delay and level");
        }
        parsed.delay = number_at(*delay, stage_path + ".delay");
        parsed.level = number_at(*level, stage_path + ".level");
        if (parsed.delay < 0.0 || parsed.delay <= prev_delay) {
            throw ValidationError(stage_path + ".delay", "must be >= 0 and strictly increasing");
        }
        if (parsed.level < 0.0 || parsed.level > 1.0 || parsed.level > prev_level) {
            throw ValidationError(stage_path + ".level", "must lie in [0, 1], non-increasing");
        }
        prev_delay = parsed.delay;
        prev_level = parsed.level;
        spec.threat.stages.push_back(parsed);
    }

    spec.threat.signature_known = bool_or(obj, "signature_known", path, false);
    if (const json* tau = maybe(obj, "adaptation_delay")) {
        spec.threat.adaptation_delay = duration_or_inf(*tau, path + ".adaptation_delay");
    } else {
        spec.threat.adaptation_delay = default_tau;
    }

    const json* seeding = maybe(obj, "seeding");
    if (seeding == nullptr || !seeding->is_object()) {
        throw ValidationError(path + ".seeding", "required object");
    }
    const std::string seed_path = path + ".seeding";
    require_keys(*seeding, seed_path, {"targets", "count", "at"});
    const json* targets = maybe(*seeding, "targets");
    const json* count = maybe(*seeding, "count");
    if ((targets == nullptr) == (count == nullptr)) {
        throw ValidationError(seed_path, "exactly one of targets or count");
    }
    if (targets != nullptr) {
        if (!targets->is_array() || targets->empty()) {
            throw ValidationError(seed_path + ".targets", "must be a non-empty array");
        }
        std::set<int> seen;
        for (const json& t : *targets) {
            const int v = integer_at(t, seed_path + ".targets");
            if (v < 0 || v >= fleet_n) {
                throw ValidationError(seed_path + ".targets", "vehicle id out of range");
            }
            if (!seen.insert(v).second) {
                throw ValidationError(seed_path + ".targets", "duplicate vehicle id");
            }
            spec.seeding.targets.push_back(v);
        }
    } else {
        spec.seeding.count = integer_at(*count, seed_path + ".count");
        if (spec.seeding.count < 1 || spec.seeding.count > fleet_n) {
            throw ValidationError(seed_path + ".count", "must lie in [1, fleet.n]");
        }
    }
    spec.seeding.at = number_or(*seeding, "at", seed_path, 0.0);
    if (spec.seeding.at < 0.0) {
        throw ValidationError(seed_path + ".at", "must be >= 0");
    }
    return spec;
}

ResponseCandidate parse_candidate(const json& obj, std::size_t index) {
    const std::string path = "candidates." + std::to_string(index);
    require_keys(obj, path,
                 {"id", "kind", "level", "deploy_rate", "prep_delay", "actual_level", "urgency"});
    ResponseCandidate cand;
    const json* id = maybe(obj, "id");
    if (id == nullptr) {
        throw ValidationError(path + ".id", "required");
    }
    cand.id = string_at(*id, path + ".id");
    if (cand.id.empty()) {
        throw ValidationError(path + ".id", "must be non-empty");
    }
    const json* kind = maybe(obj, "kind");
    if (kind == nullptr) {
        throw ValidationError(path + ".kind", "required");
    }
    const std::string kind_text = string_at(*kind, path + ".kind");
    if (kind_text == "contain") {
        cand.kind = CandidateKind::Contain;
    } else if (kind_text == "partial_patch") {
        cand.kind = CandidateKind::PartialPatch;
    } else if (kind_text == "full_patch") {
        cand.kind = CandidateKind::FullPatch;
    } else {
        throw ValidationError(path + ".kind", "must be contain, partial_patch or full_patch");
    }

    const json* level = maybe(obj, "level");
    if (cand.kind == CandidateKind::FullPatch) {
        cand.containment_level = level ? number_at(*level, path + ".level") : 1.0;
        if (cand.containment_level != 1.0) {
            throw ValidationError(path + ".level", "full_patch level must be 1.0");
        }
    } else {
        if (level == nullptr) {
            throw ValidationError(path + ".level", "required for contain / partial_patch");
        }
        cand.containment_level = number_at(*level, path + ".level");
        if (cand.containment_level < 0.0 || cand.containment_level > 1.0) {
            throw ValidationError(path + ".level", "must lie in [0, 1]");
        }
    }

    cand.deploy_rate = number_or(obj, "deploy_rate", path, 1.0);
    if (cand.deploy_rate <= 0.0) {
        throw ValidationError(path + ".deploy_rate", "must be > 0");
    }
    cand.prep_delay = number_or(obj, "prep_delay", path, 0.0);
    if (cand.prep_delay < 0.0) {
        throw ValidationError(path + ".prep_delay", "must be >= 0");
    }
    if (const json* actual = maybe(obj, "actual_level")) {
        if (cand.kind == CandidateKind::FullPatch) {
            // A full patch really patches; script failures via contain /
            // partial_patch responses instead.
            throw ValidationError(path + ".actual_level", "not applicable to full_patch");
        }
        const double value = number_at(*actual, path + ".actual_level");
        if (value < 0.0 || value > 1.0) {
            throw ValidationError(path + ".actual_level", "must lie in [0, 1]");
        }
        cand.actual_level = value;
    }
    if (const json* urgency = maybe(obj, "urgency")) {
        cand.urgency = string_at(*urgency, path + ".urgency");
    }
    return cand;
}

json duration_to_json(double value) {
    if (std::isinf(value)) {
        return json("inf");
    }
    return json(value);
}

} // namespace

Scenario parse_scenario(std::string_view bytes) {
    json root = json::parse(bytes, nullptr, false);
    if (root.is_discarded()) {
        throw ParseError("scenario is not valid JSON");
    }
    if (!root.is_object()) {
        throw ParseError("scenario must be a JSON object");
    }
    require_keys(root, "",
                 {"fleet", "threats", "monitors", "understanding", "candidates", "updates",
                  "thresholds", "run"});

    Scenario scenario;
    const json* fleet = maybe(root, "fleet");
    if (fleet == nullptr || !fleet->is_object()) {
        throw ValidationError("fleet", "required object");
    }
    scenario.fleet = parse_fleet(*fleet);

    if (const json* monitors = maybe(root, "monitors")) {
        if (!monitors->is_object()) {
            throw ValidationError("monitors", "must be an object");
        }
        scenario.monitors = parse_monitors(*monitors);
    }
    if (const json* understanding = maybe(root, "understanding")) {
        if (!understanding->is_object()) {
            throw ValidationError("understanding", "must be an object");
        }
        scenario.understanding = parse_understanding(*understanding);
    }
    if (const json* updates = maybe(root, "updates")) {
        if (!updates->is_object()) {
            throw ValidationError("updates", "must be an object");
        }
        scenario.updates = parse_updates(*updates);
    }
    if (const json* thresholds = maybe(root, "thresholds")) {
        if (!thresholds->is_object()) {
            throw ValidationError("thresholds", "must be an object");
        }
        scenario.thresholds = parse_thresholds(*thresholds);
    }
    const json* run = maybe(root, "run");
    if (run == nullptr || !run->is_object()) {
        throw ValidationError("run", "required object");
    }
    scenario.run = parse_run(*run);

    if (const json* threats = maybe(root, "threats")) {
        if (!threats->is_array()) {
            throw ValidationError("threats", "must be an array");
        }
        for (std::size_t i = 0; i < threats->size(); ++i) {
            if (!(*threats)[i].is_object()) {
                throw ValidationError("threats." + std::to_string(i), "must be an object");
            }
            scenario.threats.push_back(parse_threat((*threats)[i], i, scenario.fleet.variants,
                                                    scenario.fleet.n,
                                                    scenario.updates.adaptation_delay));
        }
    }
    if (const json* candidates = maybe(root, "candidates")) {
        if (!candidates->is_array()) {
            throw ValidationError("candidates", "must be an array");
        }
        std::set<std::string> ids;
        for (std::size_t i = 0; i < candidates->size(); ++i) {
            if (!(*candidates)[i].is_object()) {
                throw ValidationError("candidates." + std::to_string(i), "must be an object");
            }
            ResponseCandidate cand = parse_candidate((*candidates)[i], i);
            if (!ids.insert(cand.id).second) {
                throw ValidationError("candidates." + std::to_string(i) + ".id",
                                      "duplicate candidate id");
            }
            scenario.candidates.push_back(std::move(cand));
        }
    }
    return scenario;
}

std::string scenario_to_canonical_json(const Scenario& s) {
    json root;
    root["fleet"] = {{"n", s.fleet.n},
                     {"variants", s.fleet.variants},
                     {"assignment", s.fleet.assignment == VariantAssignment::RoundRobin
                                        ? "round_robin"
                                        : "seeded_random"}};
    json threats = json::array();
    for (const ThreatSpec& spec : s.threats) {
        json profile = json::array();
        for (const DegradationStage& stage : spec.threat.stages) {
            profile.push_back({{"delay", stage.delay}, {"level", stage.level}});
        }
        json seeding;
        if (!spec.seeding.targets.empty()) {
            seeding["targets"] = spec.seeding.targets;
        } else {
            seeding["count"] = spec.seeding.count;
        }
        seeding["at"] = spec.seeding.at;
        threats.push_back({{"id", spec.threat.id},
                           {"susceptible_variants", spec.threat.susceptible_variants},
                           {"beta", spec.threat.beta},
                           {"profile", profile},
                           {"signature_known", spec.threat.signature_known},
                           {"adaptation_delay", duration_to_json(spec.threat.adaptation_delay)},
                           {"seeding", seeding}});
    }
    root["threats"] = threats;
    root["monitors"] = {{"signature_rate", s.monitors.signature_rate},
                        {"anomaly_rate", s.monitors.anomaly_rate},
                        {"specification_rate", s.monitors.specification_rate},
                        {"pre_event_probability", s.monitors.pre_event_probability},
                        {"withdraw_epsilon", s.monitors.withdraw_epsilon},
                        {"withdraw_dwell", s.monitors.withdraw_dwell}};
    root["understanding"] = {{"base_delay", s.understanding.base_delay},
                             {"kappa", s.understanding.kappa}};
    if (s.understanding.plan_horizon) {
        root["understanding"]["plan_horizon"] = *s.understanding.plan_horizon;
    }
    json candidates = json::array();
    for (const ResponseCandidate& cand : s.candidates) {
        json c = {{"id", cand.id},
                  {"kind", to_string(cand.kind)},
                  {"level", cand.containment_level},
                  {"deploy_rate", cand.deploy_rate},
                  {"prep_delay", cand.prep_delay}};
        if (cand.actual_level) {
            c["actual_level"] = *cand.actual_level;
        }
        if (!cand.urgency.empty()) {
            c["urgency"] = cand.urgency;
        }
        candidates.push_back(std::move(c));
    }
    root["candidates"] = candidates;
    root["updates"] = {{"period", s.updates.period},
                       {"trusted", s.updates.trusted},
                       {"adaptation_delay", duration_to_json(s.updates.adaptation_delay)}};
    root["thresholds"] = {{"p_a", s.thresholds.p_acceptable},
                          {"p_min", s.thresholds.p_min},
                          {"dwell", s.thresholds.dwell},
                          {"model", "dwell"}};
    root["run"] = {{"horizon", s.run.horizon},
                   {"dt", s.run.dt},
                   {"seed", s.run.seed},
                   {"shadow", s.run.shadow}};
    return root.dump();
}

Digest scenario_digest(const Scenario& scenario) {
    return sha256(scenario_to_canonical_json(scenario));
}

bool operator==(const Scenario& a, const Scenario& b) {
    return scenario_to_canonical_json(a) == scenario_to_canonical_json(b);
}

} // namespace cyres
