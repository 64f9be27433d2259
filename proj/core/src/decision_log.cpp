#include "cyres/decision_log.hpp"

#include "cyres/errors.hpp"
#include "cyres/format.hpp"

#include <json.hpp>

#include <cstdlib>
#include <sstream>

namespace cyres {

using nlohmann::json;

const char* to_string(Actor a) {
    switch (a) {
    case Actor::Monitor: return "Monitor";
    case Actor::Diagnostics: return "Diagnostics";
    case Actor::Deployer: return "Deployer";
    case Actor::Updater: return "Updater";
    }
    return "?";
}

namespace {

bool actor_from_string(const std::string& s, Actor& out) {
    if (s == "Monitor") out = Actor::Monitor;
    else if (s == "Diagnostics") out = Actor::Diagnostics;
    else if (s == "Deployer") out = Actor::Deployer;
    else if (s == "Updater") out = Actor::Updater;
    else return false;
    return true;
}

void append_payload_value(std::string& out, const PayloadValue& value) {
    if (const auto* s = std::get_if<std::string>(&value)) {
        out += '"';
        out += json_escape(*s);
        out += '"';
    } else {
        out += std::to_string(std::get<std::int64_t>(value));
    }
}

} // namespace

std::string canonical_payload_bytes(const Payload& payload) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : payload) { // std::map iterates in sorted key order
        if (!first) {
            out += ',';
        }
        first = false;
        out += '"';
        out += json_escape(key);
        out += "\":";
        append_payload_value(out, value);
    }
    out += '}';
    return out;
}

std::string entry_digest_preimage(std::uint64_t seq, double at, Actor actor,
                                  const std::string& action, const Digest& payload_digest,
                                  const Digest& prev_digest) {
    std::string preimage = std::to_string(seq);
    preimage += '|';
    preimage += format_fixed6(at);
    preimage += '|';
    preimage += to_string(actor);
    preimage += '|';
    preimage += action;
    preimage += '|';
    preimage += to_hex(payload_digest);
    preimage += '|';
    preimage += to_hex(prev_digest);
    return preimage;
}

const DecisionLogEntry& DecisionLog::append(double at, Actor actor, std::string action,
                                            Payload payload) {
    DecisionLogEntry entry;
    entry.seq = entries_.size();
    entry.at = at;
    entry.actor = actor;
    entry.action = std::move(action);
    entry.payload = std::move(payload);
    entry.payload_digest = sha256(canonical_payload_bytes(entry.payload));
    entry.prev_digest = entries_.empty() ? Digest{} : entries_.back().entry_digest;
    entry.entry_digest = sha256(entry_digest_preimage(entry.seq, entry.at, entry.actor,
                                                      entry.action, entry.payload_digest,
                                                      entry.prev_digest));
    entries_.push_back(std::move(entry));
    return entries_.back();
}

LogVerification DecisionLog::verify(const std::vector<DecisionLogEntry>& entries) {
    Digest prev{};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const DecisionLogEntry& e = entries[i];
        LogVerification bad;
        bad.valid = false;
        bad.corrupt_seq = i;
        if (e.seq != i) {
            bad.reason = "sequence number mismatch";
            return bad;
        }
        if (e.prev_digest != prev) {
            bad.reason = "chain linkage broken";
            return bad;
        }
        if (sha256(canonical_payload_bytes(e.payload)) != e.payload_digest) {
            bad.reason = "payload digest mismatch";
            return bad;
        }
        const Digest expect = sha256(
            entry_digest_preimage(e.seq, e.at, e.actor, e.action, e.payload_digest, e.prev_digest));
        if (expect != e.entry_digest) {
            bad.reason = "entry digest mismatch";
            return bad;
        }
        prev = e.entry_digest;
    }
    return LogVerification{};
}

std::string DecisionLog::to_jsonl() const {
    std::string out;
    for (const DecisionLogEntry& e : entries_) {
        out += "{\"action\":\"";
        out += json_escape(e.action);
        out += "\",\"actor\":\"";
        out += to_string(e.actor);
        out += "\",\"at\":\"";
        out += format_fixed6(e.at);
        out += "\",\"entry_digest\":\"";
        out += to_hex(e.entry_digest);
        out += "\",\"payload\":";
        out += canonical_payload_bytes(e.payload);
        out += ",\"payload_digest\":\"";
        out += to_hex(e.payload_digest);
        out += "\",\"prev_digest\":\"";
        out += to_hex(e.prev_digest);
        out += "\",\"seq\":";
        out += std::to_string(e.seq);
        out += "}\n";
    }
    return out;
}

LogVerification DecisionLog::verify_jsonl(const std::string& bytes,
                                          std::vector<DecisionLogEntry>* parsed) {
    std::vector<DecisionLogEntry> entries;
    std::istringstream lines(bytes);
    std::string line;
    std::uint64_t index = 0;
    Digest prev{};
    while (std::getline(lines, line)) {
        if (line.empty()) {
            continue;
        }
        LogVerification bad;
        bad.valid = false;
        bad.corrupt_seq = index;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || j.size() != 8) {
            bad.reason = "malformed entry";
            return bad;
        }
        const char* required[] = {"action", "actor",          "at",          "entry_digest",
                                  "payload", "payload_digest", "prev_digest", "seq"};
        for (const char* key : required) {
            if (!j.contains(key)) {
                bad.reason = std::string("missing key ") + key;
                return bad;
            }
        }
        if (!j["action"].is_string() || !j["actor"].is_string() || !j["at"].is_string() ||
            !j["entry_digest"].is_string() || !j["payload"].is_object() ||
            !j["payload_digest"].is_string() || !j["prev_digest"].is_string() ||
            !j["seq"].is_number_integer()) {
            bad.reason = "field type mismatch";
            return bad;
        }

        DecisionLogEntry entry;
        entry.seq = j["seq"].get<std::uint64_t>();
        entry.action = j["action"].get<std::string>();
        if (!actor_from_string(j["actor"].get<std::string>(), entry.actor)) {
            bad.reason = "unknown actor";
            return bad;
        }
        const std::string at_text = j["at"].get<std::string>();
        char* end = nullptr;
        entry.at = std::strtod(at_text.c_str(), &end);
        if (end == at_text.c_str() || *end != '\0') {
            bad.reason = "unparseable time";
            return bad;
        }
        // The stored time must already be in canonical fixed-6 form, or the
        // recomputed preimage would silently diverge from the written bytes.
        if (format_fixed6(entry.at) != at_text) {
            bad.reason = "non-canonical time";
            return bad;
        }
        for (const auto& [key, value] : j["payload"].items()) {
            if (value.is_string()) {
                entry.payload.emplace(key, value.get<std::string>());
            } else if (value.is_number_integer()) {
                entry.payload.emplace(key, value.get<std::int64_t>());
            } else {
                bad.reason = "payload values must be strings or integers";
                return bad;
            }
        }
        try {
            entry.payload_digest = digest_from_hex(j["payload_digest"].get<std::string>());
            entry.prev_digest = digest_from_hex(j["prev_digest"].get<std::string>());
            entry.entry_digest = digest_from_hex(j["entry_digest"].get<std::string>());
        } catch (const ParseError&) {
            bad.reason = "malformed digest";
            return bad;
        }

        if (entry.seq != index) {
            bad.reason = "sequence number mismatch";
            return bad;
        }
        if (entry.prev_digest != prev) {
            bad.reason = "chain linkage broken";
            return bad;
        }
        if (sha256(canonical_payload_bytes(entry.payload)) != entry.payload_digest) {
            bad.reason = "payload digest mismatch";
            return bad;
        }
        const Digest expect =
            sha256(entry_digest_preimage(entry.seq, entry.at, entry.actor, entry.action,
                                         entry.payload_digest, entry.prev_digest));
        if (expect != entry.entry_digest) {
            bad.reason = "entry digest mismatch";
            return bad;
        }
        prev = entry.entry_digest;
        entries.push_back(std::move(entry));
        ++index;
    }
    if (parsed != nullptr) {
        *parsed = std::move(entries);
    }
    return LogVerification{};
}

} // namespace cyres
