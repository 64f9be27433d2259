#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cyres {

enum class CandidateKind : std::uint8_t { Contain, PartialPatch, FullPatch };

const char* to_string(CandidateKind k);

/// A mitigation the manufacturer could roll out. `containment_level` is the
/// performance of treated vehicles (1.0 for a full patch); `deploy_rate` is
/// vehicles per unit time; `prep_delay` the development time before the
/// rollout starts. `actual_level` lets a scenario script a silently failing
/// response: the rollout applies it while predictions use the promised level.
struct ResponseCandidate {
    std::string id;
    CandidateKind kind = CandidateKind::Contain;
    double containment_level = 1.0;
    double deploy_rate = 1.0;
    double prep_delay = 0.0;
    std::optional<double> actual_level;
    std::string urgency; // free-form label, recorded but not acted on

    double applied_level() const { return actual_level.value_or(containment_level); }
};

/// Detection hazard rates, active while at least one vehicle is infected,
/// plus the chance a signature-known threat is blocked before the event.
/// The withdraw_* pair parameterizes post-deployment response monitoring.
struct MonitorConfig {
    double signature_rate = 0.0;
    double anomaly_rate = 0.0;
    double specification_rate = 0.0;
    double pre_event_probability = 0.5;
    double withdraw_epsilon = 0.05;
    double withdraw_dwell = 1.0;

    double combined_rate(bool signature_known) const {
        return (signature_known ? signature_rate : 0.0) + anomaly_rate + specification_rate;
    }
};

/// One version of what the central intelligence store knows about a threat
/// signature. Entries are only ever appended; a revision appends a new
/// version rather than mutating an old one.
struct KnowledgeEntry {
    double recorded_at = 0.0;
    std::string best_candidate; // empty when only the signature is known
    double efficacy = 0.0;
    double kappa = 1.0; // understanding speedup applied on a hit
    std::string failed_candidate;
};

class KnowledgeBase {
public:
    void append(const std::string& signature, KnowledgeEntry entry) {
        entries_[signature].push_back(std::move(entry));
    }

    bool known(const std::string& signature) const { return entries_.count(signature) > 0; }

    const KnowledgeEntry* latest(const std::string& signature) const {
        auto it = entries_.find(signature);
        if (it == entries_.end() || it->second.empty()) {
            return nullptr;
        }
        return &it->second.back();
    }

    std::vector<std::string> failed_candidates(const std::string& signature) const {
        std::vector<std::string> failed;
        auto it = entries_.find(signature);
        if (it == entries_.end()) {
            return failed;
        }
        for (const KnowledgeEntry& e : it->second) {
            if (!e.failed_candidate.empty()) {
                failed.push_back(e.failed_candidate);
            }
        }
        return failed;
    }

    const std::map<std::string, std::vector<KnowledgeEntry>>& entries() const { return entries_; }

private:
    std::map<std::string, std::vector<KnowledgeEntry>> entries_;
};

} // namespace cyres
