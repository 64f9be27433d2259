#pragma once

#include "cyres/sha256.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace cyres {

enum class Actor : std::uint8_t { Monitor, Diagnostics, Deployer, Updater };

const char* to_string(Actor a);

/// Payload values are strings or integers only; times are pre-formatted as
/// fixed 6-decimal strings. This keeps the canonical bytes trivially stable
/// across serialize/parse round trips.
using PayloadValue = std::variant<std::string, std::int64_t>;
using Payload = std::map<std::string, PayloadValue>;

/// Canonical payload bytes: UTF-8 JSON object, keys sorted, no insignificant
/// whitespace, strings escaped per JSON.
std::string canonical_payload_bytes(const Payload& payload);

struct DecisionLogEntry {
    std::uint64_t seq = 0;
    double at = 0.0;
    Actor actor = Actor::Monitor;
    std::string action;
    Payload payload;
    Digest payload_digest{};
    Digest prev_digest{};
    Digest entry_digest{};
};

/// Preimage of the entry digest:
///   dec(seq) "|" fixed6(at) "|" actor "|" action "|" hex(payload_digest) "|" hex(prev_digest)
std::string entry_digest_preimage(std::uint64_t seq, double at, Actor actor,
                                  const std::string& action, const Digest& payload_digest,
                                  const Digest& prev_digest);

struct LogVerification {
    bool valid = true;
    std::uint64_t corrupt_seq = 0; // first failing entry when !valid
    std::string reason;
};

/// Hash-chained append-only record of loop decisions. Entry 0 chains from an
/// all-zero digest; every later entry chains from its predecessor.
class DecisionLog {
public:
    const DecisionLogEntry& append(double at, Actor actor, std::string action, Payload payload);

    const std::vector<DecisionLogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Recomputes every digest and the chain linkage.
    static LogVerification verify(const std::vector<DecisionLogEntry>& entries);
    LogVerification verify() const { return verify(entries_); }

    /// JSON Lines export, digests hex-encoded lowercase, one entry per line.
    std::string to_jsonl() const;

    /// Strict parse of a JSON Lines export. Parse failures are reported as a
    /// corruption at the offending line rather than thrown.
    static LogVerification verify_jsonl(const std::string& bytes,
                                        std::vector<DecisionLogEntry>* parsed = nullptr);

private:
    std::vector<DecisionLogEntry> entries_;
};

} // namespace cyres
