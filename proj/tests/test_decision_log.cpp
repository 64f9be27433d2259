#include "cyres/decision_log.hpp"
#include "cyres/sha256.hpp"

#include <doctest.h>

#include <string>

using namespace cyres;

namespace {

DecisionLog sample_log(int entries) {
    DecisionLog log;
    for (int i = 0; i < entries; ++i) {
        log.append(0.5 * i, i % 2 == 0 ? Actor::Monitor : Actor::Deployer, "action",
                   {{"idx", std::int64_t(i)}, {"what", std::string("step")}});
    }
    return log;
}

} // namespace

TEST_CASE("genesis entry chains from the all-zero digest") {
    DecisionLog log;
    const DecisionLogEntry& first = log.append(0.0, Actor::Monitor, "detect", {});
    CHECK(first.seq == 0);
    CHECK(first.prev_digest == Digest{});
    CHECK(to_hex(first.payload_digest) ==
          to_hex(sha256("{}"))); // canonical empty payload is exactly "{}"
}

TEST_CASE("each entry chains from its predecessor") {
    DecisionLog log;
    const DecisionLogEntry first = log.append(0.0, Actor::Monitor, "a", {});
    const DecisionLogEntry second = log.append(1.0, Actor::Deployer, "b", {});
    CHECK(second.prev_digest == first.entry_digest);
    CHECK(second.seq == 1);
    CHECK(log.verify().valid);
}

TEST_CASE("canonical payload bytes sort keys and strip whitespace") {
    const Payload payload{{"zeta", std::int64_t(1)}, {"alpha", std::string("x\"y")}};
    CHECK(canonical_payload_bytes(payload) == R"({"alpha":"x\"y","zeta":1})");
}

TEST_CASE("in-memory tampering is caught at the right entry") {
    DecisionLog log = sample_log(10);
    auto entries = log.entries();
    entries[7].payload["idx"] = std::int64_t(99);
    const LogVerification v = DecisionLog::verify(entries);
    CHECK_FALSE(v.valid);
    CHECK(v.corrupt_seq == 7);
}

TEST_CASE("jsonl round trip verifies end to end") {
    DecisionLog log = sample_log(100);
    std::vector<DecisionLogEntry> parsed;
    const LogVerification v = DecisionLog::verify_jsonl(log.to_jsonl(), &parsed);
    CHECK(v.valid);
    CHECK(parsed.size() == 100);
    CHECK(parsed[42].payload == log.entries()[42].payload);
}

TEST_CASE("flipping any single byte of an entry fails at that seq") {
    DecisionLog log = sample_log(5);
    const std::string jsonl = log.to_jsonl();

    // Identify the line each byte belongs to.
    std::vector<std::uint64_t> line_of_byte(jsonl.size(), 0);
    std::uint64_t line = 0;
    for (std::size_t i = 0; i < jsonl.size(); ++i) {
        line_of_byte[i] = line;
        if (jsonl[i] == '\n') {
            ++line;
        }
    }

    for (std::size_t i = 0; i < jsonl.size(); ++i) {
        if (jsonl[i] == '\n') {
            continue; // newline flips change the framing, covered below
        }
        std::string tampered = jsonl;
        tampered[i] = tampered[i] == 'x' ? 'y' : 'x';
        const LogVerification v = DecisionLog::verify_jsonl(tampered);
        CHECK_FALSE(v.valid);
        CHECK(v.corrupt_seq == line_of_byte[i]);
    }
}

TEST_CASE("truncating whole entries leaves a valid prefix") {
    DecisionLog log = sample_log(4);
    std::string jsonl = log.to_jsonl();
    const std::size_t cut = jsonl.find_last_of('\n', jsonl.size() - 2);
    jsonl.resize(cut + 1);
    std::vector<DecisionLogEntry> parsed;
    const LogVerification v = DecisionLog::verify_jsonl(jsonl, &parsed);
    CHECK(v.valid); // chain semantics: truncation detection needs the summary count
    CHECK(parsed.size() == 3);
}
