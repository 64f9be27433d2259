#pragma once

#include "cyres/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace cyres {

/// Abstract, unitless simulation time. Monotonically non-decreasing.
class SimClock {
public:
    double now() const { return now_; }

    void advance_to(double t) {
        if (t < now_) {
            throw Error("clock may not move backwards");
        }
        now_ = t;
    }

private:
    double now_ = 0.0;
};

enum class EventKind : std::uint8_t {
    Infection,
    DetectionCheck,
    UnderstandingDone,
    DeployBatch,
    WithdrawCheck,
    ProactiveUpdate,
    Sample,
    AttackerAdapted,
    EndOfHorizon,
};

const char* to_string(EventKind k);

/// Infection event subtypes, carried in SimEvent::arg:
///   kSeedWave  - scenario seeding of an incident's target set
///   kContact   - propagation contact attempt from `vehicle`
///   arg >= 0   - degradation stage `arg` lands on `vehicle`
inline constexpr int kSeedWave = -2;
inline constexpr int kContact = -1;

struct SimEvent {
    double at = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Sample;
    int threat = -1;
    int vehicle = -1;
    int arg = -1;
    int incident = -1;
    /// Vehicle state epoch at scheduling time. Stage advances and contact
    /// chains die when the vehicle has since been treated, cleared or
    /// re-infected, so stale events cannot act on a newer infection.
    int epoch = -1;
};

/// Min-heap on (at, seq). seq is assigned in scheduling order, which makes
/// the processing order a total order and the whole run replay-deterministic.
class EventQueue {
public:
    void push(SimEvent ev) {
        heap_.push_back(ev);
        std::push_heap(heap_.begin(), heap_.end(), after);
    }

    const SimEvent& top() const { return heap_.front(); }

    SimEvent pop() {
        std::pop_heap(heap_.begin(), heap_.end(), after);
        SimEvent ev = heap_.back();
        heap_.pop_back();
        return ev;
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    /// Unordered view of pending events (clone construction, tests).
    const std::vector<SimEvent>& pending() const { return heap_; }

    /// Keeps only events satisfying `pred` and restores the heap property.
    template <typename Pred>
    void filter(Pred pred) {
        std::erase_if(heap_, [&](const SimEvent& ev) { return !pred(ev); });
        std::make_heap(heap_.begin(), heap_.end(), after);
    }

private:
    static bool after(const SimEvent& a, const SimEvent& b) {
        if (a.at != b.at) {
            return a.at > b.at;
        }
        return a.seq > b.seq;
    }

    std::vector<SimEvent> heap_;
};

} // namespace cyres
