#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cyres {

constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct TracePoint {
    double t = 0.0;
    double p = 1.0;
};

/// Sampled mission performance, interpreted as a right-continuous step
/// function: P(t) equals the most recent sample at or before t. Sample times
/// are strictly increasing; recording at an existing time replaces the value,
/// so the trace always ends in the post-event state of each instant.
class PerformanceTrace {
public:
    void record(double t, double p);

    const std::vector<TracePoint>& points() const { return points_; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }
    const TracePoint& front() const { return points_.front(); }
    const TracePoint& back() const { return points_.back(); }

    /// Step-function value at time t (t before the first sample reads 1.0).
    double value_at(double t) const;

private:
    std::vector<TracePoint> points_;
};

/// Regulatory thresholds framing an event.
struct Thresholds {
    double p_acceptable = 1.0; // P_A, event ends at P >= P_A
    double p_min = 0.0;        // failure below this, strict <
    double dwell = 1.0;        // D_c, catastrophe dwell duration
};

/// Times of the detect / understand / respond partition of an incident.
/// Fields are set in run order and are non-decreasing where defined.
struct IncidentTimeline {
    std::optional<double> t_start;
    std::optional<double> t_detect;
    std::optional<double> t_understand;
    std::optional<double> t_deploy_start;
    std::optional<double> t_deploy_partial_complete;
    std::optional<double> t_deploy_full_complete;
    std::optional<double> t_end;
};

enum class Outcome : std::uint8_t { Resilient, NotDetectedInTime, NotUnderstoodInTime, FixTooLate };

const char* to_string(Outcome o);

struct EventWindow {
    double t_start = 0.0;
    double t_end = 0.0; // horizon when recovery never happened
    bool complete = false;
};

struct ResilienceReport {
    bool no_event = false;
    double t_start = 0.0;
    double t_end = 0.0;
    bool recovered = false;
    std::optional<double> time_to_failure;
    std::optional<double> time_to_recovery;
    double time_below_min = 0.0;
    double resilience_raw = 0.0;
    double resilience_norm = 1.0;
    double loss = 0.0;
    double t_catastrophe = kInfiniteTime; // infinity when no catastrophe
    Outcome outcome = Outcome::Resilient;
    IncidentTimeline timeline;
    int residual_contained = 0;
};

/// Per-run inputs feeding the certification aggregation.
struct CertificationInputs {
    bool detected = false;
    double t_detect = 0.0;
    bool understood = false;
    double t_understand = 0.0;
    bool blocked_pre_event = false;
    double t_catastrophe = kInfiniteTime;
    std::int64_t vehicles_treated = 0;
    double deployment_active_time = 0.0;
    double t_propagate = kInfiniteTime; // shadow propagation time
    double peak_infected_fraction = 0.0;
    int engineered_differences = 1;
    double update_frequency = 0.0;
};

struct CertificationReport {
    double p_detect = 0.0;
    double p_understand = 0.0;
    bool p_understand_defined = false;
    double deploy_rate_measured = 0.0;
    double t_propagate_mean = kInfiniteTime;
    int engineered_differences = 1;
    double update_frequency = 0.0;
    std::int64_t runs = 0;
    std::uint64_t seed = 0;
};

/// Locates the event window: t_start is the first sample with P < 1 and
/// t_end the first later sample with P >= P_A (horizon if none).
/// Throws NoEventError when P == 1 throughout.
EventWindow segment_event(const PerformanceTrace& trace, const Thresholds& thresholds,
                          double horizon);

/// Delay from t_start to the first sample with P < P_min (strict).
std::optional<double> time_to_failure(const PerformanceTrace& trace, const Thresholds& thresholds,
                                      double t_start);

/// Delay from the failure instant to the first sample with P >= P_A.
std::optional<double> time_to_recovery(const PerformanceTrace& trace, const Thresholds& thresholds,
                                       double failure_at);

/// Total duration with P < P_min inside [t_start, t_end].
double time_below_min(const PerformanceTrace& trace, const Thresholds& thresholds, double t_start,
                      double t_end);

struct ResilienceIntegral {
    double raw = 0.0;
    double normalized = 1.0;
};

/// Exact rectangle sum of the step trace over [t_start, t_end].
/// Computed as span minus the accumulated shortfall below 1, so a P == 1
/// window yields exactly raw == span and normalized == 1.0.
ResilienceIntegral resilience_integral(const PerformanceTrace& trace, double t_start, double t_end);

/// Start of the first maximal interval with P < P_min lasting >= dwell.
/// Evaluated on the response-disabled shadow trace; nullopt means t_c = inf.
std::optional<double> catastrophe_time(const PerformanceTrace& trace, const Thresholds& thresholds);

/// The three failure cases plus resilience, decided against t_c.
/// `recovery` is the completed event end when the run recovered.
Outcome classify_outcome(const IncidentTimeline& timeline, std::optional<double> recovery,
                         double t_catastrophe, bool no_event);

/// Deterministic aggregation over per-run inputs, in run order.
CertificationReport certification_metrics(const std::vector<CertificationInputs>& runs,
                                          std::uint64_t seed);

} // namespace cyres
