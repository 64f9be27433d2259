#include "cyres/metrics.hpp"

#include "cyres/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cyres {

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::Resilient: return "Resilient";
    case Outcome::NotDetectedInTime: return "NotDetectedInTime";
    case Outcome::NotUnderstoodInTime: return "NotUnderstoodInTime";
    case Outcome::FixTooLate: return "FixTooLate";
    }
    return "?";
}

void PerformanceTrace::record(double t, double p) {
    if (!points_.empty()) {
        if (t < points_.back().t) {
            throw Error("trace sample times must be non-decreasing");
        }
        if (t == points_.back().t) {
            points_.back().p = p;
            return;
        }
    }
    points_.push_back({t, p});
}

double PerformanceTrace::value_at(double t) const {
    double value = 1.0;
    for (const TracePoint& pt : points_) {
        if (pt.t > t) {
            break;
        }
        value = pt.p;
    }
    return value;
}

EventWindow segment_event(const PerformanceTrace& trace, const Thresholds& thresholds,
                          double horizon) {
    const auto& pts = trace.points();
    std::size_t start_idx = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].p < 1.0) {
            start_idx = i;
            break;
        }
    }
    if (start_idx == pts.size()) {
        throw NoEventError("performance never left 1.0");
    }
    EventWindow window;
    window.t_start = pts[start_idx].t;
    // The event ends at full recovery, or at the first return to P_A after
    // the performance has actually been below it. A decline that never
    // leaves the acceptable band must not end at its own first sample.
    bool dipped = pts[start_idx].p < thresholds.p_acceptable;
    for (std::size_t i = start_idx + 1; i < pts.size(); ++i) {
        if (pts[i].p >= 1.0 || (dipped && pts[i].p >= thresholds.p_acceptable)) {
            window.t_end = pts[i].t;
            window.complete = true;
            return window;
        }
        if (pts[i].p < thresholds.p_acceptable) {
            dipped = true;
        }
    }
    window.t_end = horizon;
    window.complete = false;
    return window;
}

std::optional<double> time_to_failure(const PerformanceTrace& trace, const Thresholds& thresholds,
                                      double t_start) {
    for (const TracePoint& pt : trace.points()) {
        if (pt.t < t_start) {
            continue;
        }
        if (pt.p < thresholds.p_min) {
            return pt.t - t_start;
        }
    }
    return std::nullopt;
}

std::optional<double> time_to_recovery(const PerformanceTrace& trace, const Thresholds& thresholds,
                                       double failure_at) {
    for (const TracePoint& pt : trace.points()) {
        if (pt.t < failure_at) {
            continue;
        }
        if (pt.p >= thresholds.p_acceptable) {
            return pt.t - failure_at;
        }
    }
    return std::nullopt;
}

double time_below_min(const PerformanceTrace& trace, const Thresholds& thresholds, double t_start,
                      double t_end) {
    const auto& pts = trace.points();
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double seg_start = std::max(pts[i].t, t_start);
        const double seg_end = std::min(i + 1 < pts.size() ? pts[i + 1].t : t_end, t_end);
        if (seg_end <= seg_start) {
            continue;
        }
        if (pts[i].p < thresholds.p_min) {
            total += seg_end - seg_start;
        }
    }
    return total;
}

ResilienceIntegral resilience_integral(const PerformanceTrace& trace, double t_start,
                                       double t_end) {
    if (!(t_start < t_end)) {
        throw Error("resilience integral needs t_start < t_end");
    }
    const auto& pts = trace.points();
    // Accumulate the shortfall below P == 1 instead of the integral itself:
    // an all-ones window then has an exactly zero deficit and the normalized
    // value is exactly 1.0.
    double deficit = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double seg_start = std::max(pts[i].t, t_start);
        const double seg_end = std::min(i + 1 < pts.size() ? pts[i + 1].t : t_end, t_end);
        if (seg_end <= seg_start) {
            continue;
        }
        deficit += (1.0 - pts[i].p) * (seg_end - seg_start);
    }
    const double span = t_end - t_start;
    ResilienceIntegral result;
    result.raw = span - deficit;
    result.normalized = result.raw / span;
    return result;
}

std::optional<double> catastrophe_time(const PerformanceTrace& trace,
                                       const Thresholds& thresholds) {
    const auto& pts = trace.points();
    if (pts.empty()) {
        return std::nullopt;
    }
    const double trace_end = pts.back().t;
    std::optional<double> breach_start;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const bool below = pts[i].p < thresholds.p_min;
        const double seg_end = i + 1 < pts.size() ? pts[i + 1].t : trace_end;
        if (below && !breach_start) {
            breach_start = pts[i].t;
        }
        if (below && breach_start && seg_end - *breach_start >= thresholds.dwell) {
            return breach_start;
        }
        if (!below) {
            breach_start.reset();
        }
    }
    return std::nullopt;
}

Outcome classify_outcome(const IncidentTimeline& timeline, std::optional<double> recovery,
                         double t_catastrophe, bool no_event) {
    if (no_event) {
        return Outcome::Resilient;
    }
    if (recovery && *recovery < t_catastrophe) {
        return Outcome::Resilient;
    }
    if (!timeline.t_detect || *timeline.t_detect >= t_catastrophe) {
        return Outcome::NotDetectedInTime;
    }
    if (!timeline.t_understand || *timeline.t_understand >= t_catastrophe) {
        return Outcome::NotUnderstoodInTime;
    }
    return Outcome::FixTooLate;
}

CertificationReport certification_metrics(const std::vector<CertificationInputs>& runs,
                                          std::uint64_t seed) {
    if (runs.empty()) {
        throw Error("certification metrics need at least one run");
    }
    CertificationReport report;
    report.runs = static_cast<std::int64_t>(runs.size());
    report.seed = seed;
    report.engineered_differences = runs.front().engineered_differences;
    report.update_frequency = runs.front().update_frequency;

    std::int64_t detected = 0;
    std::int64_t understood = 0;
    std::int64_t treated = 0;
    double active_time = 0.0;
    double t_prop_sum = 0.0;
    std::int64_t t_prop_finite = 0;
    for (const CertificationInputs& run : runs) {
        const bool detected_in_time = run.detected && run.t_detect < run.t_catastrophe;
        if (detected_in_time) {
            ++detected;
            if (run.understood && run.t_understand < run.t_catastrophe) {
                ++understood;
            }
        }
        treated += run.vehicles_treated;
        active_time += run.deployment_active_time;
        if (std::isfinite(run.t_propagate)) {
            t_prop_sum += run.t_propagate;
            ++t_prop_finite;
        }
    }
    report.p_detect = static_cast<double>(detected) / static_cast<double>(runs.size());
    report.p_understand_defined = detected > 0;
    report.p_understand =
        detected > 0 ? static_cast<double>(understood) / static_cast<double>(detected) : 0.0;
    report.deploy_rate_measured =
        active_time > 0.0 ? static_cast<double>(treated) / active_time : 0.0;
    report.t_propagate_mean =
        t_prop_finite > 0 ? t_prop_sum / static_cast<double>(t_prop_finite) : kInfiniteTime;
    return report;
}

} // namespace cyres
