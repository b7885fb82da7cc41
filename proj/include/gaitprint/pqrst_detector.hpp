#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "gaitprint/signal_model.hpp"

namespace gaitprint {

enum class ExtremumKind { Valley, Peak };

struct ExtremumPoint {
    std::size_t index = 0;
    double time_ms = 0.0;  // index * 1000 / sample_rate_hz
    double amplitude = 0.0;
    ExtremumKind kind = ExtremumKind::Valley;
};

ExtremumPoint make_extremum(std::size_t index, double amplitude, ExtremumKind kind,
                            double sample_rate_hz);

// Five annotated extremum points of one gait cycle on one axis:
// valleys P, R, T and peaks Q, S in strict time order.
struct PqrstComplex {
    AxisId axis_id = AxisId::X;
    ExtremumPoint p, q, r, s, t;

    bool valid() const;
};

enum class PlateauPolicy { Leftmost, Rightmost };

struct DetectorConfig {
    double cycle_min_ms = 800.0;
    double cycle_max_ms = 1400.0;
    double backtrack_ms = 10.0;
    // Forward search bound for tracing Q..T from P; the swing phase is
    // roughly 40% of a gait cycle.
    double qrst_search_ms = 560.0;
    PlateauPolicy extremum_plateau_policy = PlateauPolicy::Leftmost;
    // Anchors must sit below this amplitude percentile of the series.
    // Guards against noise-only minima; disable for exactness tests.
    bool prominence_gate = true;
    double anchor_max_percentile = 25.0;

    std::size_t cycle_min_samples(double fs) const;
    std::size_t cycle_max_samples(double fs) const;
    std::size_t backtrack_samples(double fs) const;
    std::size_t qrst_search_samples(double fs) const;
};

enum class TraceOutcome { Ok, Incomplete, InvariantViolation };

struct TraceResult {
    TraceOutcome outcome = TraceOutcome::Incomplete;
    std::optional<PqrstComplex> complex_;
};

struct AxisDiagnostics {
    std::size_t completed = 0;
    std::size_t discarded_incomplete = 0;
    std::size_t discarded_invalid = 0;
};

struct DetectionDiagnostics {
    std::size_t n_anchors = 0;
    // Anchor spacings above cycle_max_ms (missed cycles / pauses).
    std::size_t n_gaps = 0;
    std::array<AxisDiagnostics, 3> per_axis;  // indexed by AxisId

    const AxisDiagnostics& axis(AxisId id) const {
        return per_axis[static_cast<std::size_t>(id)];
    }
};

struct DetectionResult {
    std::array<std::vector<PqrstComplex>, 3> complexes;  // indexed by AxisId
    DetectionDiagnostics diagnostics;

    const std::vector<PqrstComplex>& axis(AxisId id) const {
        return complexes[static_cast<std::size_t>(id)];
    }
};

// P anchors: per-cycle minima of Acc_Z. Greedy left-to-right scan; an
// index is accepted when it is the strict minimum of the trailing
// cycle_min window (truncated at the previously accepted anchor), no
// smaller value follows within cycle_min, spacing from the previous
// anchor is at least cycle_min, and the prominence gate (when enabled)
// admits it. Throws SeriesTooShort when shorter than one cycle_max.
std::vector<ExtremumPoint> detect_p_anchors(const AxisSeries& acc_z, const DetectorConfig& cfg);

// P on Acc_X / Acc_Y appears slightly before P on Acc_Z: take the
// minimum over the closed window [p_z.index - backtrack, p_z.index],
// clipped at the series start.
ExtremumPoint backtrack_p(const AxisSeries& axis, const ExtremumPoint& p_z,
                          const DetectorConfig& cfg);

// From P, locate local max / min / max / min (Q, R, S, T) in turn within
// qrst_search_ms. Incomplete or invariant-violating candidates are
// reported via the outcome, never thrown.
TraceResult trace_qrst(const AxisSeries& axis, const ExtremumPoint& p, const DetectorConfig& cfg);

// Whole-recording detection: Z anchors, backtracked X/Y starts, traced
// complexes per axis, with per-axis discard counts.
DetectionResult detect_complexes(const TriaxialSeries& rec, const DetectorConfig& cfg);

}  // namespace gaitprint
