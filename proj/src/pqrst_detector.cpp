#include "gaitprint/pqrst_detector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace gaitprint {

ExtremumPoint make_extremum(std::size_t index, double amplitude, ExtremumKind kind,
                            double sample_rate_hz) {
    ExtremumPoint pt;
    pt.index = index;
    pt.time_ms = static_cast<double>(index) * 1000.0 / sample_rate_hz;
    pt.amplitude = amplitude;
    pt.kind = kind;
    return pt;
}

bool PqrstComplex::valid() const {
    const bool ordered = p.index < q.index && q.index < r.index && r.index < s.index &&
                         s.index < t.index;
    const bool kinds = p.kind == ExtremumKind::Valley && q.kind == ExtremumKind::Peak &&
                       r.kind == ExtremumKind::Valley && s.kind == ExtremumKind::Peak &&
                       t.kind == ExtremumKind::Valley;
    const bool amps = q.amplitude > p.amplitude && q.amplitude > r.amplitude &&
                      s.amplitude > r.amplitude && s.amplitude > t.amplitude;
    return ordered && kinds && amps;
}

namespace {

std::size_t ms_to_samples_ceil(double ms, double fs) {
    return static_cast<std::size_t>(std::ceil(ms * fs / 1000.0));
}

// Linear-interpolated percentile of the series values.
double percentile_value(const std::vector<double>& values, double pct) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double rank = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::size_t DetectorConfig::cycle_min_samples(double fs) const {
    return ms_to_samples_ceil(cycle_min_ms, fs);
}
std::size_t DetectorConfig::cycle_max_samples(double fs) const {
    return ms_to_samples_ceil(cycle_max_ms, fs);
}
std::size_t DetectorConfig::backtrack_samples(double fs) const {
    return ms_to_samples_ceil(backtrack_ms, fs);
}
std::size_t DetectorConfig::qrst_search_samples(double fs) const {
    return ms_to_samples_ceil(qrst_search_ms, fs);
}

std::vector<ExtremumPoint> detect_p_anchors(const AxisSeries& acc_z, const DetectorConfig& cfg) {
    const std::vector<double>& v = acc_z.values;
    const std::size_t n = v.size();
    const double fs = acc_z.sample_rate_hz;
    const std::size_t w_max = cfg.cycle_max_samples(fs);
    const std::size_t w_min = cfg.cycle_min_samples(fs);
    if (n < w_max) {
        throw SeriesTooShort("detect_p_anchors: series shorter than one cycle_max window");
    }

    const double gate =
        cfg.prominence_gate ? percentile_value(v, cfg.anchor_max_percentile) : 0.0;

    // ahead_min[j] = min of v over (j, j + w_min], clipped at the end.
    std::vector<double> ahead_min(n, std::numeric_limits<double>::infinity());
    {
        std::deque<std::size_t> dq;  // indices with increasing values
        for (std::size_t j = n; j-- > 0;) {
            while (!dq.empty() && dq.front() > j + w_min) dq.pop_front();
            if (!dq.empty()) ahead_min[j] = v[dq.front()];
            while (!dq.empty() && v[dq.back()] >= v[j]) dq.pop_back();
            dq.push_back(j);
        }
    }

    std::vector<ExtremumPoint> anchors;
    bool have_last = false;
    std::size_t last = 0;

    // Trailing-window minimum over [scope_start, j), where the scope is
    // one cycle_min long and truncated at the previously accepted anchor.
    // A cycle_max scope would still contain the previous cycle's valley
    // shoulder and reject any shallower P that follows it.
    std::deque<std::size_t> trail;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t scope_start =
            std::max(have_last ? last + 1 : 0, j >= w_min - 1 ? j - (w_min - 1) : 0);
        while (!trail.empty() && trail.front() < scope_start) trail.pop_front();

        const bool scope_nonempty = !trail.empty();
        const bool strict_min = scope_nonempty && v[j] < v[trail.front()];
        const bool ahead_ok = !(ahead_min[j] < v[j]);
        const bool spacing_ok = !have_last || j - last >= w_min;
        const bool gate_ok = !cfg.prominence_gate || v[j] < gate;

        if (strict_min && ahead_ok && spacing_ok && gate_ok) {
            anchors.push_back(make_extremum(j, v[j], ExtremumKind::Valley, fs));
            have_last = true;
            last = j;
            trail.clear();
            continue;
        }
        while (!trail.empty() && v[trail.back()] > v[j]) trail.pop_back();
        trail.push_back(j);
    }
    return anchors;
}

ExtremumPoint backtrack_p(const AxisSeries& axis, const ExtremumPoint& p_z,
                          const DetectorConfig& cfg) {
    const std::vector<double>& v = axis.values;
    const std::size_t bt = cfg.backtrack_samples(axis.sample_rate_hz);
    const std::size_t lo = p_z.index >= bt ? p_z.index - bt : 0;

    std::size_t best = lo;
    for (std::size_t j = lo; j <= p_z.index; ++j) {
        const bool better = cfg.extremum_plateau_policy == PlateauPolicy::Leftmost
                                ? v[j] < v[best]
                                : v[j] <= v[best];
        if (better) best = j;
    }
    return make_extremum(best, v[best], ExtremumKind::Valley, axis.sample_rate_hz);
}

namespace {

struct RunExtremum {
    bool found = false;
    std::size_t rep = 0;      // plateau representative per policy
    std::size_t run_end = 0;  // last index of the plateau run
};

// Next local extremum strictly after `from`, with plateau runs classified
// by both neighbours. The representative index must not exceed `bound`.
RunExtremum next_extremum(const std::vector<double>& v, std::size_t from, std::size_t bound,
                          bool want_max, PlateauPolicy policy) {
    RunExtremum out;
    const std::size_t n = v.size();
    std::size_t i = from + 1;
    while (i <= bound && i < n) {
        // plateau run [i, run_end]
        std::size_t run_end = i;
        while (run_end + 1 < n && v[run_end + 1] == v[i]) ++run_end;
        if (run_end + 1 >= n) return out;  // run touches the series end
        const double left = v[i - 1];
        const double right = v[run_end + 1];
        const bool is_extremum = want_max ? (left < v[i] && right < v[i])
                                          : (left > v[i] && right > v[i]);
        if (is_extremum) {
            const std::size_t rep = policy == PlateauPolicy::Leftmost ? i : run_end;
            if (rep > bound) return out;
            out.found = true;
            out.rep = rep;
            out.run_end = run_end;
            return out;
        }
        i = run_end + 1;
    }
    return out;
}

}  // namespace

TraceResult trace_qrst(const AxisSeries& axis, const ExtremumPoint& p, const DetectorConfig& cfg) {
    TraceResult result;
    const std::vector<double>& v = axis.values;
    const double fs = axis.sample_rate_hz;
    const std::size_t bound = p.index + cfg.qrst_search_samples(fs);
    if (bound >= v.size()) {
        // Boundary cycles whose search window runs off the recording are
        // discarded rather than traced against a shorter window.
        result.outcome = TraceOutcome::Incomplete;
        return result;
    }

    const PlateauPolicy policy = cfg.extremum_plateau_policy;
    std::size_t cursor = p.index;
    ExtremumPoint pts[4];
    for (int k = 0; k < 4; ++k) {
        const bool want_max = (k % 2) == 0;  // Q, S are peaks; R, T valleys
        const RunExtremum e = next_extremum(v, cursor, bound, want_max, policy);
        if (!e.found) {
            result.outcome = TraceOutcome::Incomplete;
            return result;
        }
        pts[k] = make_extremum(e.rep, v[e.rep],
                               want_max ? ExtremumKind::Peak : ExtremumKind::Valley, fs);
        cursor = e.run_end;
    }

    PqrstComplex c;
    c.axis_id = axis.axis_id;
    c.p = p;
    c.q = pts[0];
    c.r = pts[1];
    c.s = pts[2];
    c.t = pts[3];
    if (!c.valid()) {
        result.outcome = TraceOutcome::InvariantViolation;
        return result;
    }
    result.outcome = TraceOutcome::Ok;
    result.complex_ = c;
    return result;
}

DetectionResult detect_complexes(const TriaxialSeries& rec, const DetectorConfig& cfg) {
    DetectionResult result;
    const AxisSeries acc_x = rec.axis(AxisId::X);
    const AxisSeries acc_y = rec.axis(AxisId::Y);
    const AxisSeries acc_z = rec.axis(AxisId::Z);

    const std::vector<ExtremumPoint> anchors = detect_p_anchors(acc_z, cfg);
    result.diagnostics.n_anchors = anchors.size();

    const std::size_t w_max = cfg.cycle_max_samples(rec.sample_rate_hz);
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        if (anchors[i].index - anchors[i - 1].index > w_max) ++result.diagnostics.n_gaps;
    }

    auto run_axis = [&](const AxisSeries& axis, const ExtremumPoint& p_start) {
        const std::size_t ai = static_cast<std::size_t>(axis.axis_id);
        const TraceResult tr = trace_qrst(axis, p_start, cfg);
        AxisDiagnostics& diag = result.diagnostics.per_axis[ai];
        switch (tr.outcome) {
            case TraceOutcome::Ok:
                result.complexes[ai].push_back(*tr.complex_);
                ++diag.completed;
                break;
            case TraceOutcome::Incomplete:
                ++diag.discarded_incomplete;
                break;
            case TraceOutcome::InvariantViolation:
                ++diag.discarded_invalid;
                break;
        }
    };

    for (const ExtremumPoint& anchor : anchors) {
        run_axis(acc_z, anchor);
        run_axis(acc_x, backtrack_p(acc_x, anchor, cfg));
        run_axis(acc_y, backtrack_p(acc_y, anchor, cfg));
    }
    return result;
}

}  // namespace gaitprint
