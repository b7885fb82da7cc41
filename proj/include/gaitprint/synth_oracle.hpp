#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gaitprint/signal_model.hpp"

namespace gaitprint {

// Planted per-axis waveform shape: amplitudes of P,Q,R,S,T around a
// stance baseline. Valleys below their neighbouring peaks by
// construction; on Z the P valley must be the deepest point of the
// cycle (that premise is what anchor detection rests on).
struct AxisShape {
    std::array<double, 5> amplitudes = {-2.0, 1.0, -0.8, 1.2, -1.2};  // p,q,r,s,t
    double baseline = 0.0;
};

struct GaitParams {
    double cycle_ms = 1000.0;        // in [800, 1400]
    double swing_fraction = 0.4;     // swing is ~40% of a gait cycle
    std::array<double, 4> interval_fractions = {0.25, 0.25, 0.25, 0.25};
    AxisShape x, y, z;
    std::size_t axis_lead_samples = 1;  // X/Y complexes precede Z's P
    double pre_p_ramp_ms = 60.0;        // baseline -> P descent
    double post_t_ramp_ms = 60.0;       // T -> baseline recovery
    double lead_in_ms = 250.0;          // stance before the first cycle
    double jitter_rel = 0.0;            // relative sd of cycle-to-cycle noise
    double noise_sigma = 0.0;           // additive Gaussian sd
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidParams
};

struct PlantedPoint {
    std::size_t index = 0;
    double amplitude = 0.0;
};

struct PlantedCycle {
    std::array<PlantedPoint, 5> points;  // p,q,r,s,t
};

struct GroundTruth {
    std::array<std::vector<PlantedCycle>, 3> per_axis;  // indexed by AxisId

    const std::vector<PlantedCycle>& axis(AxisId id) const {
        return per_axis[static_cast<std::size_t>(id)];
    }
};

struct SyntheticRecording {
    TriaxialSeries series;
    GroundTruth truth;
};

// Stance segments sit at the baseline; swing segments interpolate
// monotonically (cubic smoothstep) through the planted extrema, so at
// noise 0 every planted point is an exact local extremum and no
// spurious extremum exists between knots.
SyntheticRecording generate_recording(const GaitParams& params, double duration_s, double fs);

struct CorpusConfig {
    std::size_t n_subjects = 10;
    std::uint64_t seed = 0;
    double fs = 100.0;
    std::vector<int> sessions = {1, 2};
    std::map<int, double> task_duration_s = {{1, 20.0}, {3, 60.0}, {5, 20.0}};
    double noise_sigma = 0.05;
    double jitter_rel = 0.05;
    // All subjects share the same GaitParams (indistinguishability
    // controls); otherwise amplitudes are sampled per subject while the
    // interval structure stays shared.
    bool identical_subjects = false;
    double base_cycle_ms = 1000.0;
};

// Per-subject parameters: amplitudes sampled from wide per-axis ranges,
// interval structure shared across subjects.
GaitParams sample_subject_params(const CorpusConfig& cfg, std::size_t subject_idx);

// Writes a dataset-ingest-compatible tree
// (root/subject_<id>/session_<s>/task_<t>.csv) plus a
// task_<t>.ground_truth.jsonl sidecar per recording.
void generate_corpus(const CorpusConfig& cfg, const std::filesystem::path& root);

}  // namespace gaitprint
