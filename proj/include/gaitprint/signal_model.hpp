#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaitprint/errors.hpp"

namespace gaitprint {

enum class AxisId { X, Y, Z };

const char* axis_name(AxisId axis);
AxisId axis_from_name(const std::string& name);

// Preprocessing steps applied to a series, in application order.
enum class PreprocStep { ZscoreNormalized, MovingAverageSmoothed };

// Standard-deviation convention used by zscore_normalize (N-1
// denominator); recorded in manifests so outputs are comparable.
inline constexpr const char* kSdConvention = "sample (n-1)";

struct Provenance {
    std::vector<PreprocStep> steps;

    bool normalized() const;
    bool smoothed() const;
    // True when z-score normalization was applied before smoothing
    // (the pipeline's required order).
    bool normalized_before_smoothed() const;
};

// Identity of the recording a series came from.
struct RecordingOrigin {
    std::string subject;
    int session = 0;
    int task = 0;
    std::string note;
};

// One axis of a uniformly sampled accelerometer recording.
// Sample i occurs at i / sample_rate_hz seconds.
struct AxisSeries {
    double sample_rate_hz = 0.0;
    std::vector<double> values;
    AxisId axis_id = AxisId::X;
    Provenance provenance;

    AxisSeries() = default;
    // Validates: rate > 0, non-empty, all values finite.
    AxisSeries(double rate_hz, std::vector<double> vals, AxisId axis);

    std::size_t size() const { return values.size(); }
    double time_ms_at(std::size_t index) const {
        return static_cast<double>(index) * 1000.0 / sample_rate_hz;
    }
};

// Uniformly sampled 3-axis recording; x/y/z have identical length.
struct TriaxialSeries {
    double sample_rate_hz = 0.0;
    std::vector<double> x, y, z;
    RecordingOrigin origin;
    Provenance provenance;

    TriaxialSeries() = default;
    TriaxialSeries(double rate_hz, std::vector<double> xs, std::vector<double> ys,
                   std::vector<double> zs, RecordingOrigin org = {});

    std::size_t size() const { return x.size(); }
    AxisSeries axis(AxisId id) const;
};

struct SeriesStats {
    double mean = 0.0;
    double sd = 0.0;  // sample convention (N-1 denominator)
};

// Two-pass mean / sample standard deviation.
SeriesStats series_stats(const std::vector<double>& values);

// Centers to mean 0 and scales to sample sd 1 (ddof = 1).
// Throws DegenerateSeries on constant input, Error if length < 2.
AxisSeries zscore_normalize(const AxisSeries& series);

// Moving-average smoothing. Window is nominally centered
// ([i - (w-1)/2, i + w/2]) and shrinks at the edges, so output length
// equals input length. Throws WindowTooLarge when the series is
// shorter than the window.
AxisSeries smooth_moving_average(const AxisSeries& series, std::size_t window_len = 4);

}  // namespace gaitprint
