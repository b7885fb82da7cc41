#include "gaitprint/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaitprint {

const char* axis_name(AxisId axis) {
    switch (axis) {
        case AxisId::X: return "x";
        case AxisId::Y: return "y";
        case AxisId::Z: return "z";
    }
    return "?";
}

AxisId axis_from_name(const std::string& name) {
    if (name == "x" || name == "X") return AxisId::X;
    if (name == "y" || name == "Y") return AxisId::Y;
    if (name == "z" || name == "Z") return AxisId::Z;
    throw Error("unknown axis name: " + name);
}

bool Provenance::normalized() const {
    return std::find(steps.begin(), steps.end(), PreprocStep::ZscoreNormalized) != steps.end();
}

bool Provenance::smoothed() const {
    return std::find(steps.begin(), steps.end(), PreprocStep::MovingAverageSmoothed) != steps.end();
}

bool Provenance::normalized_before_smoothed() const {
    auto norm = std::find(steps.begin(), steps.end(), PreprocStep::ZscoreNormalized);
    auto smooth = std::find(steps.begin(), steps.end(), PreprocStep::MovingAverageSmoothed);
    return norm != steps.end() && smooth != steps.end() && norm < smooth;
}

namespace {

void check_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NonFiniteInput("series contains NaN or Inf");
        }
    }
}

}  // namespace

AxisSeries::AxisSeries(double rate_hz, std::vector<double> vals, AxisId axis)
    : sample_rate_hz(rate_hz), values(std::move(vals)), axis_id(axis) {
    if (sample_rate_hz <= 0.0) throw Error("sample_rate_hz must be > 0");
    if (values.empty()) throw Error("AxisSeries must be non-empty");
    check_finite(values);
}

TriaxialSeries::TriaxialSeries(double rate_hz, std::vector<double> xs, std::vector<double> ys,
                               std::vector<double> zs, RecordingOrigin org)
    : sample_rate_hz(rate_hz), x(std::move(xs)), y(std::move(ys)), z(std::move(zs)),
      origin(std::move(org)) {
    if (sample_rate_hz <= 0.0) throw Error("sample_rate_hz must be > 0");
    if (x.empty() || x.size() != y.size() || x.size() != z.size()) {
        throw Error("TriaxialSeries axes must be non-empty and equal length");
    }
    check_finite(x);
    check_finite(y);
    check_finite(z);
}

AxisSeries TriaxialSeries::axis(AxisId id) const {
    const std::vector<double>* src = &x;
    if (id == AxisId::Y) src = &y;
    if (id == AxisId::Z) src = &z;
    AxisSeries out(sample_rate_hz, *src, id);
    out.provenance = provenance;
    return out;
}

SeriesStats series_stats(const std::vector<double>& values) {
    SeriesStats st;
    const std::size_t n = values.size();
    if (n == 0) return st;
    st.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    if (n < 2) return st;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - st.mean;
        ss += d * d;
    }
    st.sd = std::sqrt(ss / static_cast<double>(n - 1));
    return st;
}

AxisSeries zscore_normalize(const AxisSeries& series) {
    if (series.size() < 2) throw Error("zscore_normalize needs at least 2 samples");
    const SeriesStats st = series_stats(series.values);
    if (st.sd == 0.0) {
        throw DegenerateSeries("zscore_normalize: constant series (sd == 0)");
    }
    AxisSeries out = series;
    for (double& v : out.values) v = (v - st.mean) / st.sd;
    out.provenance.steps.push_back(PreprocStep::ZscoreNormalized);
    return out;
}

AxisSeries smooth_moving_average(const AxisSeries& series, std::size_t window_len) {
    if (window_len < 1) throw Error("smooth_moving_average: window_len must be >= 1");
    const std::size_t n = series.size();
    if (n < window_len) {
        throw WindowTooLarge("smooth_moving_average: series shorter than window");
    }
    // Nominal window [i - half_left, i + half_right]; for even lengths the
    // extra sample sits on the right. Edges shrink to the available range.
    const std::size_t half_left = (window_len - 1) / 2;
    const std::size_t half_right = window_len / 2;

    AxisSeries out = series;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half_left ? i - half_left : 0;
        const std::size_t hi = std::min(n - 1, i + half_right);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += series.values[j];
        out.values[i] = sum / static_cast<double>(hi - lo + 1);
    }
    out.provenance.steps.push_back(PreprocStep::MovingAverageSmoothed);
    return out;
}

}  // namespace gaitprint
