#include "gaitprint/feature_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gaitprint {

const std::vector<std::string> kFeatureNames = {
    "p_amp", "q_amp", "r_amp", "s_amp", "t_amp",
    "pq_inter", "qr_inter", "rs_inter", "st_inter"};

const char* kFeatureCsvHeader =
    "subject,session,task,axis,p_amp,q_amp,r_amp,s_amp,t_amp,"
    "pq_inter,qr_inter,rs_inter,st_inter";

std::size_t feature_set_size(FeatureSetId id) {
    switch (id) {
        case FeatureSetId::Set1Amplitude: return 5;
        case FeatureSetId::Set2Interval: return 4;
        case FeatureSetId::Set3All: return 9;
    }
    return 0;
}

const char* feature_set_name(FeatureSetId id) {
    switch (id) {
        case FeatureSetId::Set1Amplitude: return "1";
        case FeatureSetId::Set2Interval: return "2";
        case FeatureSetId::Set3All: return "3";
    }
    return "?";
}

FeatureSetId feature_set_from_name(const std::string& name) {
    if (name == "1") return FeatureSetId::Set1Amplitude;
    if (name == "2") return FeatureSetId::Set2Interval;
    if (name == "3") return FeatureSetId::Set3All;
    throw Error("unknown feature set: " + name + " (expected 1, 2 or 3)");
}

FeatureVector extract_features(const PqrstComplex& c, double sample_rate_hz,
                               FeatureProvenance provenance) {
    FeatureVector fv;
    fv.p_amp = c.p.amplitude;
    fv.q_amp = c.q.amplitude;
    fv.r_amp = c.r.amplitude;
    fv.s_amp = c.s.amplitude;
    fv.t_amp = c.t.amplitude;
    const double ms_per_sample = 1000.0 / sample_rate_hz;
    fv.pq_inter = static_cast<double>(c.q.index - c.p.index) * ms_per_sample;
    fv.qr_inter = static_cast<double>(c.r.index - c.q.index) * ms_per_sample;
    fv.rs_inter = static_cast<double>(c.s.index - c.r.index) * ms_per_sample;
    fv.st_inter = static_cast<double>(c.t.index - c.s.index) * ms_per_sample;
    fv.axis_id = c.axis_id;
    fv.provenance = std::move(provenance);
    return fv;
}

std::vector<double> select_features(const FeatureVector& fv, FeatureSetId set_id) {
    std::vector<double> out;
    out.reserve(feature_set_size(set_id));
    if (set_id != FeatureSetId::Set2Interval) {
        out.insert(out.end(), {fv.p_amp, fv.q_amp, fv.r_amp, fv.s_amp, fv.t_amp});
    }
    if (set_id != FeatureSetId::Set1Amplitude) {
        out.insert(out.end(), {fv.pq_inter, fv.qr_inter, fv.rs_inter, fv.st_inter});
    }
    return out;
}

namespace {

double feature_value(const FeatureVector& fv, std::size_t k) {
    switch (k) {
        case 0: return fv.p_amp;
        case 1: return fv.q_amp;
        case 2: return fv.r_amp;
        case 3: return fv.s_amp;
        case 4: return fv.t_amp;
        case 5: return fv.pq_inter;
        case 6: return fv.qr_inter;
        case 7: return fv.rs_inter;
        default: return fv.st_inter;
    }
}

}  // namespace

std::vector<FeatureHistogram> feature_histograms(const std::vector<FeatureVector>& vectors,
                                                 std::size_t bins) {
    if (vectors.empty()) throw EmptyInput("feature_histograms: no feature vectors");
    if (bins < 1) throw Error("feature_histograms: bins must be >= 1");

    std::vector<FeatureHistogram> out;
    out.reserve(kFeatureNames.size());
    for (std::size_t k = 0; k < kFeatureNames.size(); ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const FeatureVector& fv : vectors) {
            const double v = feature_value(fv, k);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {  // degenerate range: one occupied bin around the value
            lo -= 0.5;
            hi += 0.5;
        }
        FeatureHistogram h;
        h.feature = kFeatureNames[k];
        h.edges.resize(bins + 1);
        h.counts.assign(bins, 0);
        for (std::size_t b = 0; b <= bins; ++b) {
            h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
        }
        for (const FeatureVector& fv : vectors) {
            const double v = feature_value(fv, k);
            std::size_t b = static_cast<std::size_t>(
                (v - lo) / (hi - lo) * static_cast<double>(bins));
            if (b >= bins) b = bins - 1;  // top edge closes the last bin
            ++h.counts[b];
        }
        out.push_back(std::move(h));
    }
    return out;
}

std::string feature_csv_row(const FeatureVector& fv) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g",
                  fv.provenance.subject.c_str(), fv.provenance.session, fv.provenance.task,
                  axis_name(fv.axis_id), fv.p_amp, fv.q_amp, fv.r_amp, fv.s_amp, fv.t_amp,
                  fv.pq_inter, fv.qr_inter, fv.rs_inter, fv.st_inter);
    return std::string(buf);
}

}  // namespace gaitprint
