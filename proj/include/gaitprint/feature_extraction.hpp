#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaitprint/pqrst_detector.hpp"
#include "gaitprint/signal_model.hpp"

namespace gaitprint {

// Where a feature vector came from.
struct FeatureProvenance {
    std::string subject;
    int session = 0;
    int task = 0;
    std::size_t complex_index = 0;
};

// The nine PQRST features of one complex: five amplitudes plus four
// inter-point intervals in milliseconds.
struct FeatureVector {
    double p_amp = 0, q_amp = 0, r_amp = 0, s_amp = 0, t_amp = 0;
    double pq_inter = 0, qr_inter = 0, rs_inter = 0, st_inter = 0;
    AxisId axis_id = AxisId::X;
    FeatureProvenance provenance;
};

enum class FeatureSetId { Set1Amplitude, Set2Interval, Set3All };

std::size_t feature_set_size(FeatureSetId id);
const char* feature_set_name(FeatureSetId id);      // "1", "2", "3"
FeatureSetId feature_set_from_name(const std::string& name);

// Fixed feature order: p_amp..t_amp then pq_inter..st_inter.
extern const std::vector<std::string> kFeatureNames;

FeatureVector extract_features(const PqrstComplex& c, double sample_rate_hz,
                               FeatureProvenance provenance = {});

// Projects onto the chosen feature set, preserving the fixed order.
std::vector<double> select_features(const FeatureVector& fv, FeatureSetId set_id);

struct FeatureHistogram {
    std::string feature;
    std::vector<double> edges;       // bins + 1 entries
    std::vector<std::size_t> counts;  // bins entries
};

// Equal-width histograms per feature over [min, max] of the population.
// Throws EmptyInput when no vectors are given.
std::vector<FeatureHistogram> feature_histograms(const std::vector<FeatureVector>& vectors,
                                                 std::size_t bins);

// CSV header used when serializing feature vectors.
extern const char* kFeatureCsvHeader;
std::string feature_csv_row(const FeatureVector& fv);

}  // namespace gaitprint
