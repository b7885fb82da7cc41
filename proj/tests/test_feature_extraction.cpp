#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gaitprint/feature_extraction.hpp"
#include "gaitprint/synth_oracle.hpp"

using namespace gaitprint;

namespace {

PqrstComplex make_complex(const std::array<std::size_t, 5>& idx,
                          const std::array<double, 5>& amp, double fs = 100.0,
                          AxisId axis = AxisId::Z) {
    PqrstComplex c;
    c.axis_id = axis;
    c.p = make_extremum(idx[0], amp[0], ExtremumKind::Valley, fs);
    c.q = make_extremum(idx[1], amp[1], ExtremumKind::Peak, fs);
    c.r = make_extremum(idx[2], amp[2], ExtremumKind::Valley, fs);
    c.s = make_extremum(idx[3], amp[3], ExtremumKind::Peak, fs);
    c.t = make_extremum(idx[4], amp[4], ExtremumKind::Valley, fs);
    return c;
}

PqrstComplex random_complex(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> start(0, 5000);
    std::uniform_int_distribution<std::size_t> gap(1, 40);
    std::array<std::size_t, 5> idx;
    idx[0] = start(rng);
    for (int k = 1; k < 5; ++k) idx[k] = idx[k - 1] + gap(rng);
    std::uniform_real_distribution<double> valley(-3.0, -0.2);
    std::uniform_real_distribution<double> peak(0.2, 3.0);
    const std::array<double, 5> amp = {valley(rng), peak(rng), valley(rng), peak(rng),
                                       valley(rng)};
    return make_complex(idx, amp);
}

}  // namespace

TEST_CASE("uniformly spaced complex yields 100 ms intervals") {
    const PqrstComplex c = make_complex({0, 10, 20, 30, 40}, {-1, 1, -0.5, 1, -1});
    const FeatureVector fv = extract_features(c, 100.0);
    CHECK(fv.pq_inter == 100.0);
    CHECK(fv.qr_inter == 100.0);
    CHECK(fv.rs_inter == 100.0);
    CHECK(fv.st_inter == 100.0);
}

TEST_CASE("amplitudes are copied verbatim") {
    const std::array<double, 5> amp = {-1.2, 0.8, -0.5, 0.9, -1.0};
    const FeatureVector fv = extract_features(make_complex({3, 9, 17, 26, 31}, amp), 100.0);
    CHECK(fv.p_amp == amp[0]);
    CHECK(fv.q_amp == amp[1]);
    CHECK(fv.r_amp == amp[2]);
    CHECK(fv.s_amp == amp[3]);
    CHECK(fv.t_amp == amp[4]);
}

TEST_CASE("interval sum equals the T-P span, recomputed independently") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
        const PqrstComplex c = random_complex(rng);
        REQUIRE(c.valid());
        const FeatureVector fv = extract_features(c, 100.0);
        // index-level identity, exact
        const std::size_t span = (c.q.index - c.p.index) + (c.r.index - c.q.index) +
                                 (c.s.index - c.r.index) + (c.t.index - c.s.index);
        CHECK(span == c.t.index - c.p.index);
        // float identity at 100 Hz (10 ms per sample is exact in binary)
        CHECK(fv.pq_inter + fv.qr_inter + fv.rs_inter + fv.st_inter ==
              static_cast<double>(c.t.index - c.p.index) * 10.0);
        CHECK(fv.pq_inter > 0.0);
        CHECK(fv.qr_inter > 0.0);
        CHECK(fv.rs_inter > 0.0);
        CHECK(fv.st_inter > 0.0);
    }
}

TEST_CASE("feature sets have sizes 5, 4 and 9 with stable order") {
    std::mt19937_64 rng(5);
    const FeatureVector fv = extract_features(random_complex(rng), 100.0);
    const auto s1 = select_features(fv, FeatureSetId::Set1Amplitude);
    const auto s2 = select_features(fv, FeatureSetId::Set2Interval);
    const auto s3 = select_features(fv, FeatureSetId::Set3All);
    REQUIRE(s1.size() == 5);
    REQUIRE(s2.size() == 4);
    REQUIRE(s3.size() == 9);
    CHECK(s1 == std::vector<double>{fv.p_amp, fv.q_amp, fv.r_amp, fv.s_amp, fv.t_amp});
    CHECK(s2 == std::vector<double>{fv.pq_inter, fv.qr_inter, fv.rs_inter, fv.st_inter});
    std::vector<double> concat = s1;
    concat.insert(concat.end(), s2.begin(), s2.end());
    CHECK(s3 == concat);
}

TEST_CASE("intervals ignore amplitude scaling; amplitudes scale linearly") {
    GaitParams params;
    params.seed = 77;
    params.noise_sigma = 0.02;
    const SyntheticRecording rec = generate_recording(params, 10.0, 100.0);
    DetectorConfig cfg;
    cfg.prominence_gate = false;
    const DetectionResult base = detect_complexes(rec.series, cfg);

    TriaxialSeries scaled = rec.series;
    const double factor = 3.7;
    for (auto* axis : {&scaled.x, &scaled.y, &scaled.z}) {
        for (double& v : *axis) v *= factor;
    }
    const DetectionResult after = detect_complexes(scaled, cfg);

    const auto& c0 = base.axis(AxisId::Z);
    const auto& c1 = after.axis(AxisId::Z);
    REQUIRE(c0.size() == c1.size());
    REQUIRE(!c0.empty());
    for (std::size_t i = 0; i < c0.size(); ++i) {
        const FeatureVector f0 = extract_features(c0[i], 100.0);
        const FeatureVector f1 = extract_features(c1[i], 100.0);
        CHECK(f0.pq_inter == f1.pq_inter);
        CHECK(f0.qr_inter == f1.qr_inter);
        CHECK(f0.rs_inter == f1.rs_inter);
        CHECK(f0.st_inter == f1.st_inter);
        CHECK(f1.p_amp == doctest::Approx(factor * f0.p_amp).epsilon(1e-12));
        CHECK(f1.q_amp == doctest::Approx(factor * f0.q_amp).epsilon(1e-12));
        CHECK(f1.t_amp == doctest::Approx(factor * f0.t_amp).epsilon(1e-12));
    }
}

TEST_CASE("histogram of a single vector occupies one bin per feature") {
    std::mt19937_64 rng(1);
    const std::vector<FeatureVector> vecs = {extract_features(random_complex(rng), 100.0)};
    for (const FeatureHistogram& h : feature_histograms(vecs, 8)) {
        REQUIRE(h.counts.size() == 8);
        REQUIRE(h.edges.size() == 9);
        std::size_t occupied = 0, total = 0;
        for (std::size_t c : h.counts) {
            if (c > 0) ++occupied;
            total += c;
        }
        CHECK(occupied == 1);
        CHECK(total == 1);
    }
}

TEST_CASE("histograms match a direct binning oracle and detect bimodality") {
    std::mt19937_64 rng(2024);
    std::vector<FeatureVector> vecs;
    std::normal_distribution<double> mode_a(-2.0, 0.05), mode_b(2.0, 0.05);
    for (int i = 0; i < 400; ++i) {
        FeatureVector fv = extract_features(random_complex(rng), 100.0);
        fv.p_amp = i % 2 == 0 ? mode_a(rng) : mode_b(rng);
        vecs.push_back(fv);
    }
    const std::size_t bins = 10;
    const auto hists = feature_histograms(vecs, bins);
    const FeatureHistogram& p_hist = hists[0];
    REQUIRE(p_hist.feature == "p_amp");

    // direct binning oracle
    double lo = vecs[0].p_amp, hi = vecs[0].p_amp;
    for (const auto& fv : vecs) {
        lo = std::min(lo, fv.p_amp);
        hi = std::max(hi, fv.p_amp);
    }
    std::vector<std::size_t> expected(bins, 0);
    for (const auto& fv : vecs) {
        auto b = static_cast<std::size_t>((fv.p_amp - lo) / (hi - lo) * bins);
        if (b >= bins) b = bins - 1;
        ++expected[b];
    }
    CHECK(p_hist.counts == expected);
    // both end bins loaded, middle empty: bimodal
    CHECK(p_hist.counts.front() > 150);
    CHECK(p_hist.counts.back() > 150);
    CHECK(p_hist.counts[bins / 2] == 0);
}

TEST_CASE("uniform intervals give near-flat histograms") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<FeatureVector> vecs;
    const std::size_t n = 4000;
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector fv = extract_features(random_complex(rng), 100.0);
        fv.pq_inter = u(rng);  // exercise the binning, not the extractor
        vecs.push_back(fv);
    }
    const std::size_t bins = 10;
    const auto hists = feature_histograms(vecs, bins);
    const FeatureHistogram& h = hists[5];
    REQUIRE(h.feature == "pq_inter");
    const double mean = static_cast<double>(n) / static_cast<double>(bins);
    const double sd = std::sqrt(mean * (1.0 - 1.0 / static_cast<double>(bins)));
    for (std::size_t c : h.counts) {
        CHECK(std::abs(static_cast<double>(c) - mean) <= 6.0 * sd);
    }
}

TEST_CASE("histograms reject empty input") {
    CHECK_THROWS_AS(feature_histograms({}, 10), EmptyInput);
}

TEST_CASE("csv row carries provenance and the documented header") {
    CHECK(std::string(kFeatureCsvHeader) ==
          "subject,session,task,axis,p_amp,q_amp,r_amp,s_amp,t_amp,"
          "pq_inter,qr_inter,rs_inter,st_inter");
    const PqrstComplex c = make_complex({0, 10, 20, 30, 40}, {-1, 1, -0.5, 1, -1});
    const FeatureVector fv = extract_features(c, 100.0, {"007", 2, 3, 4});
    const std::string row = feature_csv_row(fv);
    CHECK(row.rfind("007,2,3,z,", 0) == 0);
}
