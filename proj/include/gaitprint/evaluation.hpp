#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaitprint/classifiers.hpp"
#include "gaitprint/dataset_ingest.hpp"
#include "gaitprint/feature_extraction.hpp"

namespace gaitprint {

enum class ClassifierKind { Lda, Svm };

const char* classifier_name(ClassifierKind kind);  // "lda" / "svm"
ClassifierKind classifier_from_name(const std::string& name);

// Feature vectors grouped by subject and session (1 or 2); axes mixed,
// each vector carries its axis_id.
using SessionFeatures = std::map<int, std::vector<FeatureVector>>;
using FeatureCorpus = std::map<std::string, SessionFeatures>;

// One ordered (genuine, impostor) verification experiment: train on
// Session 1, test on Session 2.
struct PairExperiment {
    std::string genuine_subject;
    std::string impostor_subject;
    AxisId axis_id = AxisId::X;
    FeatureSetId feature_set = FeatureSetId::Set3All;
    ClassifierKind classifier_kind = ClassifierKind::Lda;
    LabeledSet train;            // balanced (when enabled), Session 1 only
    LabeledSet test;             // balanced (when enabled), Session 2 only
    LabeledSet test_unbalanced;  // full Session 2 test set
};

struct PairResult {
    std::string genuine_subject;
    std::string impostor_subject;
    AxisId axis_id;
    FeatureSetId feature_set;
    ClassifierKind classifier_kind;
    double ccr = 0.0;             // balanced test, threshold 0, percent
    double ccr_unbalanced = 0.0;  // full test set, percent
    double eer = 0.0;             // percent
    double threshold = 0.0;       // score threshold at the EER crossing
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

struct EvalRow {
    AxisId axis_id;
    FeatureSetId feature_set;
    ClassifierKind classifier_kind;
    double mean_ccr = 0.0;
    double mean_eer = 0.0;
    double sd_ccr = 0.0;  // dispersion across pairs
    double sd_eer = 0.0;
    std::size_t n_pairs = 0;
    std::optional<double> pooled_eer;  // present in pooled-EER mode
};

struct SkippedPair {
    std::string genuine_subject;
    std::string impostor_subject;
    AxisId axis_id;
    FeatureSetId feature_set;
    ClassifierKind classifier_kind;
    std::string reason;
};

struct EvalTable {
    std::vector<EvalRow> rows;
    std::vector<PairResult> detail;
    std::vector<std::string> excluded_subjects;  // "subject: reason"
    std::vector<SkippedPair> skipped;
};

struct ProtocolConfig {
    std::vector<AxisId> axes = {AxisId::X, AxisId::Y, AxisId::Z};
    std::vector<FeatureSetId> sets = {FeatureSetId::Set1Amplitude, FeatureSetId::Set2Interval,
                                      FeatureSetId::Set3All};
    std::vector<ClassifierKind> classifiers = {ClassifierKind::Lda, ClassifierKind::Svm};
    std::uint64_t seed = 0;
    bool balance_train = true;
    bool balance_test = true;
    bool pooled_eer = false;  // additionally pool scores across pairs
    std::optional<double> lda_regularization;
    double svm_c_param = 1.0;
    std::size_t svm_epochs = 200;
};

// Runs the detector over every preprocessed recording and groups the
// extracted feature vectors by subject and session.
FeatureCorpus build_feature_corpus(const PreprocessedCorpus& corpus,
                                   const DetectorConfig& detector_cfg);

// One experiment per ordered (genuine, impostor) pair for the given
// axis/set/classifier combination. Subjects lacking a session are
// excluded with a diagnostic; throws MissingSession only when asked to
// pair a specific missing subject.
std::vector<PairExperiment> build_pair_experiments(const FeatureCorpus& features_by_subject,
                                                   AxisId axis, FeatureSetId set_id,
                                                   ClassifierKind kind,
                                                   const ProtocolConfig& cfg);

// 100 * correct / total. Throws EmptyInput.
double compute_ccr(const std::vector<int>& predictions, const std::vector<int>& labels);

struct EerResult {
    double eer_pct = 0.0;
    double threshold = 0.0;
};

// Threshold sweep over sorted unique scores with linear interpolation at
// the FAR = FRR crossing. Accepting means score <= threshold (label 0).
// Throws SingleClass when labels contain only one class.
EerResult compute_eer(const std::vector<double>& scores, const std::vector<int>& labels);

// Full pairwise protocol: for each axis x feature set x classifier,
// trains every ordered subject pair on Session 1, evaluates on Session 2
// and aggregates mean/sd CCR and EER across pairs.
EvalTable run_protocol(const FeatureCorpus& features_by_subject, const ProtocolConfig& cfg);

std::string eval_table_csv(const EvalTable& table);
std::string pair_detail_csv(const EvalTable& table);
std::string eval_table_json(const EvalTable& table);

}  // namespace gaitprint
