#include "gaitprint/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace gaitprint {

const char* classifier_name(ClassifierKind kind) {
    return kind == ClassifierKind::Lda ? "lda" : "svm";
}

ClassifierKind classifier_from_name(const std::string& name) {
    if (name == "lda" || name == "LDA") return ClassifierKind::Lda;
    if (name == "svm" || name == "SVM") return ClassifierKind::Svm;
    throw Error("unknown classifier: " + name + " (expected lda or svm)");
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t global, const PairExperiment& exp, const char* role) {
    const std::string tag = exp.genuine_subject + "|" + exp.impostor_subject + "|" +
                            axis_name(exp.axis_id) + "|" + feature_set_name(exp.feature_set) +
                            "|" + classifier_name(exp.classifier_kind) + "|" + role;
    return splitmix64(global ^ fnv1a(tag));
}

// Session-filtered feature rows for one subject on one axis.
std::vector<const FeatureVector*> collect_features(const FeatureCorpus& corpus,
                                                   const std::string& subject, int session,
                                                   AxisId axis) {
    const auto subj_it = corpus.find(subject);
    if (subj_it == corpus.end()) throw MissingSession("unknown subject: " + subject);
    const auto sess_it = subj_it->second.find(session);
    if (sess_it == subj_it->second.end()) {
        throw MissingSession(subject + ": missing session " + std::to_string(session));
    }
    std::vector<const FeatureVector*> out;
    for (const FeatureVector& fv : sess_it->second) {
        if (fv.axis_id != axis) continue;
        if (fv.provenance.session != session) {
            throw Error("feature corpus corrupt: provenance session mismatch for " + subject);
        }
        out.push_back(&fv);
    }
    return out;
}

LabeledSet assemble(const std::vector<const FeatureVector*>& genuine,
                    const std::vector<const FeatureVector*>& impostor, FeatureSetId set_id) {
    const std::size_t d = feature_set_size(set_id);
    LabeledSet set;
    set.samples.resize(static_cast<Eigen::Index>(genuine.size() + impostor.size()),
                       static_cast<Eigen::Index>(d));
    Eigen::Index row = 0;
    auto fill = [&](const std::vector<const FeatureVector*>& src, int label) {
        for (const FeatureVector* fv : src) {
            const std::vector<double> vals = select_features(*fv, set_id);
            for (std::size_t c = 0; c < d; ++c) {
                set.samples(row, static_cast<Eigen::Index>(c)) = vals[c];
            }
            set.labels.push_back(label);
            ++row;
        }
    };
    fill(genuine, 0);
    fill(impostor, 1);
    return set;
}

PairExperiment make_pair_experiment(const FeatureCorpus& corpus, const std::string& genuine,
                                    const std::string& impostor, AxisId axis,
                                    FeatureSetId set_id, ClassifierKind kind,
                                    const ProtocolConfig& cfg) {
    PairExperiment exp;
    exp.genuine_subject = genuine;
    exp.impostor_subject = impostor;
    exp.axis_id = axis;
    exp.feature_set = set_id;
    exp.classifier_kind = kind;

    const auto g_train = collect_features(corpus, genuine, 1, axis);
    const auto i_train = collect_features(corpus, impostor, 1, axis);
    const auto g_test = collect_features(corpus, genuine, 2, axis);
    const auto i_test = collect_features(corpus, impostor, 2, axis);
    if (g_train.size() < 2 || i_train.size() < 2) {
        throw Error("insufficient Session-1 features on axis " +
                    std::string(axis_name(axis)));
    }
    if (g_test.empty() || i_test.empty()) {
        throw Error("empty Session-2 test class on axis " + std::string(axis_name(axis)));
    }

    exp.train = assemble(g_train, i_train, set_id);
    if (cfg.balance_train) {
        exp.train = balance_by_subsampling(exp.train, derive_seed(cfg.seed, exp, "train"));
    }
    exp.test_unbalanced = assemble(g_test, i_test, set_id);
    exp.test = cfg.balance_test
                   ? balance_by_subsampling(exp.test_unbalanced,
                                            derive_seed(cfg.seed, exp, "test"))
                   : exp.test_unbalanced;
    return exp;
}

struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> predictions;
};

template <typename ScoreFn>
ScoredSet score_set(const LabeledSet& set, ScoreFn&& fn) {
    ScoredSet out;
    out.scores.reserve(set.size());
    out.predictions.reserve(set.size());
    for (Eigen::Index i = 0; i < set.samples.rows(); ++i) {
        const double s = fn(Eigen::VectorXd(set.samples.row(i).transpose()));
        out.scores.push_back(s);
        out.predictions.push_back(predict(s));
    }
    return out;
}

PairResult run_pair(const PairExperiment& exp, const ProtocolConfig& cfg,
                    std::vector<double>* pooled_scores = nullptr,
                    std::vector<int>* pooled_labels = nullptr) {
    PairResult res;
    res.genuine_subject = exp.genuine_subject;
    res.impostor_subject = exp.impostor_subject;
    res.axis_id = exp.axis_id;
    res.feature_set = exp.feature_set;
    res.classifier_kind = exp.classifier_kind;
    res.n_train = exp.train.size();
    res.n_test = exp.test.size();

    ScoredSet balanced, unbalanced;
    if (exp.classifier_kind == ClassifierKind::Lda) {
        const LdaModel model = lda_train(exp.train, cfg.lda_regularization);
        auto fn = [&](const Eigen::VectorXd& x) { return lda_score(model, x); };
        balanced = score_set(exp.test, fn);
        unbalanced = score_set(exp.test_unbalanced, fn);
    } else {
        SvmConfig svm_cfg;
        svm_cfg.c_param = cfg.svm_c_param;
        svm_cfg.epochs = cfg.svm_epochs;
        svm_cfg.seed = derive_seed(cfg.seed, exp, "svm");
        const SvmModel model = svm_train(exp.train, svm_cfg);
        auto fn = [&](const Eigen::VectorXd& x) { return svm_score(model, x); };
        balanced = score_set(exp.test, fn);
        unbalanced = score_set(exp.test_unbalanced, fn);
    }

    res.ccr = compute_ccr(balanced.predictions, exp.test.labels);
    res.ccr_unbalanced = compute_ccr(unbalanced.predictions, exp.test_unbalanced.labels);
    const EerResult eer = compute_eer(balanced.scores, exp.test.labels);
    res.eer = eer.eer_pct;
    res.threshold = eer.threshold;
    if (pooled_scores) {
        pooled_scores->insert(pooled_scores->end(), balanced.scores.begin(),
                              balanced.scores.end());
        pooled_labels->insert(pooled_labels->end(), exp.test.labels.begin(),
                              exp.test.labels.end());
    }
    return res;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& values) {
    MeanSd out;
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

}  // namespace

FeatureCorpus build_feature_corpus(const PreprocessedCorpus& corpus,
                                   const DetectorConfig& detector_cfg) {
    FeatureCorpus out;
    for (const auto& [key, rec] : corpus.recordings) {
        DetectionResult det;
        try {
            det = detect_complexes(rec, detector_cfg);
        } catch (const SeriesTooShort&) {
            continue;  // too short to hold one cycle; nothing to extract
        }
        std::vector<FeatureVector>& bucket = out[key.subject][key.session];
        const std::array<AxisId, 3> ids = {AxisId::X, AxisId::Y, AxisId::Z};
        for (AxisId id : ids) {
            const auto& complexes = det.axis(id);
            for (std::size_t c = 0; c < complexes.size(); ++c) {
                FeatureProvenance prov{key.subject, key.session, key.task, c};
                bucket.push_back(
                    extract_features(complexes[c], rec.sample_rate_hz, std::move(prov)));
            }
        }
    }
    return out;
}

std::vector<PairExperiment> build_pair_experiments(const FeatureCorpus& features_by_subject,
                                                   AxisId axis, FeatureSetId set_id,
                                                   ClassifierKind kind,
                                                   const ProtocolConfig& cfg) {
    std::vector<std::string> subjects;
    for (const auto& [subject, sessions] : features_by_subject) {
        const bool s1 = sessions.count(1) != 0 && !sessions.at(1).empty();
        const bool s2 = sessions.count(2) != 0 && !sessions.at(2).empty();
        if (s1 && s2) subjects.push_back(subject);
    }
    if (subjects.size() < 2) {
        throw Error("build_pair_experiments: need >= 2 subjects with both sessions");
    }
    std::vector<PairExperiment> out;
    out.reserve(subjects.size() * (subjects.size() - 1));
    for (const std::string& g : subjects) {
        for (const std::string& i : subjects) {
            if (g == i) continue;
            out.push_back(make_pair_experiment(features_by_subject, g, i, axis, set_id, kind, cfg));
        }
    }
    return out;
}

double compute_ccr(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw Error("compute_ccr: predictions/labels length mismatch");
    }
    if (labels.empty()) throw EmptyInput("compute_ccr: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predictions[i] == labels[i]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(labels.size());
}

EerResult compute_eer(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw Error("compute_eer: scores/labels length mismatch");
    }
    if (labels.empty()) throw EmptyInput("compute_eer: empty input");
    std::vector<double> genuine, impostor;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 0 ? genuine : impostor).push_back(scores[i]);
    }
    if (genuine.empty() || impostor.empty()) {
        throw SingleClass("compute_eer: both classes required");
    }
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());

    std::vector<double> thresholds = scores;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double n_gen = static_cast<double>(genuine.size());
    const double n_imp = static_cast<double>(impostor.size());
    auto far_at = [&](double t) {  // impostors accepted: score <= t
        return static_cast<double>(std::upper_bound(impostor.begin(), impostor.end(), t) -
                                   impostor.begin()) /
               n_imp;
    };
    auto frr_at = [&](double t) {  // genuine rejected: score > t
        return static_cast<double>(genuine.end() -
                                   std::upper_bound(genuine.begin(), genuine.end(), t)) /
               n_gen;
    };

    // Virtual starting point below every score: FAR 0, FRR 1.
    double prev_t = thresholds.front() - 1.0;
    double prev_far = 0.0;
    double prev_frr = 1.0;
    for (double t : thresholds) {
        const double far = far_at(t);
        const double frr = frr_at(t);
        if (far >= frr) {
            const double prev_diff = prev_far - prev_frr;  // < 0 here
            const double diff = far - frr;
            const double alpha = diff == prev_diff ? 0.0 : (0.0 - prev_diff) / (diff - prev_diff);
            EerResult out;
            out.eer_pct = 100.0 * (prev_far + alpha * (far - prev_far));
            out.threshold = prev_t + alpha * (t - prev_t);
            return out;
        }
        prev_t = t;
        prev_far = far;
        prev_frr = frr;
    }
    // Unreachable: at the top threshold FAR = 1 and FRR = 0.
    return {100.0 * prev_far, prev_t};
}

EvalTable run_protocol(const FeatureCorpus& features_by_subject, const ProtocolConfig& cfg) {
    EvalTable table;
    std::vector<std::string> subjects;
    for (const auto& [subject, sessions] : features_by_subject) {
        const bool s1 = sessions.count(1) != 0 && !sessions.at(1).empty();
        const bool s2 = sessions.count(2) != 0 && !sessions.at(2).empty();
        if (s1 && s2) {
            subjects.push_back(subject);
        } else {
            table.excluded_subjects.push_back(subject + ": missing session " +
                                              (s1 ? "2" : "1"));
        }
    }
    if (subjects.size() < 2) {
        throw Error("run_protocol: need >= 2 subjects with both sessions");
    }

    for (AxisId axis : cfg.axes) {
        for (FeatureSetId set_id : cfg.sets) {
            for (ClassifierKind kind : cfg.classifiers) {
                std::vector<double> ccrs, eers;
                std::vector<double> pooled_scores;
                std::vector<int> pooled_labels;
                for (const std::string& g : subjects) {
                    for (const std::string& i : subjects) {
                        if (g == i) continue;
                        try {
                            const PairExperiment exp = make_pair_experiment(
                                features_by_subject, g, i, axis, set_id, kind, cfg);
                            PairResult res =
                                run_pair(exp, cfg, cfg.pooled_eer ? &pooled_scores : nullptr,
                                         cfg.pooled_eer ? &pooled_labels : nullptr);
                            ccrs.push_back(res.ccr);
                            eers.push_back(res.eer);
                            table.detail.push_back(std::move(res));
                        } catch (const Error& e) {
                            table.skipped.push_back({g, i, axis, set_id, kind, e.what()});
                        }
                    }
                }
                EvalRow row;
                row.axis_id = axis;
                row.feature_set = set_id;
                row.classifier_kind = kind;
                const MeanSd ccr_stats = mean_sd(ccrs);
                const MeanSd eer_stats = mean_sd(eers);
                row.mean_ccr = ccr_stats.mean;
                row.sd_ccr = ccr_stats.sd;
                row.mean_eer = eer_stats.mean;
                row.sd_eer = eer_stats.sd;
                row.n_pairs = ccrs.size();
                if (cfg.pooled_eer && !pooled_scores.empty()) {
                    row.pooled_eer = compute_eer(pooled_scores, pooled_labels).eer_pct;
                }
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string eval_table_csv(const EvalTable& table) {
    std::string out = "axis,set,classifier,mean_ccr,mean_eer,sd_ccr,sd_eer,n_pairs,pooled_eer\n";
    for (const EvalRow& r : table.rows) {
        out += axis_name(r.axis_id);
        out += ',';
        out += feature_set_name(r.feature_set);
        out += ',';
        out += classifier_name(r.classifier_kind);
        out += ',' + fmt_double(r.mean_ccr) + ',' + fmt_double(r.mean_eer) + ',' +
               fmt_double(r.sd_ccr) + ',' + fmt_double(r.sd_eer) + ',' +
               std::to_string(r.n_pairs) + ',';
        if (r.pooled_eer) out += fmt_double(*r.pooled_eer);
        out += '\n';
    }
    return out;
}

std::string pair_detail_csv(const EvalTable& table) {
    std::string out =
        "genuine,impostor,axis,set,classifier,ccr,eer,threshold,n_train,n_test,ccr_unbalanced\n";
    for (const PairResult& r : table.detail) {
        out += r.genuine_subject + ',' + r.impostor_subject + ',';
        out += axis_name(r.axis_id);
        out += ',';
        out += feature_set_name(r.feature_set);
        out += ',';
        out += classifier_name(r.classifier_kind);
        out += ',' + fmt_double(r.ccr) + ',' + fmt_double(r.eer) + ',' + fmt_double(r.threshold) +
               ',' + std::to_string(r.n_train) + ',' + std::to_string(r.n_test) + ',' +
               fmt_double(r.ccr_unbalanced) + '\n';
    }
    return out;
}

std::string eval_table_json(const EvalTable& table) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const EvalRow& r : table.rows) {
        nlohmann::json row = {{"axis", axis_name(r.axis_id)},
                              {"set", feature_set_name(r.feature_set)},
                              {"classifier", classifier_name(r.classifier_kind)},
                              {"mean_ccr", r.mean_ccr},
                              {"mean_eer", r.mean_eer},
                              {"sd_ccr", r.sd_ccr},
                              {"sd_eer", r.sd_eer},
                              {"n_pairs", r.n_pairs}};
        if (r.pooled_eer) row["pooled_eer"] = *r.pooled_eer;
        j["rows"].push_back(row);
    }
    j["excluded_subjects"] = table.excluded_subjects;
    j["skipped"] = nlohmann::json::array();
    for (const SkippedPair& s : table.skipped) {
        j["skipped"].push_back({{"genuine", s.genuine_subject},
                                {"impostor", s.impostor_subject},
                                {"axis", axis_name(s.axis_id)},
                                {"set", feature_set_name(s.feature_set)},
                                {"classifier", classifier_name(s.classifier_kind)},
                                {"reason", s.reason}});
    }
    return j.dump(2);
}

}  // namespace gaitprint
