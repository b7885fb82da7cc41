#include "gaitprint/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

namespace gaitprint {

Scaler Scaler::fit(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    Scaler sc;
    sc.mean = samples.colwise().mean();
    sc.scale = Eigen::VectorXd::Ones(samples.cols());
    if (n > 1) {
        for (Eigen::Index c = 0; c < samples.cols(); ++c) {
            const double ss = (samples.col(c).array() - sc.mean(c)).square().sum();
            const double sd = std::sqrt(ss / static_cast<double>(n - 1));
            sc.scale(c) = sd > 0.0 ? sd : 1.0;
        }
    }
    return sc;
}

Eigen::VectorXd Scaler::apply(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseQuotient(scale);
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& m) const {
    return (m.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

namespace {

struct ClassSplit {
    std::vector<Eigen::Index> genuine;   // label 0 rows
    std::vector<Eigen::Index> impostor;  // label 1 rows
};

ClassSplit split_classes(const LabeledSet& data) {
    if (data.samples.rows() != static_cast<Eigen::Index>(data.labels.size())) {
        throw Error("LabeledSet: row count does not match label count");
    }
    ClassSplit split;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        const int label = data.labels[i];
        if (label != 0 && label != 1) throw Error("LabeledSet: labels must be 0 or 1");
        (label == 0 ? split.genuine : split.impostor).push_back(static_cast<Eigen::Index>(i));
    }
    return split;
}

Eigen::VectorXd row_mean(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m.cols());
    for (Eigen::Index r : rows) acc += m.row(r).transpose();
    return acc / static_cast<double>(rows.size());
}

}  // namespace

LdaModel lda_train(const LabeledSet& data, std::optional<double> reg) {
    const ClassSplit split = split_classes(data);
    if (split.genuine.size() < 2 || split.impostor.size() < 2) {
        throw ClassMissing("lda_train: each class needs at least 2 samples");
    }
    const Eigen::Index d = data.samples.cols();
    const std::size_t n0 = split.genuine.size();
    const std::size_t n1 = split.impostor.size();

    LdaModel model;
    model.mean_genuine = row_mean(data.samples, split.genuine);
    model.mean_impostor = row_mean(data.samples, split.impostor);

    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r : split.genuine) {
        const Eigen::VectorXd dvec = data.samples.row(r).transpose() - model.mean_genuine;
        scatter += dvec * dvec.transpose();
    }
    for (Eigen::Index r : split.impostor) {
        const Eigen::VectorXd dvec = data.samples.row(r).transpose() - model.mean_impostor;
        scatter += dvec * dvec.transpose();
    }
    model.pooled_covariance = scatter / static_cast<double>(n0 + n1 - 2);

    model.regularization =
        reg.value_or(1e-6 * model.pooled_covariance.trace() / static_cast<double>(d));
    if (model.regularization < 0.0) throw Error("lda_train: regularization must be >= 0");
    model.underdetermined = static_cast<std::size_t>(d) > std::min(n0, n1);

    Eigen::MatrixXd regularized = model.pooled_covariance;
    regularized.diagonal().array() += model.regularization;
    const Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() != Eigen::Success) {
        throw SingularCovariance("lda_train: regularized pooled covariance not positive definite");
    }
    model.weight = llt.solve(model.mean_impostor - model.mean_genuine);
    // Boundary at the midpoint of the projected class means (equal priors).
    model.bias = -model.weight.dot(model.mean_genuine + model.mean_impostor) / 2.0;
    return model;
}

double lda_score(const LdaModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.weight.size()) {
        throw DimMismatch("lda_score: feature dimension mismatch");
    }
    return m.weight.dot(x) + m.bias;
}

double svm_objective(const Eigen::VectorXd& w, double bias, double lambda,
                     const Eigen::MatrixXd& samples, const std::vector<int>& labels) {
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - y * (samples.row(i).dot(w) + bias));
    }
    hinge /= static_cast<double>(samples.rows());
    return 0.5 * lambda * w.squaredNorm() + hinge;
}

SvmModel svm_train(const LabeledSet& data, const SvmConfig& cfg) {
    const ClassSplit split = split_classes(data);
    if (split.genuine.empty() || split.impostor.empty()) {
        throw ClassMissing("svm_train: both classes must be present");
    }
    if (cfg.c_param <= 0.0) throw Error("svm_train: c_param must be > 0");
    if (cfg.epochs < 1) throw Error("svm_train: epochs must be >= 1");

    const std::size_t n = data.size();
    const Eigen::Index d = data.samples.cols();
    const double lambda = 1.0 / (static_cast<double>(n) * cfg.c_param);

    SvmModel model;
    model.c_param = cfg.c_param;
    Eigen::MatrixXd x = data.samples;
    if (cfg.standardize) {
        model.scaler = Scaler::fit(data.samples);
        x = model.scaler->apply(data.samples);
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == 1 ? 1.0 : -1.0;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double bias = 0.0;
    // Suffix average over the last half of the updates.
    Eigen::VectorXd w_avg = Eigen::VectorXd::Zero(d);
    double bias_avg = 0.0;
    std::size_t avg_count = 0;
    const std::size_t total_steps = cfg.epochs * n;
    const std::size_t avg_from = total_steps / 2;

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t k = 0; k < n; ++k) {
            ++t;
            const std::size_t i = order[k];
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double margin = y[i] * (x.row(static_cast<Eigen::Index>(i)).dot(w) + bias);
            w *= (1.0 - eta * lambda);
            if (margin < 1.0) {
                w += eta * y[i] * x.row(static_cast<Eigen::Index>(i)).transpose();
                bias += eta * lambda * y[i];  // un-regularized, damped step
            }
            if (t > avg_from) {
                w_avg += w;
                bias_avg += bias;
                ++avg_count;
            }
        }
        if (!w.allFinite() || !std::isfinite(bias)) {
            throw NonFinite("svm_train: diverged (non-finite iterate)");
        }
    }
    if (avg_count > 0) {
        w = w_avg / static_cast<double>(avg_count);
        bias = bias_avg / static_cast<double>(avg_count);
    }

    model.weight = w;
    model.bias = bias;
    model.training_meta.epochs = cfg.epochs;
    model.training_meta.seed = cfg.seed;
    model.training_meta.final_objective = svm_objective(w, bias, lambda, x, data.labels);
    model.training_meta.final_hinge =
        model.training_meta.final_objective - 0.5 * lambda * w.squaredNorm();
    return model;
}

double svm_score(const SvmModel& m, const Eigen::VectorXd& x) {
    if (x.size() != m.weight.size()) {
        throw DimMismatch("svm_score: feature dimension mismatch");
    }
    const Eigen::VectorXd z = m.scaler ? m.scaler->apply(x) : x;
    return m.weight.dot(z) + m.bias;
}

LabeledSet balance_by_subsampling(const LabeledSet& data, std::uint64_t seed) {
    const ClassSplit split = split_classes(data);
    const std::vector<Eigen::Index>* larger = &split.impostor;
    const std::vector<Eigen::Index>* smaller = &split.genuine;
    if (larger->size() < smaller->size()) std::swap(larger, smaller);
    if (larger->size() == smaller->size()) return data;

    std::vector<Eigen::Index> chosen = *larger;
    std::mt19937_64 rng(seed);
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(smaller->size());

    std::vector<Eigen::Index> keep = *smaller;
    keep.insert(keep.end(), chosen.begin(), chosen.end());
    std::sort(keep.begin(), keep.end());

    LabeledSet out;
    out.samples.resize(static_cast<Eigen::Index>(keep.size()), data.samples.cols());
    out.labels.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.samples.row(static_cast<Eigen::Index>(i)) = data.samples.row(keep[i]);
        out.labels.push_back(data.labels[static_cast<std::size_t>(keep[i])]);
    }
    return out;
}

namespace {

constexpr const char* kModelFormat = "gaitprint-model/1";

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i];
    return v;
}

void check_format(const nlohmann::json& j, const char* expected_type) {
    if (j.value("format", "") != kModelFormat) {
        throw Error("model JSON: unsupported format tag");
    }
    if (j.value("type", "") != expected_type) {
        throw Error(std::string("model JSON: expected type ") + expected_type);
    }
}

}  // namespace

std::string model_to_json(const LdaModel& m) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["type"] = "lda";
    j["weight"] = vector_to_json(m.weight);
    j["bias"] = m.bias;
    j["meta"] = {{"regularization", m.regularization},
                 {"underdetermined", m.underdetermined}};
    j["class_means"] = {vector_to_json(m.mean_genuine), vector_to_json(m.mean_impostor)};
    return j.dump();
}

std::string model_to_json(const SvmModel& m) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["type"] = "svm";
    j["weight"] = vector_to_json(m.weight);
    j["bias"] = m.bias;
    if (m.scaler) {
        j["scaler"] = {{"mean", vector_to_json(m.scaler->mean)},
                       {"scale", vector_to_json(m.scaler->scale)}};
    }
    j["meta"] = {{"c_param", m.c_param},
                 {"epochs", m.training_meta.epochs},
                 {"seed", m.training_meta.seed},
                 {"final_objective", m.training_meta.final_objective}};
    return j.dump();
}

LdaModel lda_model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    check_format(j, "lda");
    LdaModel m;
    m.weight = vector_from_json(j.at("weight"));
    m.bias = j.at("bias");
    m.regularization = j.at("meta").value("regularization", 0.0);
    m.underdetermined = j.at("meta").value("underdetermined", false);
    if (j.contains("class_means")) {
        m.mean_genuine = vector_from_json(j["class_means"][0]);
        m.mean_impostor = vector_from_json(j["class_means"][1]);
    }
    return m;
}

SvmModel svm_model_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    check_format(j, "svm");
    SvmModel m;
    m.weight = vector_from_json(j.at("weight"));
    m.bias = j.at("bias");
    if (j.contains("scaler")) {
        Scaler sc;
        sc.mean = vector_from_json(j["scaler"]["mean"]);
        sc.scale = vector_from_json(j["scaler"]["scale"]);
        m.scaler = sc;
    }
    m.c_param = j.at("meta").value("c_param", 1.0);
    m.training_meta.epochs = j.at("meta").value("epochs", std::size_t{0});
    m.training_meta.seed = j.at("meta").value("seed", std::uint64_t{0});
    m.training_meta.final_objective = j.at("meta").value("final_objective", 0.0);
    return m;
}

}  // namespace gaitprint
