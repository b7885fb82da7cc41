#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaitprint/errors.hpp"

namespace gaitprint {

// Two-class training/testing data. Label 0 = genuine, 1 = impostor.
struct LabeledSet {
    Eigen::MatrixXd samples;  // n x d, one row per sample
    std::vector<int> labels;  // n entries, values in {0, 1}

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(samples.cols()); }
};

// Per-feature standardization fitted on training data. Zero-variance
// columns map to zero so constant features cannot influence decisions.
struct Scaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // per-column sd; 1 where sd == 0

    static Scaler fit(const Eigen::MatrixXd& samples);
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
};

struct LdaModel {
    Eigen::VectorXd weight;
    double bias = 0.0;
    Eigen::VectorXd mean_genuine;   // class 0
    Eigen::VectorXd mean_impostor;  // class 1
    Eigen::MatrixXd pooled_covariance;
    double regularization = 0.0;
    bool underdetermined = false;  // d > min(n0, n1); estimate is unstable
};

struct SvmTrainingMeta {
    std::size_t epochs = 0;
    std::uint64_t seed = 0;
    double final_objective = 0.0;
    double final_hinge = 0.0;
};

struct SvmModel {
    Eigen::VectorXd weight;
    double bias = 0.0;
    double c_param = 1.0;
    std::optional<Scaler> scaler;
    SvmTrainingMeta training_meta;
};

struct SvmConfig {
    double c_param = 1.0;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;       // mandatory: deterministic runs
    bool standardize = true;      // subgradient descent is scale-sensitive
};

// Fisher LDA via the pooled-covariance solve (S + reg*I) w = mu1 - mu0.
// reg defaults to 1e-6 * trace(S) / d when not given. Throws ClassMissing
// when either class has fewer than 2 samples, SingularCovariance when the
// regularized matrix is not positive definite.
LdaModel lda_train(const LabeledSet& data, std::optional<double> reg = std::nullopt);

// weight . x + bias; positive = impostor side. Throws DimMismatch.
double lda_score(const LdaModel& m, const Eigen::VectorXd& x);

// Linear soft-margin SVM: regularized hinge loss minimized by seeded
// stochastic subgradient descent (step 1/(lambda t), lambda = 1/(n C))
// with a suffix-averaged iterate. Bias is updated un-regularized.
SvmModel svm_train(const LabeledSet& data, const SvmConfig& cfg);

double svm_score(const SvmModel& m, const Eigen::VectorXd& x);

// Primal objective lambda/2 |w|^2 + mean hinge on the given (already
// standardized, if applicable) sample matrix. Exposed for diagnostics.
double svm_objective(const Eigen::VectorXd& w, double bias, double lambda,
                     const Eigen::MatrixXd& samples, const std::vector<int>& labels);

inline int predict(double score, double threshold = 0.0) {
    return score > threshold ? 1 : 0;
}

// Balances classes by subsampling the larger class down to the smaller
// one, without replacement, deterministically for a given seed. Row
// order of the retained samples is preserved.
LabeledSet balance_by_subsampling(const LabeledSet& data, std::uint64_t seed);

// JSON model interchange, versioned with a format tag.
std::string model_to_json(const LdaModel& m);
std::string model_to_json(const SvmModel& m);
LdaModel lda_model_from_json(const std::string& text);
SvmModel svm_model_from_json(const std::string& text);

}  // namespace gaitprint
