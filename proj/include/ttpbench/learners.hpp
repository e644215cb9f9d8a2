#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ttpbench/feature_matrix.hpp"

namespace ttpbench {

enum class LearnerKind { KNN, NB, SVM, DT, RF, NN };

inline constexpr LearnerKind kAllLearners[] = {LearnerKind::KNN, LearnerKind::NB, LearnerKind::SVM,
                                               LearnerKind::DT,  LearnerKind::RF, LearnerKind::NN};

std::string_view learner_name(LearnerKind kind);
LearnerKind parse_learner(std::string_view name);

struct KnnParams {
    int k = 5;
};

struct NbParams {
    double var_smoothing = 1e-9;  // fraction of the largest feature variance
};

struct SvmParams {
    double lambda = 1e-4;
    int epochs = 200;
};

struct TreeParams {
    std::size_t min_samples_split = 2;
    int max_depth = -1;  // unlimited
};

struct ForestParams {
    int n_trees = 100;
    std::size_t max_features = 0;  // 0 = floor(sqrt(n_features))
};

struct MlpParams {
    int hidden = 100;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double alpha = 1e-4;  // L2 penalty
    int epochs = 200;
    int batch_size = 32;
    double tol = 1e-4;
    int n_iter_no_change = 10;
};

struct LearnerSpec {
    LearnerKind kind = LearnerKind::KNN;
    KnnParams knn;
    NbParams nb;
    SvmParams svm;
    TreeParams tree;
    ForestParams forest;
    MlpParams mlp;
    std::uint64_t seed = 0;
};

/// Fitted state of one learner. Implementations are immutable after training.
class Model {
public:
    virtual ~Model() = default;
    /// rows x n_classes, higher = more likely.
    virtual Eigen::MatrixXd scores(const SparseMatrix& x) const = 0;
};

class TrainedModel {
public:
    TrainedModel(LearnerSpec spec, int n_classes, Eigen::Index n_features, std::shared_ptr<const Model> impl)
        : spec_(spec), n_classes_(n_classes), n_features_(n_features), impl_(std::move(impl)) {}

    const LearnerSpec& spec() const { return spec_; }
    int n_classes() const { return n_classes_; }

    /// Throws on a feature dimension mismatch.
    Eigen::MatrixXd predict_scores(const SparseMatrix& x) const;
    /// Argmax of predict_scores; ties go to the lowest class index.
    std::vector<int> predict_labels(const SparseMatrix& x) const;

private:
    LearnerSpec spec_;
    int n_classes_;
    Eigen::Index n_features_;
    std::shared_ptr<const Model> impl_;
};

/// Class count is label_set.size() when present, else max label + 1.
/// Throws when fewer than two classes are present or a value is not finite.
TrainedModel train(const LearnerSpec& spec, const FeatureMatrix& train_set);

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores);

namespace detail {
std::shared_ptr<const Model> train_knn(const KnnParams& p, const SparseMatrix& x, const std::vector<int>& y, int n_classes);
std::shared_ptr<const Model> train_nb(const NbParams& p, const SparseMatrix& x, const std::vector<int>& y, int n_classes);
std::shared_ptr<const Model> train_svm(const SvmParams& p, const SparseMatrix& x, const std::vector<int>& y, int n_classes,
                                       std::uint64_t seed);
std::shared_ptr<const Model> train_dt(const TreeParams& p, const SparseMatrix& x, const std::vector<int>& y, int n_classes,
                                      std::uint64_t seed);
std::shared_ptr<const Model> train_rf(const ForestParams& fp, const TreeParams& tp, const SparseMatrix& x,
                                      const std::vector<int>& y, int n_classes, std::uint64_t seed);
std::shared_ptr<const Model> train_mlp(const MlpParams& p, const SparseMatrix& x, const std::vector<int>& y, int n_classes,
                                       std::uint64_t seed);
}  // namespace detail

}  // namespace ttpbench
