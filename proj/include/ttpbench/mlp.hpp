#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ttpbench/feature_matrix.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

/// One hidden ReLU layer, softmax output.
struct MlpWeights {
    Eigen::MatrixXd w1;  // features x hidden
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // hidden x classes
    Eigen::VectorXd b2;
};

/// Glorot-uniform weights and biases, bound sqrt(6 / (fan_in + fan_out)).
MlpWeights mlp_init(Eigen::Index features, Eigen::Index hidden, Eigen::Index classes, Rng& rng);

/// Softmax probabilities, rows x classes.
Eigen::MatrixXd mlp_forward(const MlpWeights& w, const SparseMatrix& x);

/// Mean cross-entropy plus alpha / (2 n) * ||W||^2 (weights only). Fills
/// `grad` with the exact gradient when non-null.
double mlp_loss(const MlpWeights& w, const SparseMatrix& x, const std::vector<int>& y, double alpha,
                MlpWeights* grad = nullptr);

}  // namespace ttpbench
