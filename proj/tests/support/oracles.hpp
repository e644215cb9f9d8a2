#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ttpbench/feature_matrix.hpp"

namespace ttpbench::testing {

/// One-sided Jacobi SVD, singular values descending. Independent of Eigen's
/// decompositions; used to cross-check the truncated SVD.
struct JacobiSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};
JacobiSvd jacobi_svd(const Eigen::MatrixXd& a, int max_sweeps = 60);

struct BrutePrf {
    double precision, recall, f1;
};
/// Per-class TP/FP/FN recounted row by row.
BrutePrf brute_macro_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes);

/// Macro one-vs-rest AUC from every positive/negative pair, ties worth 1/2.
double pair_macro_auc(const std::vector<int>& y_true, const Eigen::MatrixXd& scores);

/// Two isotropic unit-variance Gaussian blobs in `dims` dimensions whose
/// centres are `separation` apart along the first axis.
FeatureMatrix make_blobs(int per_class, double separation, int dims, std::uint64_t seed);
// class c is shifted along axis c % dims; rows grouped by class
FeatureMatrix make_blobs(const std::vector<int>& class_sizes, double separation, int dims, std::uint64_t seed);

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted);

}  // namespace ttpbench::testing
