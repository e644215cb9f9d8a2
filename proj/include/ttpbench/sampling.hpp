#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttpbench/feature_matrix.hpp"

namespace ttpbench {

enum class SmoteMode {
    FULL_DATASET,  // oversample before splitting
    TRAIN_ONLY,    // oversample the training rows of each fold only
};

struct SmoteConfig {
    int k_neighbors = 6;
    SmoteMode mode = SmoteMode::TRAIN_ONLY;
    std::uint64_t seed = 0;
};

/// SMOTE: every class is grown to the majority count with points
/// x + u * (neighbour - x), u ~ U[0, 1), neighbour drawn from the k nearest
/// same-class rows of a uniformly drawn x. Original rows come first and keep
/// their order; synthetic rows follow, grouped by ascending class index.
/// Classes with a single row are rejected; k is lowered to class_size - 1
/// for small classes and a warning is appended to `warnings`.
FeatureMatrix smote(const FeatureMatrix& x, const SmoteConfig& config, std::vector<std::string>* warnings = nullptr);

/// k nearest rows (by Euclidean distance) among `rows`, excluding the row
/// itself; distance ties go to the lower position in `rows`.
std::vector<std::vector<std::size_t>> nearest_within(const SparseMatrix& values, const std::vector<std::size_t>& rows,
                                                     std::size_t k);

}  // namespace ttpbench
