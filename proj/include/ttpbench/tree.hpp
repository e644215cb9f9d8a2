#pragma once

#include <cstdint>
#include <vector>

#include "ttpbench/feature_matrix.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

struct TreeFitOptions {
    std::size_t max_features = 0;  // 0 = every feature
    std::size_t min_samples_split = 2;
    int max_depth = -1;
};

/// CART classification tree with Gini impurity. Splits are `x[f] <= t`
/// with t the midpoint between adjacent distinct values; ties between equally
/// good splits go to the lower feature index, then the lower threshold.
class DecisionTree {
public:
    struct Node {
        int feature = -1;  // -1 for a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int leaf = -1;  // index into leaf proportions
    };

    /// `rows` may repeat (bootstrap samples). When max_features is smaller
    /// than the number of non-constant features at a node, a random subset
    /// of that size is drawn from `rng`.
    static DecisionTree fit(const SparseMatrix& x, const std::vector<int>& labels, const std::vector<std::size_t>& rows,
                            int n_classes, const TreeFitOptions& options, Rng& rng);

    /// Class proportions of the leaf reached by row `r` of `x`.
    const double* predict_row(const SparseMatrix& x, Eigen::Index r) const;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t depth() const;

private:
    int n_classes_ = 0;
    std::vector<Node> nodes_;
    std::vector<double> leaf_values_;  // n_leaves * n_classes
};

/// Bootstrap draw used for tree `tree_index` of a forest seeded with `seed`.
/// Also returns the RNG positioned where tree fitting continues.
std::vector<std::size_t> forest_bootstrap_rows(std::uint64_t seed, int tree_index, std::size_t n_rows, Rng* rng_out = nullptr);

}  // namespace ttpbench
