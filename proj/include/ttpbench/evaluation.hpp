#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ttpbench {

enum class OversampleMode { NONE, FULL_DATASET, TRAIN_ONLY };

inline constexpr OversampleMode kAllOversampleModes[] = {OversampleMode::NONE, OversampleMode::FULL_DATASET,
                                                         OversampleMode::TRAIN_ONLY};

/// "none", "full_dataset", "train_only".
std::string_view oversample_name(OversampleMode mode);
OversampleMode parse_oversample(std::string_view name);

struct FoldPlan {
    int k = 5;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // fold of every row

    std::vector<std::size_t> test_rows(int fold) const;
    std::vector<std::size_t> train_rows(int fold) const;
};

/// Rows of each class are shuffled and dealt round-robin over the folds,
/// continuing from where the previous class stopped, so per-class fold
/// counts differ by at most one. Throws when a class has fewer than k rows.
FoldPlan stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

struct ConfusionMatrix {
    int n = 0;
    std::vector<std::int64_t> counts;  // row = true class, column = predicted

    std::int64_t at(int truth, int predicted) const {
        return counts[static_cast<std::size_t>(truth) * static_cast<std::size_t>(n) + static_cast<std::size_t>(predicted)];
    }
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Unweighted mean over all classes of the confusion matrix; 0/0 counts as 0.
Prf macro_prf(const ConfusionMatrix& conf);

/// Mann-Whitney AUC with midranks for ties. Needs both classes present.
double binary_auc(const std::vector<double>& scores, const std::vector<char>& positive);

/// One-vs-rest AUC averaged over classes having both positives and
/// negatives in `y_true`. Throws if no class qualifies.
double macro_auc(const std::vector<int>& y_true, const Eigen::MatrixXd& scores);

struct CellKey {
    std::string method;
    std::string classifier;
    int n = 0;
    std::string oversampled;
    int fold = 0;

    auto operator<=>(const CellKey&) const = default;
    bool operator==(const CellKey&) const = default;
};

struct CellResult {
    CellKey key;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

inline constexpr const char* kResultsHeader = "method,classifier,n,oversampled,fold,precision,recall,f1,auc";

/// Floats are written with 6 decimals.
std::string format_result_row(const CellResult& r);
void write_results(const std::string& path, std::vector<CellResult> results);
/// Missing file -> empty. Throws on a malformed header or row.
std::vector<CellResult> read_results(const std::string& path);

struct Aggregate {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;

    /// "A-B(C)" in integer percent, rounded half-up.
    std::string render() const;
};

/// Throws on an empty input.
Aggregate aggregate(const std::vector<double>& values);

/// Half-up rounding of a fraction to integer percent.
int to_percent(double fraction);

}  // namespace ttpbench
