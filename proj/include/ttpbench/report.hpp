#pragma once

#include <string>
#include <vector>

#include "ttpbench/evaluation.hpp"

namespace ttpbench {

/// Mean over folds of one (method, classifier, n, oversampled) setting.
struct SettingMean {
    std::string method;
    std::string classifier;
    int n = 0;
    std::string oversampled;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

std::vector<SettingMean> fold_means(const std::vector<CellResult>& results);

/// 100 * (yes - no) / no on integer percents, rounded half-up.
int gain_percent(int no, int yes);

/// Markdown: one row per (method, classifier) with A-B(C) of precision,
/// recall, F1 and AUC across n for the given oversampling mode.
std::string render_table4(const std::vector<CellResult>& results, const std::string& oversampled = "none");

/// Markdown: per method, mean F1/AUC without oversampling vs. with it
/// (full_dataset, else train_only) and the gain.
std::string render_table5(const std::vector<CellResult>& results);

/// Long CSV: method,classifier,n,oversampled,metric,value (fold means).
std::string render_boxplot_data(const std::vector<CellResult>& results);

}  // namespace ttpbench
