#include "ttpbench/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "ttpbench/csv.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

std::string_view oversample_name(OversampleMode mode) {
    switch (mode) {
        case OversampleMode::NONE: return "none";
        case OversampleMode::FULL_DATASET: return "full_dataset";
        case OversampleMode::TRAIN_ONLY: return "train_only";
    }
    return "?";
}

OversampleMode parse_oversample(std::string_view name) {
    for (auto m : kAllOversampleModes)
        if (oversample_name(m) == name) return m;
    throw Error("unknown oversample mode '" + std::string(name) + "' (expected none, full_dataset or train_only)");
}

std::vector<std::size_t> FoldPlan::test_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_rows(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

FoldPlan stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 2) throw Error("stratified_kfold: K must be >= 2");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    for (const auto& [label, rows] : by_class)
        if (rows.size() < static_cast<std::size_t>(k))
            throw Error("stratified_kfold: class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                        " rows, fewer than K=" + std::to_string(k));
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(labels.size(), 0);
    Rng rng(derive_seed(seed, "folds"));
    std::size_t offset = 0;
    for (auto& [label, rows] : by_class) {
        rng.shuffle(rows.begin(), rows.end());
        for (std::size_t i = 0; i < rows.size(); ++i)
            plan.assignments[rows[i]] = static_cast<int>((offset + i) % static_cast<std::size_t>(k));
        offset += rows.size();
    }
    return plan;
}

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes) {
    if (y_true.size() != y_pred.size()) throw Error("confusion: y_true and y_pred differ in length");
    if (n_classes < 1) throw Error("confusion: n_classes must be >= 1");
    ConfusionMatrix m;
    m.n = n_classes;
    m.counts.assign(static_cast<std::size_t>(n_classes) * static_cast<std::size_t>(n_classes), 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i];
        const int p = y_pred[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
            throw Error("confusion: label out of range at row " + std::to_string(i));
        ++m.counts[static_cast<std::size_t>(t) * static_cast<std::size_t>(n_classes) + static_cast<std::size_t>(p)];
    }
    return m;
}

Prf macro_prf(const ConfusionMatrix& conf) {
    Prf out;
    if (conf.n == 0) return out;
    auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
    for (int c = 0; c < conf.n; ++c) {
        double tp = static_cast<double>(conf.at(c, c));
        double fp = 0.0;
        double fn = 0.0;
        for (int o = 0; o < conf.n; ++o) {
            if (o == c) continue;
            fp += static_cast<double>(conf.at(o, c));
            fn += static_cast<double>(conf.at(c, o));
        }
        const double p = ratio(tp, tp + fp);
        const double r = ratio(tp, tp + fn);
        out.precision += p;
        out.recall += r;
        out.f1 += ratio(2.0 * p * r, p + r);
    }
    out.precision /= conf.n;
    out.recall /= conf.n;
    out.f1 /= conf.n;
    return out;
}

double binary_auc(const std::vector<double>& scores, const std::vector<char>& positive) {
    const auto n = scores.size();
    if (positive.size() != n) throw Error("auc: scores and labels differ in length");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    double n_pos = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t)
            if (positive[order[t]]) {
                rank_sum += midrank;
                n_pos += 1.0;
            }
        i = j;
    }
    const double n_neg = static_cast<double>(n) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) throw Error("auc: need both positive and negative rows");
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double macro_auc(const std::vector<int>& y_true, const Eigen::MatrixXd& scores) {
    if (static_cast<Eigen::Index>(y_true.size()) != scores.rows()) throw Error("macro_auc: row count mismatch");
    double sum = 0.0;
    int used = 0;
    std::vector<double> col(y_true.size());
    std::vector<char> pos(y_true.size());
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            pos[i] = y_true[i] == c ? 1 : 0;
            n_pos += static_cast<std::size_t>(pos[i]);
            col[i] = scores(static_cast<Eigen::Index>(i), c);
        }
        if (n_pos == 0 || n_pos == y_true.size()) continue;
        sum += binary_auc(col, pos);
        ++used;
    }
    if (used == 0) throw Error("macro_auc: every class lacks positives or negatives");
    return sum / used;
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string format_result_row(const CellResult& r) {
    return r.key.method + "," + r.key.classifier + "," + std::to_string(r.key.n) + "," + r.key.oversampled + "," +
           std::to_string(r.key.fold) + "," + fixed6(r.precision) + "," + fixed6(r.recall) + "," + fixed6(r.f1) + "," +
           fixed6(r.auc);
}

void write_results(const std::string& path, std::vector<CellResult> results) {
    std::sort(results.begin(), results.end(), [](const CellResult& a, const CellResult& b) { return a.key < b.key; });
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << kResultsHeader << '\n';
        for (const auto& r : results) out << format_result_row(r) << '\n';
        if (!out) throw Error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot replace " + path);
}

std::vector<CellResult> read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto rows = csv::parse(text);
    if (rows.empty()) return {};
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != kResultsHeader) throw ParseError(path + ": unexpected results header '" + header + "'", 1);
    std::vector<CellResult> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 9) throw ParseError(path + ": expected 9 fields", i + 1);
        try {
            CellResult r;
            r.key = {f[0], f[1], std::stoi(f[2]), f[3], std::stoi(f[4])};
            r.precision = std::stod(f[5]);
            r.recall = std::stod(f[6]);
            r.f1 = std::stod(f[7]);
            r.auc = std::stod(f[8]);
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError(path + ": malformed number", i + 1);
        }
    }
    return out;
}

int to_percent(double fraction) { return static_cast<int>(std::floor(fraction * 100.0 + 0.5 + 1e-9)); }

std::string Aggregate::render() const {
    return std::to_string(to_percent(min)) + "-" + std::to_string(to_percent(max)) + "(" +
           std::to_string(to_percent(mean)) + ")";
}

Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) throw Error("aggregate: empty group");
    Aggregate a;
    a.min = *std::min_element(values.begin(), values.end());
    a.max = *std::max_element(values.begin(), values.end());
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return a;
}

}  // namespace ttpbench
