#include "ttpbench/sampling.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ttpbench/error.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

std::vector<std::vector<std::size_t>> nearest_within(const SparseMatrix& values, const std::vector<std::size_t>& rows,
                                                     std::size_t k) {
    const auto n = rows.size();
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t i = 0; i < n; ++i)
        for (SparseMatrix::InnerIterator it(values, static_cast<Eigen::Index>(rows[i])); it; ++it)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), it.value());
    SparseMatrix sub(static_cast<Eigen::Index>(n), values.cols());
    sub.setFromTriplets(trips.begin(), trips.end());
    const Eigen::MatrixXd gram = Eigen::MatrixXd(sub * SparseMatrix(sub.transpose()));

    std::vector<std::vector<std::size_t>> out(n);
    std::vector<std::size_t> order;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            dist[j] = std::max(0.0, gram(ii, ii) + gram(jj, jj) - 2.0 * gram(ii, jj));
        }
        order.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        const auto take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
        out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return out;
}

FeatureMatrix smote(const FeatureMatrix& x, const SmoteConfig& config, std::vector<std::string>* warnings) {
    if (config.k_neighbors < 1) throw Error("smote: k_neighbors must be >= 1");
    x.validate();
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < x.labels.size(); ++r) by_class[x.labels[r]].push_back(r);
    std::size_t majority = 0;
    for (const auto& [label, rows] : by_class) majority = std::max(majority, rows.size());

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(x.values.nonZeros()));
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (SparseMatrix::InnerIterator it(x.values, r); it; ++it)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    std::vector<int> labels = x.labels;
    auto next_row = static_cast<int>(x.rows());

    Eigen::VectorXd base(x.cols());
    Eigen::VectorXd other(x.cols());
    for (const auto& [label, rows] : by_class) {
        if (rows.size() == majority) continue;
        if (rows.size() < 2)
            throw Error("smote: class " + std::to_string(label) +
                        " has a single sample; raise min_support so every class has at least 2");
        auto k = static_cast<std::size_t>(config.k_neighbors);
        if (rows.size() <= k) {
            k = rows.size() - 1;
            if (warnings)
                warnings->push_back("smote: class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                                    " samples; k lowered to " + std::to_string(k));
        }
        const auto neighbours = nearest_within(x.values, rows, k);
        Rng rng(derive_seed(config.seed, "smote/" + std::to_string(label)));
        for (std::size_t s = rows.size(); s < majority; ++s) {
            const auto pos = static_cast<std::size_t>(rng.below(rows.size()));
            const auto nb = neighbours[pos][static_cast<std::size_t>(rng.below(k))];
            const double u = rng.uniform();
            base.setZero();
            other.setZero();
            for (SparseMatrix::InnerIterator it(x.values, static_cast<Eigen::Index>(rows[pos])); it; ++it)
                base[it.col()] = it.value();
            for (SparseMatrix::InnerIterator it(x.values, static_cast<Eigen::Index>(rows[nb])); it; ++it)
                other[it.col()] = it.value();
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                if (base[c] == 0.0 && other[c] == 0.0) continue;
                const double v = base[c] + u * (other[c] - base[c]);
                if (v != 0.0) trips.emplace_back(next_row, static_cast<int>(c), v);
            }
            labels.push_back(label);
            ++next_row;
        }
    }

    FeatureMatrix out;
    out.method_tag = x.method_tag;
    out.label_set = x.label_set;
    out.col_meta = x.col_meta;
    out.labels = std::move(labels);
    out.values.resize(next_row, x.cols());
    out.values.setFromTriplets(trips.begin(), trips.end());
    out.values.makeCompressed();
    return out;
}

}  // namespace ttpbench
