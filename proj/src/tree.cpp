#include "ttpbench/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ttpbench/error.hpp"
#include "ttpbench/learners.hpp"

namespace ttpbench {

namespace {

double value_at(const SparseMatrix& x, Eigen::Index r, Eigen::Index col) {
    const auto begin = x.outerIndexPtr()[r];
    const auto end = x.outerIndexPtr()[r + 1];
    if (end - begin == x.cols()) return x.valuePtr()[begin + col];
    const auto* idx = x.innerIndexPtr();
    const auto* pos = std::lower_bound(idx + begin, idx + end, static_cast<int>(col));
    if (pos == idx + end || *pos != col) return 0.0;
    return x.valuePtr()[pos - idx];
}

struct Entry {
    int col;
    double value;
    int label;
};

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -1.0;
};

double midpoint(double a, double b) {
    double t = a + (b - a) / 2.0;
    if (t >= b || !std::isfinite(t)) t = a;
    return t;
}

}  // namespace

DecisionTree DecisionTree::fit(const SparseMatrix& x, const std::vector<int>& labels,
                               const std::vector<std::size_t>& rows, int n_classes, const TreeFitOptions& options,
                               Rng& rng) {
    if (rows.empty()) throw Error("tree: no training rows");
    DecisionTree tree;
    tree.n_classes_ = n_classes;
    const auto nc = static_cast<std::size_t>(n_classes);

    struct Work {
        std::vector<std::size_t> rows;
        int node;
        int depth;
    };
    std::vector<Work> stack;
    tree.nodes_.emplace_back();
    stack.push_back({rows, 0, 0});

    std::vector<double> total(nc);
    std::vector<double> left(nc);
    std::vector<double> nz_counts(nc);
    const auto n_features = static_cast<std::size_t>(x.cols());
    std::vector<int> count(n_features, 0);
    std::vector<double> lo(n_features);
    std::vector<double> hi(n_features);
    std::vector<int> slot(n_features, -1);
    std::vector<char> nonconstant(n_features, 0);
    std::vector<int> pool(n_features);
    std::vector<int> touched;
    std::vector<int> candidates;
    std::vector<std::size_t> order;
    std::vector<std::vector<Entry>> buckets;

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        const auto& node_rows = work.rows;
        const auto n_node = static_cast<double>(node_rows.size());
        std::fill(total.begin(), total.end(), 0.0);
        for (auto r : node_rows) total[static_cast<std::size_t>(labels[r])] += 1.0;
        double total_sq = 0.0;
        for (double t : total) total_sq += t * t;
        const auto distinct = std::count_if(total.begin(), total.end(), [](double v) { return v > 0.0; });

        Split best;
        const bool may_split = distinct > 1 && node_rows.size() >= options.min_samples_split &&
                               (options.max_depth < 0 || work.depth < options.max_depth);
        if (may_split) {
            // Non-constant features of the node, ascending, from one pass over its entries.
            auto scan_nonconstant = [&] {
                touched.clear();
                for (auto r : node_rows)
                    for (SparseMatrix::InnerIterator it(x, static_cast<Eigen::Index>(r)); it; ++it) {
                        const auto f = static_cast<std::size_t>(it.col());
                        if (count[f] == 0) {
                            touched.push_back(static_cast<int>(f));
                            lo[f] = hi[f] = it.value();
                        } else {
                            lo[f] = std::min(lo[f], it.value());
                            hi[f] = std::max(hi[f], it.value());
                        }
                        ++count[f];
                    }
                std::sort(touched.begin(), touched.end());
                for (int f : touched) {
                    const auto fi = static_cast<std::size_t>(f);
                    double a = lo[fi], b = hi[fi];
                    if (static_cast<double>(count[fi]) < n_node) {
                        a = std::min(a, 0.0);
                        b = std::max(b, 0.0);
                    }
                    nonconstant[fi] = a < b;
                }
            };
            auto clear_scan = [&] {
                for (int f : touched) {
                    count[static_cast<std::size_t>(f)] = 0;
                    nonconstant[static_cast<std::size_t>(f)] = 0;
                }
                touched.clear();
            };
            auto bucket = [&](std::size_t k) -> std::vector<Entry>& {
                if (buckets.size() <= k) buckets.resize(k + 1);
                return buckets[k];
            };

            candidates.clear();
            std::vector<std::size_t> to_gather;
            if (options.max_features == 0 || options.max_features >= n_features) {
                scan_nonconstant();
                for (int f : touched)
                    if (nonconstant[static_cast<std::size_t>(f)]) {
                        to_gather.push_back(candidates.size());
                        candidates.push_back(f);
                    }
                clear_scan();
            } else {
                // Walk a random feature order and keep the first max_features
                // non-constant ones. Features are probed one by one until that
                // costs more than a full scan of the node's entries.
                std::size_t nnz_node = 0;
                for (auto r : node_rows)
                    nnz_node += static_cast<std::size_t>(x.outerIndexPtr()[r + 1] - x.outerIndexPtr()[r]);
                const double per_probe =
                    n_node * (1.0 + std::log2(1.0 + static_cast<double>(nnz_node) / n_node));
                auto probes_left = static_cast<std::size_t>(static_cast<double>(nnz_node) / per_probe);
                bool scanned = false;
                std::iota(pool.begin(), pool.end(), 0);
                for (std::size_t i = 0; i < n_features && candidates.size() < options.max_features; ++i) {
                    const auto j = i + static_cast<std::size_t>(rng.below(n_features - i));
                    std::swap(pool[i], pool[j]);
                    const int f = pool[i];
                    if (!scanned && probes_left > 0) {
                        --probes_left;
                        auto& b = bucket(candidates.size());
                        b.clear();
                        double a = 0.0, z = 0.0;
                        for (auto r : node_rows) {
                            const double v = value_at(x, static_cast<Eigen::Index>(r), f);
                            if (v == 0.0) continue;
                            if (b.empty()) {
                                a = z = v;
                            } else {
                                a = std::min(a, v);
                                z = std::max(z, v);
                            }
                            b.push_back({f, v, labels[r]});
                        }
                        if (static_cast<double>(b.size()) < n_node) {
                            a = std::min(a, 0.0);
                            z = std::max(z, 0.0);
                        }
                        if (a < z) candidates.push_back(f);
                        continue;
                    }
                    if (!scanned) {
                        scan_nonconstant();
                        scanned = true;
                    }
                    if (nonconstant[static_cast<std::size_t>(f)]) {
                        to_gather.push_back(candidates.size());
                        candidates.push_back(f);
                    }
                }
                if (scanned) clear_scan();
            }

            if (!to_gather.empty()) {
                for (auto k : to_gather) {
                    slot[static_cast<std::size_t>(candidates[k])] = static_cast<int>(k);
                    bucket(k).clear();
                }
                for (auto r : node_rows)
                    for (SparseMatrix::InnerIterator it(x, static_cast<Eigen::Index>(r)); it; ++it) {
                        const int k = slot[static_cast<std::size_t>(it.col())];
                        if (k >= 0) buckets[static_cast<std::size_t>(k)].push_back({static_cast<int>(it.col()), it.value(), labels[r]});
                    }
                for (auto k : to_gather) slot[static_cast<std::size_t>(candidates[k])] = -1;
            }
            // Evaluate in ascending feature order so ties go to the lower feature.
            order.resize(candidates.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return candidates[a] < candidates[b]; });

            for (const std::size_t k : order) {
                auto& entries = buckets[k];
                std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
                const std::size_t b = 0;
                const std::size_t e = entries.size();
                const int feature = candidates[k];
                std::fill(nz_counts.begin(), nz_counts.end(), 0.0);
                for (std::size_t i = b; i < e; ++i) nz_counts[static_cast<std::size_t>(entries[i].label)] += 1.0;
                const double n_zero = n_node - static_cast<double>(e - b);

                std::fill(left.begin(), left.end(), 0.0);
                double n_left = 0.0;
                // Sums of squared class counts on each side; integer valued, so exact.
                double sum_l2 = 0.0;
                double sum_r2 = total_sq;
                auto move_left = [&](int label) {
                    const auto c = static_cast<std::size_t>(label);
                    const double rc = total[c] - left[c];
                    sum_l2 += 2.0 * left[c] + 1.0;
                    sum_r2 -= 2.0 * rc - 1.0;
                    left[c] += 1.0;
                    n_left += 1.0;
                };
                // Walk values in ascending order with the zero block inserted
                // between negatives and positives.
                std::size_t i = b;
                bool zero_done = n_zero == 0.0;
                auto consider = [&](double lo, double hi) {
                    if (n_left <= 0.0 || n_left >= n_node) return;
                    const double s = sum_l2 / n_left + sum_r2 / (n_node - n_left);
                    if (s > best.score) {
                        best.score = s;
                        best.feature = feature;
                        best.threshold = midpoint(lo, hi);
                    }
                };
                double prev = 0.0;
                bool have_prev = false;
                while (i < e || !zero_done) {
                    double v;
                    if (!zero_done && (i >= e || entries[i].value > 0.0)) {
                        v = 0.0;
                    } else {
                        v = entries[i].value;
                    }
                    if (have_prev) consider(prev, v);
                    if (v == 0.0 && !zero_done) {
                        sum_l2 = 0.0;
                        sum_r2 = 0.0;
                        for (std::size_t c = 0; c < nc; ++c) {
                            left[c] += total[c] - nz_counts[c];
                            sum_l2 += left[c] * left[c];
                            sum_r2 += (total[c] - left[c]) * (total[c] - left[c]);
                        }
                        n_left += n_zero;
                        zero_done = true;
                        while (i < e && entries[i].value == 0.0) move_left(entries[i++].label);
                    } else {
                        while (i < e && entries[i].value == v) move_left(entries[i++].label);
                    }
                    prev = v;
                    have_prev = true;
                }
            }
        }

        if (best.feature < 0) {
            tree.nodes_[static_cast<std::size_t>(work.node)].leaf = static_cast<int>(tree.leaf_values_.size() / nc);
            for (std::size_t c = 0; c < nc; ++c) tree.leaf_values_.push_back(total[c] / n_node);
            continue;
        }

        std::vector<std::size_t> lrows;
        std::vector<std::size_t> rrows;
        for (auto r : node_rows) {
            if (value_at(x, static_cast<Eigen::Index>(r), best.feature) <= best.threshold)
                lrows.push_back(r);
            else
                rrows.push_back(r);
        }
        const int li = static_cast<int>(tree.nodes_.size());
        tree.nodes_.emplace_back();
        tree.nodes_.emplace_back();
        auto& node = tree.nodes_[static_cast<std::size_t>(work.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = li;
        node.right = li + 1;
        // Right first so the left subtree is built first.
        stack.push_back({std::move(rrows), li + 1, work.depth + 1});
        stack.push_back({std::move(lrows), li, work.depth + 1});
    }
    return tree;
}

const double* DecisionTree::predict_row(const SparseMatrix& x, Eigen::Index r) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& n = nodes_[i];
        i = static_cast<std::size_t>(value_at(x, r, n.feature) <= n.threshold ? n.left : n.right);
    }
    return leaf_values_.data() + static_cast<std::size_t>(nodes_[i].leaf) * static_cast<std::size_t>(n_classes_);
}

std::size_t DecisionTree::depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes_[i].feature >= 0) {
            stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
        }
    }
    return best;
}

std::vector<std::size_t> forest_bootstrap_rows(std::uint64_t seed, int tree_index, std::size_t n_rows, Rng* rng_out) {
    Rng rng(derive_seed(seed, "tree/" + std::to_string(tree_index)));
    std::vector<std::size_t> rows(n_rows);
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(n_rows));
    if (rng_out) *rng_out = rng;
    return rows;
}

namespace detail {

namespace {

class ForestModel : public Model {
public:
    ForestModel(std::vector<DecisionTree> trees, int n_classes) : trees_(std::move(trees)), n_classes_(n_classes) {}

    Eigen::MatrixXd scores(const SparseMatrix& q) const override {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q.rows(), n_classes_);
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            for (const auto& t : trees_) {
                const double* p = t.predict_row(q, r);
                for (int c = 0; c < n_classes_; ++c) out(r, c) += p[c];
            }
        }
        return out / static_cast<double>(trees_.size());
    }

private:
    std::vector<DecisionTree> trees_;
    int n_classes_;
};

}  // namespace

std::shared_ptr<const Model> train_dt(const TreeParams& p, const SparseMatrix& x, const std::vector<int>& y,
                                      int n_classes, std::uint64_t seed) {
    std::vector<std::size_t> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "tree"));
    TreeFitOptions opts{0, p.min_samples_split, p.max_depth};
    std::vector<DecisionTree> trees{DecisionTree::fit(x, y, rows, n_classes, opts, rng)};
    return std::make_shared<ForestModel>(std::move(trees), n_classes);
}

std::shared_ptr<const Model> train_rf(const ForestParams& fp, const TreeParams& tp, const SparseMatrix& x,
                                      const std::vector<int>& y, int n_classes, std::uint64_t seed) {
    if (fp.n_trees < 1) throw Error("RF: n_trees must be >= 1");
    std::size_t max_features = fp.max_features;
    if (max_features == 0)
        max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))));
    TreeFitOptions opts{max_features, tp.min_samples_split, tp.max_depth};
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(fp.n_trees));
    const auto n = static_cast<std::size_t>(x.rows());
    for (int t = 0; t < fp.n_trees; ++t) {
        Rng rng(0);
        const auto rows = forest_bootstrap_rows(seed, t, n, &rng);
        trees.push_back(DecisionTree::fit(x, y, rows, n_classes, opts, rng));
    }
    return std::make_shared<ForestModel>(std::move(trees), n_classes);
}

}  // namespace detail

}  // namespace ttpbench
