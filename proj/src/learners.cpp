#include "ttpbench/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "ttpbench/error.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

std::string_view learner_name(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::KNN: return "KNN";
        case LearnerKind::NB: return "NB";
        case LearnerKind::SVM: return "SVM";
        case LearnerKind::DT: return "DT";
        case LearnerKind::RF: return "RF";
        case LearnerKind::NN: return "NN";
    }
    return "?";
}

LearnerKind parse_learner(std::string_view name) {
    std::string up;
    for (char c : name) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (auto k : kAllLearners)
        if (learner_name(k) == up) return k;
    throw Error("unknown classifier '" + std::string(name) + "' (expected KNN, NB, SVM, DT, RF or NN)");
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
    for (Eigen::Index r = 0; r < scores.rows(); ++r) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < scores.cols(); ++c)
            if (scores(r, c) > scores(r, best)) best = c;
        out[static_cast<std::size_t>(r)] = static_cast<int>(best);
    }
    return out;
}

Eigen::MatrixXd TrainedModel::predict_scores(const SparseMatrix& x) const {
    if (x.cols() != n_features_)
        throw Error("predict: model expects " + std::to_string(n_features_) + " features, got " +
                    std::to_string(x.cols()));
    return impl_->scores(x);
}

std::vector<int> TrainedModel::predict_labels(const SparseMatrix& x) const { return argmax_rows(predict_scores(x)); }

TrainedModel train(const LearnerSpec& spec, const FeatureMatrix& train_set) {
    train_set.validate();
    const auto& y = train_set.labels;
    if (y.empty()) throw Error("train: empty training set");
    int n_classes = static_cast<int>(train_set.label_set.size());
    const int max_label = *std::max_element(y.begin(), y.end());
    if (n_classes == 0) n_classes = max_label + 1;
    if (*std::min_element(y.begin(), y.end()) < 0 || max_label >= n_classes)
        throw Error("train: label out of range");
    std::vector<char> present(static_cast<std::size_t>(n_classes), 0);
    for (int l : y) present[static_cast<std::size_t>(l)] = 1;
    if (std::count(present.begin(), present.end(), 1) < 2)
        throw Error("train: need at least two classes in the training set");

    SparseMatrix x = train_set.values;
    x.makeCompressed();
    std::shared_ptr<const Model> impl;
    switch (spec.kind) {
        case LearnerKind::KNN: impl = detail::train_knn(spec.knn, x, y, n_classes); break;
        case LearnerKind::NB: impl = detail::train_nb(spec.nb, x, y, n_classes); break;
        case LearnerKind::SVM: impl = detail::train_svm(spec.svm, x, y, n_classes, spec.seed); break;
        case LearnerKind::DT: impl = detail::train_dt(spec.tree, x, y, n_classes, spec.seed); break;
        case LearnerKind::RF: impl = detail::train_rf(spec.forest, spec.tree, x, y, n_classes, spec.seed); break;
        case LearnerKind::NN: impl = detail::train_mlp(spec.mlp, x, y, n_classes, spec.seed); break;
    }
    return TrainedModel(spec, n_classes, x.cols(), std::move(impl));
}

namespace detail {

namespace {

double density(const SparseMatrix& x) {
    const double cells = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
    return cells > 0 ? static_cast<double>(x.nonZeros()) / cells : 0.0;
}

Eigen::VectorXd squared_norms(const SparseMatrix& x) {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) out[r] = x.row(r).squaredNorm();
    return out;
}

class KnnModel : public Model {
public:
    KnnModel(int k, SparseMatrix x, std::vector<int> y, int n_classes)
        : k_(k), x_(std::move(x)), y_(std::move(y)), n_classes_(n_classes), norms_(squared_norms(x_)) {
        if (density(x_) > 0.25) dense_ = Eigen::MatrixXd(x_);
    }

    Eigen::MatrixXd scores(const SparseMatrix& q) const override {
        const Eigen::Index n_train = x_.rows();
        const auto k = static_cast<std::size_t>(std::min<Eigen::Index>(k_, n_train));
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q.rows(), n_classes_);
        const Eigen::VectorXd qn = squared_norms(q);
        std::vector<std::size_t> order(static_cast<std::size_t>(n_train));
        std::vector<double> dist(static_cast<std::size_t>(n_train));
        constexpr Eigen::Index kBlock = 256;
        for (Eigen::Index start = 0; start < q.rows(); start += kBlock) {
            const Eigen::Index len = std::min(kBlock, q.rows() - start);
            Eigen::MatrixXd dots;
            if (dense_.size() > 0)
                dots = Eigen::MatrixXd(q.middleRows(start, len)) * dense_.transpose();
            else
                dots = Eigen::MatrixXd(q.middleRows(start, len) * SparseMatrix(x_.transpose()));
            for (Eigen::Index i = 0; i < len; ++i) {
                for (Eigen::Index j = 0; j < n_train; ++j)
                    dist[static_cast<std::size_t>(j)] = std::max(0.0, qn[start + i] + norms_[j] - 2.0 * dots(i, j));
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                                  [&](std::size_t a, std::size_t b) {
                                      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                                  });
                for (std::size_t j = 0; j < k; ++j) out(start + i, y_[order[j]]) += 1.0 / static_cast<double>(k);
            }
        }
        return out;
    }

private:
    int k_;
    SparseMatrix x_;
    std::vector<int> y_;
    int n_classes_;
    Eigen::VectorXd norms_;
    Eigen::MatrixXd dense_;
};

// Gaussian naive Bayes. The log-likelihood of a row is split into a per-class
// constant (every feature at zero) plus corrections for its non-zeros.
class NbModel : public Model {
public:
    NbModel(Eigen::VectorXd base, Eigen::MatrixXd mean, Eigen::MatrixXd inv_var)
        : base_(std::move(base)), mean_(std::move(mean)), inv_var_(std::move(inv_var)) {}

    Eigen::MatrixXd scores(const SparseMatrix& q) const override {
        const Eigen::Index c_n = base_.size();
        Eigen::MatrixXd out(q.rows(), c_n);
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            for (Eigen::Index c = 0; c < c_n; ++c) {
                double s = base_[c];
                for (SparseMatrix::InnerIterator it(q, r); it; ++it) {
                    const double m = mean_(c, it.col());
                    const double d = it.value() - m;
                    s -= 0.5 * (d * d - m * m) * inv_var_(c, it.col());
                }
                out(r, c) = s;
            }
            const double mx = out.row(r).maxCoeff();
            const double lse = mx + std::log((out.row(r).array() - mx).exp().sum());
            out.row(r).array() -= lse;
        }
        return out;
    }

private:
    Eigen::VectorXd base_;
    Eigen::MatrixXd mean_;
    Eigen::MatrixXd inv_var_;
};

// Absent classes get a finite floor so scores stay usable for ranking.
constexpr double kLogFloor = -1e300;

class LinearModel : public Model {
public:
    LinearModel(Eigen::MatrixXd w, Eigen::VectorXd b) : w_(std::move(w)), b_(std::move(b)) {}

    Eigen::MatrixXd scores(const SparseMatrix& q) const override {
        Eigen::MatrixXd out = q * w_;
        out.rowwise() += b_.transpose();
        return out;
    }

private:
    Eigen::MatrixXd w_;  // features x classes
    Eigen::VectorXd b_;
};

}  // namespace

std::shared_ptr<const Model> train_knn(const KnnParams& p, const SparseMatrix& x, const std::vector<int>& y,
                                       int n_classes) {
    if (p.k < 1) throw Error("KNN: k must be >= 1");
    return std::make_shared<KnnModel>(p.k, x, y, n_classes);
}

std::shared_ptr<const Model> train_nb(const NbParams& p, const SparseMatrix& x, const std::vector<int>& y,
                                      int n_classes) {
    const Eigen::Index f = x.cols();
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_classes, f);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(n_classes, f);
    Eigen::VectorXd count = Eigen::VectorXd::Zero(n_classes);
    Eigen::VectorXd all_sum = Eigen::VectorXd::Zero(f);
    Eigen::VectorXd all_sq = Eigen::VectorXd::Zero(f);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int c = y[static_cast<std::size_t>(r)];
        count[c] += 1.0;
        for (SparseMatrix::InnerIterator it(x, r); it; ++it) {
            sum(c, it.col()) += it.value();
            sum_sq(c, it.col()) += it.value() * it.value();
            all_sum[it.col()] += it.value();
            all_sq[it.col()] += it.value() * it.value();
        }
    }
    double max_var = 0.0;
    for (Eigen::Index j = 0; j < f; ++j) {
        const double m = all_sum[j] / n;
        max_var = std::max(max_var, all_sq[j] / n - m * m);
    }
    double eps = p.var_smoothing * max_var;
    if (!(eps > 0.0)) eps = p.var_smoothing;

    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n_classes, f);
    Eigen::MatrixXd inv_var = Eigen::MatrixXd::Zero(n_classes, f);
    Eigen::VectorXd base(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        if (count[c] == 0.0) {
            base[c] = kLogFloor;
            inv_var.row(c).setConstant(1.0 / eps);
            continue;
        }
        double b = std::log(count[c] / n);
        for (Eigen::Index j = 0; j < f; ++j) {
            const double m = sum(c, j) / count[c];
            const double v = std::max(0.0, sum_sq(c, j) / count[c] - m * m) + eps;
            mean(c, j) = m;
            inv_var(c, j) = 1.0 / v;
            b -= 0.5 * std::log(2.0 * M_PI * v) + 0.5 * m * m / v;
        }
        base[c] = b;
    }
    return std::make_shared<NbModel>(std::move(base), std::move(mean), std::move(inv_var));
}

// One-vs-rest Pegasos on the hinge loss with an always-on bias input. The
// weight vector is kept as scale * v so the per-step shrink is O(1).
std::shared_ptr<const Model> train_svm(const SvmParams& p, const SparseMatrix& x, const std::vector<int>& y,
                                       int n_classes, std::uint64_t seed) {
    if (!(p.lambda > 0.0) || p.epochs < 1) throw Error("SVM: lambda must be > 0 and epochs >= 1");
    const Eigen::Index f = x.cols();
    const auto n = static_cast<std::size_t>(x.rows());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(f, n_classes);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n_classes);
    std::vector<std::size_t> order(n);
    Eigen::VectorXd v(f);
    for (int c = 0; c < n_classes; ++c) {
        Rng rng(derive_seed(seed, "svm/" + std::to_string(c)));
        v.setZero();
        double vb = 0.0;
        double scale = 1.0;
        std::uint64_t t = 0;
        for (int epoch = 0; epoch < p.epochs; ++epoch) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            rng.shuffle(order.begin(), order.end());
            for (std::size_t idx : order) {
                ++t;
                const auto r = static_cast<Eigen::Index>(idx);
                const double target = y[idx] == c ? 1.0 : -1.0;
                double dot = vb;
                for (SparseMatrix::InnerIterator it(x, r); it; ++it) dot += v[it.col()] * it.value();
                const double margin = target * scale * dot;
                const double eta = 1.0 / (p.lambda * static_cast<double>(t));
                scale *= 1.0 - eta * p.lambda;
                if (scale < 1e-9) {
                    v *= scale;
                    vb *= scale;
                    scale = 1.0;
                }
                if (margin < 1.0) {
                    const double step = eta * target / scale;
                    for (SparseMatrix::InnerIterator it(x, r); it; ++it) v[it.col()] += step * it.value();
                    vb += step;
                }
            }
        }
        w.col(c) = scale * v;
        b[c] = scale * vb;
    }
    return std::make_shared<LinearModel>(std::move(w), std::move(b));
}

}  // namespace detail

}  // namespace ttpbench
