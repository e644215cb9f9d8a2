#include "ttpbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ttpbench/error.hpp"
#include "ttpbench/learners.hpp"

namespace ttpbench {

namespace {

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
    return m;
}

void softmax_rows(Eigen::MatrixXd& z) {
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double mx = z.row(r).maxCoeff();
        z.row(r) = (z.row(r).array() - mx).exp();
        z.row(r) /= z.row(r).sum();
    }
}

SparseMatrix take_rows(const SparseMatrix& x, const std::vector<std::size_t>& order, std::size_t begin,
                       std::size_t end) {
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t i = begin; i < end; ++i)
        for (SparseMatrix::InnerIterator it(x, static_cast<Eigen::Index>(order[i])); it; ++it)
            trips.emplace_back(static_cast<int>(i - begin), static_cast<int>(it.col()), it.value());
    SparseMatrix out(static_cast<Eigen::Index>(end - begin), x.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace

MlpWeights mlp_init(Eigen::Index features, Eigen::Index hidden, Eigen::Index classes, Rng& rng) {
    MlpWeights w;
    const double b1 = std::sqrt(6.0 / static_cast<double>(features + hidden));
    const double b2 = std::sqrt(6.0 / static_cast<double>(hidden + classes));
    w.w1 = uniform_matrix(features, hidden, b1, rng);
    w.b1 = uniform_matrix(hidden, 1, b1, rng);
    w.w2 = uniform_matrix(hidden, classes, b2, rng);
    w.b2 = uniform_matrix(classes, 1, b2, rng);
    return w;
}

Eigen::MatrixXd mlp_forward(const MlpWeights& w, const SparseMatrix& x) {
    Eigen::MatrixXd a = x * w.w1;
    a.rowwise() += w.b1.transpose();
    a = a.cwiseMax(0.0);
    Eigen::MatrixXd z = a * w.w2;
    z.rowwise() += w.b2.transpose();
    softmax_rows(z);
    return z;
}

double mlp_loss(const MlpWeights& w, const SparseMatrix& x, const std::vector<int>& y, double alpha, MlpWeights* grad) {
    const auto n = static_cast<double>(x.rows());
    Eigen::MatrixXd pre = x * w.w1;
    pre.rowwise() += w.b1.transpose();
    const Eigen::MatrixXd a = pre.cwiseMax(0.0);
    Eigen::MatrixXd p = a * w.w2;
    p.rowwise() += w.b2.transpose();
    softmax_rows(p);

    double loss = 0.0;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double pr = std::max(p(r, y[static_cast<std::size_t>(r)]), std::numeric_limits<double>::min());
        loss -= std::log(pr);
    }
    loss /= n;
    loss += 0.5 * alpha * (w.w1.squaredNorm() + w.w2.squaredNorm()) / n;
    if (!grad) return loss;

    Eigen::MatrixXd delta = p;
    for (Eigen::Index r = 0; r < p.rows(); ++r) delta(r, y[static_cast<std::size_t>(r)]) -= 1.0;
    delta /= n;
    grad->w2 = a.transpose() * delta + (alpha / n) * w.w2;
    grad->b2 = delta.colwise().sum().transpose();
    Eigen::MatrixXd back = delta * w.w2.transpose();
    back = (pre.array() > 0.0).select(back, 0.0);
    grad->w1 = SparseMatrix(x.transpose()) * back + (alpha / n) * w.w1;
    grad->b1 = back.colwise().sum().transpose();
    return loss;
}

namespace detail {

namespace {

class MlpModel : public Model {
public:
    explicit MlpModel(MlpWeights w) : w_(std::move(w)) {}
    Eigen::MatrixXd scores(const SparseMatrix& q) const override { return mlp_forward(w_, q); }

private:
    MlpWeights w_;
};

struct Adam {
    Eigen::MatrixXd m;
    Eigen::MatrixXd v;

    template <typename P, typename G>
    void step(P& param, const G& g, double lr_t, const MlpParams& p) {
        if (m.size() == 0) {
            m = Eigen::MatrixXd::Zero(param.rows(), param.cols());
            v = Eigen::MatrixXd::Zero(param.rows(), param.cols());
        }
        m = p.beta1 * m + (1.0 - p.beta1) * g;
        v = p.beta2 * v + (1.0 - p.beta2) * g.cwiseProduct(g);
        param.array() -= lr_t * m.array() / (v.array().sqrt() + p.epsilon);
    }
};

}  // namespace

std::shared_ptr<const Model> train_mlp(const MlpParams& p, const SparseMatrix& x, const std::vector<int>& y,
                                       int n_classes, std::uint64_t seed) {
    if (p.hidden < 1 || p.epochs < 1 || p.batch_size < 1) throw Error("NN: hidden, epochs and batch_size must be >= 1");
    Rng rng(derive_seed(seed, "mlp"));
    MlpWeights w = mlp_init(x.cols(), p.hidden, n_classes, rng);
    MlpWeights g;
    Adam a_w1, a_b1, a_w2, a_b2;
    const auto n = static_cast<std::size_t>(x.rows());
    const auto batch = static_cast<std::size_t>(p.batch_size);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> yb;
    double best_loss = std::numeric_limits<double>::infinity();
    int no_improvement = 0;
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        rng.shuffle(order.begin(), order.end());
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const auto end = std::min(n, start + batch);
            const SparseMatrix xb = take_rows(x, order, start, end);
            yb.clear();
            for (auto i = start; i < end; ++i) yb.push_back(y[order[i]]);
            epoch_loss += mlp_loss(w, xb, yb, p.alpha, &g) * static_cast<double>(end - start);
            ++t;
            const double td = static_cast<double>(t);
            const double lr_t =
                p.learning_rate * std::sqrt(1.0 - std::pow(p.beta2, td)) / (1.0 - std::pow(p.beta1, td));
            a_w1.step(w.w1, g.w1, lr_t, p);
            a_b1.step(w.b1, g.b1, lr_t, p);
            a_w2.step(w.w2, g.w2, lr_t, p);
            a_b2.step(w.b2, g.b2, lr_t, p);
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) throw Error("NN: training diverged (non-finite loss)");
        if (epoch_loss > best_loss - p.tol)
            ++no_improvement;
        else
            no_improvement = 0;
        best_loss = std::min(best_loss, epoch_loss);
        if (no_improvement > p.n_iter_no_change) break;
    }
    return std::make_shared<MlpModel>(std::move(w));
}

}  // namespace detail

}  // namespace ttpbench
