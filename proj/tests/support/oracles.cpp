#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ttpbench/random.hpp"

namespace ttpbench::testing {

JacobiSvd jacobi_svd(const Eigen::MatrixXd& a, int max_sweeps) {
    const bool wide = a.cols() > a.rows();
    Eigen::MatrixXd w = wide ? Eigen::MatrixXd(a.transpose()) : a;
    const Eigen::Index n = w.cols();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (Eigen::Index i = 0; i < w.rows(); ++i) {
                    alpha += w(i, p) * w(i, p);
                    beta += w(i, q) * w(i, q);
                    gamma += w(i, p) * w(i, q);
                }
                if (gamma == 0.0) continue;
                off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index i = 0; i < w.rows(); ++i) {
                    const double wp = w(i, p), wq = w(i, q);
                    w(i, p) = c * wp - s * wq;
                    w(i, q) = s * wp + c * wq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (off < 1e-15) break;
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Eigen::VectorXd norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms[j] = w.col(j).norm();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return norms[x] > norms[y]; });
    JacobiSvd out;
    out.s.resize(n);
    out.u.resize(w.rows(), n);
    out.v.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto src = order[static_cast<std::size_t>(j)];
        out.s[j] = norms[src];
        out.u.col(j) = norms[src] > 0 ? Eigen::VectorXd(w.col(src) / norms[src]) : Eigen::VectorXd::Zero(w.rows());
        out.v.col(j) = v.col(src);
    }
    if (wide) std::swap(out.u, out.v);
    return out;
}

BrutePrf brute_macro_prf(const std::vector<int>& y_true, const std::vector<int>& y_pred, int n_classes) {
    BrutePrf out{0, 0, 0};
    for (int c = 0; c < n_classes; ++c) {
        int tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            if (y_pred[i] == c && y_true[i] == c) ++tp;
            if (y_pred[i] == c && y_true[i] != c) ++fp;
            if (y_pred[i] != c && y_true[i] == c) ++fn;
        }
        const double p = tp + fp ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double r = tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0;
        out.precision += p;
        out.recall += r;
        out.f1 += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    out.precision /= n_classes;
    out.recall /= n_classes;
    out.f1 /= n_classes;
    return out;
}

double pair_macro_auc(const std::vector<int>& y_true, const Eigen::MatrixXd& scores) {
    double total = 0.0;
    int used = 0;
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
        double credit = 0.0, pairs = 0.0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            if (y_true[i] != c) continue;
            for (std::size_t j = 0; j < y_true.size(); ++j) {
                if (y_true[j] == c) continue;
                const double a = scores(static_cast<Eigen::Index>(i), c);
                const double b = scores(static_cast<Eigen::Index>(j), c);
                credit += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
                pairs += 1.0;
            }
        }
        if (pairs == 0.0) continue;
        total += credit / pairs;
        ++used;
    }
    return total / used;
}

FeatureMatrix make_blobs(int per_class, double separation, int dims, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(2 * per_class, dims);
    FeatureMatrix fm;
    for (int i = 0; i < 2 * per_class; ++i) {
        const int label = i % 2;
        for (int d = 0; d < dims; ++d) x(i, d) = rng.normal();
        x(i, 0) += label == 0 ? -separation / 2 : separation / 2;
        fm.labels.push_back(label);
    }
    fm.values = to_sparse(x);
    fm.label_set = {"a", "b"};
    return fm;
}

FeatureMatrix make_blobs(const std::vector<int>& class_sizes, double separation, int dims, std::uint64_t seed) {
    Rng rng(seed);
    int total = 0;
    for (int s : class_sizes) total += s;
    Eigen::MatrixXd x(total, dims);
    FeatureMatrix fm;
    int i = 0;
    for (std::size_t c = 0; c < class_sizes.size(); ++c) {
        for (int j = 0; j < class_sizes[c]; ++j, ++i) {
            for (int d = 0; d < dims; ++d) x(i, d) = rng.normal();
            x(i, static_cast<int>(c) % dims) += separation * (1.0 + static_cast<double>(c) / static_cast<double>(dims));
            fm.labels.push_back(static_cast<int>(c));
        }
        fm.label_set.push_back("c" + std::to_string(c));
    }
    fm.values = to_sparse(x);
    return fm;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) ok += truth[i] == predicted[i];
    return static_cast<double>(ok) / static_cast<double>(truth.size());
}

}  // namespace ttpbench::testing
