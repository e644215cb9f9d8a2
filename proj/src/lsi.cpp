#include "ttpbench/lsi.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "ttpbench/error.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

void fix_signs(TruncatedSvd& svd) {
    for (Eigen::Index c = 0; c < svd.v.cols(); ++c) {
        Eigen::Index arg = 0;
        svd.v.col(c).cwiseAbs().maxCoeff(&arg);
        if (svd.v(arg, c) < 0) {
            svd.v.col(c) *= -1.0;
            svd.u.col(c) *= -1.0;
        }
    }
}

TruncatedSvd dense_svd(const Eigen::MatrixXd& a, Eigen::Index k) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    const Eigen::Index r = std::min<Eigen::Index>(k, svd.singularValues().size());
    out.u = svd.matrixU().leftCols(r);
    out.s = svd.singularValues().head(r);
    out.v = svd.matrixV().leftCols(r);
    return out;
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& x, Eigen::Index k, const SvdOptions& options) {
    if (k < 1) throw Error("truncated_svd: k must be >= 1");
    const Eigen::Index m = x.rows();
    const Eigen::Index n = x.cols();
    const Eigen::Index min_dim = std::min(m, n);
    if (k > min_dim) throw Error("truncated_svd: k=" + std::to_string(k) + " exceeds min(rows, cols)=" + std::to_string(min_dim));

    const Eigen::Index width = std::min<Eigen::Index>(k + options.oversampling, min_dim);
    TruncatedSvd out;
    if ((m < options.exact_below && n < options.exact_below) || width >= min_dim) {
        out = dense_svd(Eigen::MatrixXd(x), k);
    } else {
        Rng rng(options.seed);
        Eigen::MatrixXd omega(n, width);
        for (Eigen::Index j = 0; j < width; ++j)
            for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = rng.normal();
        const SparseMatrix xt = x.transpose();
        Eigen::MatrixXd q = orthonormal_basis(x * omega);
        for (int it = 0; it < options.power_iterations; ++it) {
            Eigen::MatrixXd z = orthonormal_basis(xt * q);
            q = orthonormal_basis(x * z);
        }
        // B = Q^T X, computed as (X^T Q)^T to stay in sparse * dense form.
        Eigen::MatrixXd b = (xt * q).transpose();
        TruncatedSvd small = dense_svd(b, k);
        out.u = q * small.u;
        out.s = std::move(small.s);
        out.v = std::move(small.v);
    }
    fix_signs(out);
    return out;
}

Eigen::Index effective_topics(Eigen::Index requested, Eigen::Index rows, Eigen::Index cols) {
    return std::max<Eigen::Index>(1, std::min(requested, std::min(rows, cols) - 1));
}

LsiModel lsi_fit(const SparseMatrix& tfidf, Eigen::Index k, const SvdOptions& options) {
    if (k < 1) throw Error("lsi_fit: k must be >= 1");
    auto svd = truncated_svd(tfidf, k, options);
    LsiModel model;
    model.k = svd.s.size();
    model.term_topic = std::move(svd.v);
    model.singular_values = std::move(svd.s);
    return model;
}

Eigen::MatrixXd lsi_project(const LsiModel& model, const SparseMatrix& tfidf_rows) {
    if (tfidf_rows.cols() != model.term_topic.rows())
        throw Error("lsi_project: rows have " + std::to_string(tfidf_rows.cols()) + " columns, model expects " +
                    std::to_string(model.term_topic.rows()));
    return tfidf_rows * model.term_topic;
}

double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

LsiCoModel LsiCoModel::fit(const std::vector<TokenList>& docs, const std::vector<TokenList>& techniques,
                           Eigen::Index num_topics, const SvdOptions& options) {
    std::vector<TokenList> joint = docs;
    joint.insert(joint.end(), techniques.begin(), techniques.end());
    LsiCoModel model;
    model.vocab_ = tfidf_fit(joint);
    const SparseMatrix x = tfidf_transform(model.vocab_, joint);
    model.lsi_ = lsi_fit(x, effective_topics(num_topics, x.rows(), x.cols()), options);
    model.technique_topics_ = lsi_project(model.lsi_, tfidf_transform(model.vocab_, techniques));
    return model;
}

Eigen::MatrixXd LsiCoModel::transform(const std::vector<TokenList>& docs) const {
    const Eigen::MatrixXd topics = lsi_project(lsi_, tfidf_transform(vocab_, docs));
    Eigen::MatrixXd out(topics.rows(), technique_topics_.rows());
    for (Eigen::Index d = 0; d < topics.rows(); ++d)
        for (Eigen::Index j = 0; j < technique_topics_.rows(); ++j)
            out(d, j) = cosine(topics.row(d).transpose(), technique_topics_.row(j).transpose());
    return out;
}

}  // namespace ttpbench
