#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ttpbench/feature_matrix.hpp"
#include "ttpbench/tfidf.hpp"

namespace ttpbench {

struct SvdOptions {
    int oversampling = 10;
    int power_iterations = 4;
    std::uint64_t seed = 0;
    /// Matrices with both dimensions below this use an exact dense SVD.
    Eigen::Index exact_below = 500;
};

/// Rank-k factorisation X ~= U * diag(s) * V^T, singular values descending.
struct TruncatedSvd {
    Eigen::MatrixXd u;
    Eigen::VectorXd s;
    Eigen::MatrixXd v;
};

/// Randomized range finder with power iterations (Halko, Martinsson & Tropp),
/// or an exact dense SVD for small inputs. Singular vector signs are fixed so
/// that the largest-magnitude entry of every column of V is positive.
TruncatedSvd truncated_svd(const SparseMatrix& x, Eigen::Index k, const SvdOptions& options = {});

struct LsiModel {
    Eigen::Index k = 0;
    Eigen::MatrixXd term_topic;        // |V| x k, orthonormal columns
    Eigen::VectorXd singular_values;   // k, nonincreasing
};

/// Topic count used when the caller asks for `requested`: capped at
/// min(rows, cols) - 1 and floored at 1.
Eigen::Index effective_topics(Eigen::Index requested, Eigen::Index rows, Eigen::Index cols);

LsiModel lsi_fit(const SparseMatrix& tfidf, Eigen::Index k, const SvdOptions& options = {});

/// rows * term_topic. Throws on a column count mismatch.
Eigen::MatrixXd lsi_project(const LsiModel& model, const SparseMatrix& tfidf_rows);

/// Cosine similarity with 0 for a zero vector on either side.
double cosine(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

/// Technique-similarity features: documents and technique descriptions share
/// one TF-IDF vocabulary and one LSI space; feature j of a document is the
/// cosine between its topic vector and technique j's topic vector.
class LsiCoModel {
public:
    static LsiCoModel fit(const std::vector<TokenList>& docs, const std::vector<TokenList>& techniques,
                          Eigen::Index num_topics, const SvdOptions& options = {});

    /// rows = docs, cols = techniques (in the order given to fit).
    Eigen::MatrixXd transform(const std::vector<TokenList>& docs) const;

    const Vocabulary& vocabulary() const { return vocab_; }
    const LsiModel& lsi() const { return lsi_; }

private:
    Vocabulary vocab_;
    LsiModel lsi_;
    Eigen::MatrixXd technique_topics_;  // techniques x k
};

}  // namespace ttpbench
