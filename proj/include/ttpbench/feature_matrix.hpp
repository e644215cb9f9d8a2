#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ttpbench {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Method { TFIDF, LSI, LSI_CO, TFIDF_NP, BM25 };

inline constexpr Method kAllMethods[] = {Method::TFIDF, Method::TFIDF_NP, Method::LSI, Method::LSI_CO, Method::BM25};

std::string_view method_name(Method m);
/// Accepts "TFIDF", "LSI", "LSI_CO", "TFIDF_NP", "BM25" (also with '-' and an
/// optional "M:" prefix). Throws Error on anything else.
Method parse_method(std::string_view name);
bool needs_annotations(Method m);

/// Rows are documents, columns are method-specific features. Stored as CSR
/// so sparse TF-IDF and dense topic/score features share one representation.
struct FeatureMatrix {
    SparseMatrix values;
    std::vector<int> labels;
    Method method_tag = Method::TFIDF;
    std::vector<std::string> label_set;
    std::vector<std::string> col_meta;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    /// Throws when labels and rows disagree or a value is not finite.
    void validate() const;

    /// Rows `indices` in order, labels carried along.
    FeatureMatrix select_rows(const std::vector<std::size_t>& indices) const;
};

SparseMatrix to_sparse(const Eigen::MatrixXd& dense);

/// Row-stack matrices with the same column count.
SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom);

/// `.fmx`: one line of JSON {"format","method_tag","rows","cols","label_set",
/// "labels"} then rows*cols little-endian f64 in row-major order.
void write_fmx(const std::string& path, const FeatureMatrix& fm);
FeatureMatrix read_fmx(const std::string& path);

}  // namespace ttpbench
