#include "ttpbench/feature_matrix.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "ttpbench/error.hpp"

namespace ttpbench {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::TFIDF: return "TFIDF";
        case Method::LSI: return "LSI";
        case Method::LSI_CO: return "LSI_CO";
        case Method::TFIDF_NP: return "TFIDF_NP";
        case Method::BM25: return "BM25";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    std::string s(name);
    if (s.rfind("M:", 0) == 0) s = s.substr(2);
    for (auto& c : s) {
        if (c == '-') c = '_';
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    for (auto m : kAllMethods)
        if (method_name(m) == s) return m;
    throw Error("unknown method '" + std::string(name) + "'");
}

bool needs_annotations(Method m) { return m == Method::TFIDF_NP || m == Method::BM25; }

void FeatureMatrix::validate() const {
    if (static_cast<Eigen::Index>(labels.size()) != values.rows())
        throw Error("feature matrix: " + std::to_string(labels.size()) + " labels for " +
                    std::to_string(values.rows()) + " rows");
    const double* v = values.valuePtr();
    for (Eigen::Index i = 0; i < values.nonZeros(); ++i)
        if (!std::isfinite(v[i])) throw Error("feature matrix: non-finite value");
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& indices) const {
    FeatureMatrix out;
    out.method_tag = method_tag;
    out.label_set = label_set;
    out.col_meta = col_meta;
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(indices[r]);
        for (SparseMatrix::InnerIterator it(values, src); it; ++it)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
        if (!labels.empty()) out.labels.push_back(labels[indices[r]]);
    }
    out.values.resize(static_cast<Eigen::Index>(indices.size()), values.cols());
    out.values.setFromTriplets(trips.begin(), trips.end());
    out.values.makeCompressed();
    return out;
}

SparseMatrix to_sparse(const Eigen::MatrixXd& dense) {
    SparseMatrix s = dense.sparseView();
    s.makeCompressed();
    return s;
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom) {
    if (top.cols() != bottom.cols()) throw Error("vstack: column mismatch");
    SparseMatrix out(top.rows() + bottom.rows(), top.cols());
    out.reserve(top.nonZeros() + bottom.nonZeros());
    for (Eigen::Index r = 0; r < top.rows(); ++r) {
        out.startVec(r);
        for (SparseMatrix::InnerIterator it(top, r); it; ++it) out.insertBack(r, it.col()) = it.value();
    }
    for (Eigen::Index r = 0; r < bottom.rows(); ++r) {
        out.startVec(top.rows() + r);
        for (SparseMatrix::InnerIterator it(bottom, r); it; ++it)
            out.insertBack(top.rows() + r, it.col()) = it.value();
    }
    out.finalize();
    out.makeCompressed();
    return out;
}

namespace {


void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(const unsigned char* bytes) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_fmx(const std::string& path, const FeatureMatrix& fm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    nlohmann::json header = {
        {"format", "fmx/1"},
        {"method_tag", std::string(method_name(fm.method_tag))},
        {"rows", fm.rows()},
        {"cols", fm.cols()},
        {"label_set", fm.label_set},
        {"labels", fm.labels},
    };
    out << header.dump() << '\n';
    Eigen::VectorXd row(fm.cols());
    for (Eigen::Index r = 0; r < fm.rows(); ++r) {
        row.setZero();
        for (SparseMatrix::InnerIterator it(fm.values, r); it; ++it) row[it.col()] = it.value();
        for (Eigen::Index c = 0; c < fm.cols(); ++c) put_f64(out, row[c]);
    }
}

FeatureMatrix read_fmx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("fmx header: " + std::string(e.what()), e.byte);
    }
    if (header.value("format", "") != "fmx/1") throw ParseError("fmx: unsupported format", 0);
    FeatureMatrix fm;
    fm.method_tag = parse_method(header.at("method_tag").get<std::string>());
    const auto rows = header.at("rows").get<Eigen::Index>();
    const auto cols = header.at("cols").get<Eigen::Index>();
    fm.label_set = header.at("label_set").get<std::vector<std::string>>();
    fm.labels = header.at("labels").get<std::vector<int>>();
    std::vector<unsigned char> payload(static_cast<std::size_t>(rows * cols * 8));
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (in.gcount() != static_cast<std::streamsize>(payload.size())) throw ParseError("fmx: truncated payload", 0);
    Eigen::MatrixXd dense(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            dense(r, c) = get_f64(payload.data() + 8 * (r * cols + c));
    fm.values = to_sparse(dense);
    fm.validate();
    return fm;
}

}  // namespace ttpbench
