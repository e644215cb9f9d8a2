#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "oracles.hpp"
#include "properties.hpp"
#include "synthetic.hpp"
#include "ttpbench/bm25.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/featurize.hpp"
#include "ttpbench/lsi.hpp"
#include "ttpbench/random.hpp"
#include "ttpbench/tfidf.hpp"

using namespace ttpbench;

namespace {

// Independent TF-IDF: the formula evaluated term by term over a fixed term list.
Eigen::MatrixXd oracle_tfidf(const std::vector<TokenList>& docs, const std::vector<std::string>& terms) {
    const double n = static_cast<double>(docs.size());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(terms.size()));
    for (std::size_t t = 0; t < terms.size(); ++t) {
        double df = 0;
        for (const auto& d : docs) df += std::count(d.begin(), d.end(), terms[t]) > 0;
        const double idf = std::log((1 + n) / (1 + df)) + 1;
        for (std::size_t i = 0; i < docs.size(); ++i)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
                static_cast<double>(std::count(docs[i].begin(), docs[i].end(), terms[t])) * idf;
    }
    for (Eigen::Index r = 0; r < x.rows(); ++r)
        if (x.row(r).norm() > 0) x.row(r) /= x.row(r).norm();
    return x;
}

struct SyntheticCorpus {
    AttackBundle bundle;
    AnnotationIndex annotations;
    LabeledCorpus corpus;
    PreparedCorpus prepared;
};

SyntheticCorpus synthetic_corpus(std::vector<int> sizes = {30, 24, 18}) {
    testing::SyntheticSpec spec;
    spec.class_sizes = sizes;
    const auto data = testing::make_synthetic(spec);
    SyntheticCorpus s;
    s.bundle = parse_attack_bundle(data.bundle_json);
    s.annotations = AnnotationIndex(parse_conllu(data.conllu));
    s.corpus = filter_min_support(s.bundle.records, 1);
    s.prepared = prepare_corpus(s.corpus, s.bundle.techniques, &s.annotations);
    return s;
}

}  // namespace

TEST_CASE("tfidf_fit vocabulary and document frequency") {
    const auto v = tfidf_fit({{"a", "b"}, {"b"}});
    CHECK(v.terms == std::vector<std::string>{"a", "b"});
    CHECK(v.df == std::vector<std::size_t>{1, 2});
    CHECK(v.n_docs == 2);
    CHECK(tfidf_fit({{"x", "x", "y"}}).df == std::vector<std::size_t>{1, 1});
    CHECK_THROWS_AS(tfidf_fit({{}, {}}), Error);
}

TEST_CASE("tfidf_transform examples") {
    const auto v = tfidf_fit({{"a", "b"}, {"b"}});
    CHECK(v.idf(0) == doctest::Approx(std::log(1.5) + 1).epsilon(1e-12));
    CHECK(v.idf(1) == doctest::Approx(1.0));
    const Eigen::MatrixXd x = Eigen::MatrixXd(tfidf_transform(v, {{"a", "b"}, {"b"}, {}, {"zzz"}}));
    CHECK(x(0, 0) == doctest::Approx(0.814802).epsilon(1e-6));
    CHECK(x(0, 1) == doctest::Approx(0.579739).epsilon(1e-6));
    CHECK(x(0, 1) == doctest::Approx(1.0 / std::hypot(std::log(1.5) + 1, 1.0)).epsilon(1e-12));
    CHECK(x(1, 1) == doctest::Approx(1.0));
    CHECK(x.row(2).norm() == 0.0);
    CHECK(x.row(3).norm() == 0.0);

    const auto single = tfidf_fit({{"p", "q", "r", "s"}});
    const Eigen::MatrixXd s = Eigen::MatrixXd(tfidf_transform(single, {{"p", "q", "r", "s"}}));
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(s(0, j) == doctest::Approx(0.5));
}

TEST_CASE("tfidf matches the scalar oracle and rows are unit norm") {
    Rng rng(2);
    std::vector<TokenList> docs(40);
    for (auto& d : docs)
        for (std::uint64_t i = 0, n = rng.below(9); i < n; ++i) d.push_back("t" + std::to_string(rng.below(25)));
    const auto v = tfidf_fit(docs);
    const Eigen::MatrixXd x = Eigen::MatrixXd(tfidf_transform(v, docs));
    CHECK((x - oracle_tfidf(docs, v.terms)).cwiseAbs().maxCoeff() < 1e-12);
    const auto prop = testing::check_tfidf_unit_norm();
    CHECK_MESSAGE(prop.ok, prop.detail);
}

TEST_CASE("truncated SVD small cases") {
    Eigen::MatrixXd d(2, 2);
    d << 3, 0, 0, 2;
    const auto svd = truncated_svd(to_sparse(d), 2);
    CHECK(svd.s[0] == doctest::Approx(3.0));
    CHECK(svd.s[1] == doctest::Approx(2.0));

    Rng rng(8);
    Eigen::MatrixXd a(20, 10);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
    const auto oracle = testing::jacobi_svd(a);
    const auto k5 = truncated_svd(to_sparse(a), 5);
    const double err = (a - k5.u * k5.s.asDiagonal() * k5.v.transpose()).norm();
    CHECK(err == doctest::Approx(oracle.s.tail(5).norm()).epsilon(1e-9));

    const auto full = truncated_svd(to_sparse(a), 10);
    CHECK((a - full.u * full.s.asDiagonal() * full.v.transpose()).norm() < 1e-6);
    CHECK_THROWS_AS(truncated_svd(to_sparse(a), 0), Error);
    CHECK_THROWS_AS(truncated_svd(to_sparse(a), 11), Error);
}

TEST_CASE("SVD orthonormality and oracle equivalence (exact and randomized paths)") {
    const auto r = testing::check_svd_orthonormal_and_oracle();
    CHECK_MESSAGE(r.ok, r.detail);
}

TEST_CASE("randomized SVD is deterministic under a seed") {
    Rng rng(4);
    Eigen::MatrixXd a(600, 80);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.uniform() < 0.1 ? rng.normal() : 0.0;
    SvdOptions o;
    o.seed = 12;
    const auto s1 = truncated_svd(to_sparse(a), 10, o);
    const auto s2 = truncated_svd(to_sparse(a), 10, o);
    CHECK(s1.v == s2.v);
    CHECK(s1.s == s2.s);
}

TEST_CASE("LSI model and projection") {
    CHECK(effective_topics(500, 10, 30) == 9);
    CHECK(effective_topics(5, 10, 30) == 5);
    CHECK(effective_topics(500, 1, 30) == 1);
    Rng rng(6);
    Eigen::MatrixXd a(30, 12);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = std::abs(rng.normal());
    const auto x = to_sparse(a);
    const auto model = lsi_fit(x, 12);
    CHECK((model.term_topic.transpose() * model.term_topic - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-6);
    for (Eigen::Index i = 1; i < 12; ++i) CHECK(model.singular_values[i] <= model.singular_values[i - 1]);
    const Eigen::MatrixXd proj = lsi_project(model, x);
    CHECK((proj * model.term_topic.transpose() - a).cwiseAbs().maxCoeff() < 1e-6);

    const auto oracle = testing::jacobi_svd(a);
    const auto k4 = lsi_fit(x, 4);
    const Eigen::MatrixXd p4 = lsi_project(k4, x);
    const Eigen::MatrixXd o4 = a * oracle.v.leftCols(4);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const double sign = p4.col(j).dot(o4.col(j)) < 0 ? -1.0 : 1.0;
        CHECK((p4.col(j) - sign * o4.col(j)).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(lsi_project(k4, SparseMatrix(2, 12)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(lsi_project(k4, SparseMatrix(2, 11)), Error);
    CHECK(cosine(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)) == 0.0);
}

TEST_CASE("LSI-Co features") {
    const std::vector<TokenList> techniques{{"use", "powershel", "script", "execut"}, {"delet", "shadow", "copi", "volum"}};
    const std::vector<TokenList> docs{{"use", "powershel", "script", "execut"}, {"delet", "shadow", "copi"}, {"powershel", "copi"}};
    const auto model = LsiCoModel::fit(docs, techniques, 500);
    const Eigen::MatrixXd f = model.transform(docs);
    CHECK(f(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(model.transform({{"unrelat", "word"}}).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.maxCoeff() <= 1.0 + 1e-12);
    CHECK(f.minCoeff() >= -1.0 - 1e-12);

    // Oracle: joint TF-IDF, Jacobi SVD with the same topic count, cosines.
    std::vector<TokenList> joint = docs;
    joint.insert(joint.end(), techniques.begin(), techniques.end());
    std::set<std::string> term_set;
    for (const auto& d : joint) term_set.insert(d.begin(), d.end());
    const std::vector<std::string> terms(term_set.begin(), term_set.end());
    const Eigen::MatrixXd x = oracle_tfidf(joint, terms);
    const auto svd = testing::jacobi_svd(x);
    const Eigen::Index k = effective_topics(500, x.rows(), x.cols());
    const Eigen::MatrixXd topics = x * svd.v.leftCols(k);
    for (Eigen::Index d = 0; d < 3; ++d)
        for (Eigen::Index j = 0; j < 2; ++j) {
            const auto a = topics.row(d), b = topics.row(3 + j);
            const double want = a.norm() == 0 || b.norm() == 0 ? 0.0 : a.dot(b) / (a.norm() * b.norm());
            CHECK(f(d, j) == doctest::Approx(want).epsilon(1e-9));
        }
}

TEST_CASE("BM25 scores") {
    const std::vector<TokenList> bags{{"use", "powershel", "script"}, {"delet", "shadow", "volum"}};
    const Eigen::MatrixXd f = bm25_features({{"use", "powershel"}, {"nope"}}, bags);
    // Hand evaluation: N=2, df=1 -> idf = ln(1.5/1.5 + 1) = ln 2; len_j = avglen = 3.
    const double idf = std::log(2.0);
    const double k1 = 1.5;
    const double per_term = idf * (1 * (k1 + 1)) / (1 + k1 * (1 - 0.75 + 0.75 * 1.0));
    CHECK(f(0, 0) == doctest::Approx(2 * per_term).epsilon(1e-12));
    CHECK(f(0, 1) == 0.0);
    CHECK(f.row(1).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::MatrixXd same = bm25_features({{"a", "b"}, {"b", "c", "c"}}, {{"a", "b", "c"}, {"a", "b", "c"}});
    CHECK(same.col(0) == same.col(1));
    CHECK(same.minCoeff() >= 0.0);

    Bm25Index index(bags, {1.2, 0.5});
    CHECK(index.idf("unseen") == 0.0);
    CHECK(index.size() == 2);
}

TEST_CASE("TFIDF-NP phrase terms") {
    auto np = [](std::vector<std::string> toks) {
        NounPhrase p;
        p.tokens = std::move(toks);
        return p;
    };
    const std::vector<std::vector<NounPhrase>> doc{{np({"encod", "powershel", "script"})}, {np({"script"})}};
    const std::set<std::string> keys{"encod powershel script", "script"};
    auto terms = phrase_terms(doc, keys);
    std::sort(terms.begin(), terms.end());
    CHECK(terms == TokenList{"encod powershel script", "script", "script"});
    CHECK(phrase_terms(doc, {"remot machin"}).empty());
}

TEST_CASE("featurizer on a synthetic corpus: all methods valid and deterministic") {
    const auto s = synthetic_corpus();
    REQUIRE(s.prepared.size() == 72);
    CHECK(s.prepared.annotated);
    for (const Method m : kAllMethods) {
        CAPTURE(method_name(m));
        const auto fm = build_features(m, s.prepared);
        CHECK(fm.rows() == 72);
        CHECK(fm.method_tag == m);
        CHECK_NOTHROW(fm.validate());
        const Eigen::MatrixXd d = Eigen::MatrixXd(fm.values);
        if (m == Method::TFIDF || m == Method::TFIDF_NP)
            for (Eigen::Index r = 0; r < d.rows(); ++r)
                if (d.row(r).norm() > 0) CHECK(d.row(r).norm() == doctest::Approx(1.0).epsilon(1e-9));
        if (m == Method::LSI_CO) {
            CHECK(fm.cols() == 3);
            CHECK(d.maxCoeff() <= 1.0 + 1e-12);
            CHECK(d.minCoeff() >= -1.0 - 1e-12);
        }
        if (m == Method::BM25) {
            CHECK(fm.cols() == 3);
            CHECK(d.minCoeff() >= 0.0);
        }
        const auto again = build_features(m, s.prepared);
        CHECK(Eigen::MatrixXd(again.values) == d);
    }
}

TEST_CASE("leakage guard: fitting on training rows only") {
    const auto s = synthetic_corpus();
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < s.prepared.size(); ++i) (i % 5 == 0 ? test : train).push_back(i);
    for (const Method m : kAllMethods) {
        Featurizer f(m, s.prepared);
        f.fit(train);
        const std::set<std::size_t> fitted(f.fit_rows().begin(), f.fit_rows().end());
        for (auto r : test) CHECK_FALSE(fitted.count(r));
        const auto fm = f.transform(test);
        CHECK(fm.rows() == static_cast<Eigen::Index>(test.size()));
    }
    // A term that appears only in test rows is not in a train-fitted vocabulary.
    PreparedCorpus p = s.prepared;
    p.tokens[test[0]].push_back("onlyintest");
    Featurizer tf(Method::TFIDF, p);
    tf.fit(train);
    const auto meta = tf.transform(test).col_meta;
    CHECK(std::find(meta.begin(), meta.end(), "onlyintest") == meta.end());
}

TEST_CASE("annotation-based methods require annotations") {
    const auto s = synthetic_corpus();
    const auto plain = prepare_corpus(s.corpus, s.bundle.techniques, nullptr);
    CHECK_FALSE(plain.annotated);
    CHECK_THROWS_AS(Featurizer(Method::BM25, plain), Error);
    CHECK_THROWS_AS(Featurizer(Method::TFIDF_NP, plain), Error);
    CHECK_NOTHROW(build_features(Method::TFIDF, plain));

    AnnotationIndex partial(parse_conllu("# doc_id = proc-0\n1\tx\tx\tNOUN\t_\t_\t0\troot\t_\t_\n\n"));
    CHECK_THROWS_WITH_AS(prepare_corpus(s.corpus, s.bundle.techniques, &partial), doctest::Contains("proc-"), Error);
}

TEST_CASE("method names") {
    CHECK(parse_method("M:LSI-Co") == Method::LSI_CO);
    CHECK(parse_method("tfidf_np") == Method::TFIDF_NP);
    CHECK(method_name(Method::BM25) == "BM25");
    CHECK_THROWS_AS(parse_method("word2vec"), Error);
    CHECK(needs_annotations(Method::BM25));
    CHECK_FALSE(needs_annotations(Method::LSI));
}

TEST_CASE(".fmx round-trip") {
    FeatureMatrix fm;
    Eigen::MatrixXd d(3, 4);
    d << 0, 1.5, 0, -2, 0, 0, 0, 0, 1e-300, 3, 0, 7;
    fm.values = to_sparse(d);
    fm.labels = {0, 1, 1};
    fm.label_set = {"T1059", "T1105"};
    fm.method_tag = Method::LSI;
    const auto path = (std::filesystem::temp_directory_path() / "ttpbench_test.fmx").string();
    write_fmx(path, fm);
    const auto back = read_fmx(path);
    CHECK(Eigen::MatrixXd(back.values) == d);
    CHECK(back.labels == fm.labels);
    CHECK(back.label_set == fm.label_set);
    CHECK(back.method_tag == Method::LSI);
    std::filesystem::remove(path);
}

TEST_CASE("FeatureMatrix validation") {
    FeatureMatrix fm;
    Eigen::MatrixXd d(2, 2);
    d << 1, std::nan(""), 0, 1;
    fm.values = d.sparseView();
    fm.labels = {0, 1};
    CHECK_THROWS_AS(fm.validate(), Error);
    fm.values = to_sparse(Eigen::MatrixXd::Identity(2, 2));
    fm.labels = {0};
    CHECK_THROWS_AS(fm.validate(), Error);
}
