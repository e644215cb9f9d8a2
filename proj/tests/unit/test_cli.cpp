#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthetic.hpp"
#include "ttpbench/config.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/report.hpp"

using namespace ttpbench;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run_cli(const std::string& args) {
    const std::string cmd = std::string("TTPBENCH_WORKERS=1 \"") + TTPBENCH_CLI + "\" " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ttpbench_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<CellResult> two_method_results() {
    std::vector<CellResult> rs;
    const double f1s[] = {0.60, 0.70, 0.80};
    int i = 0;
    for (int n : {2, 4, 8}) {
        for (int fold = 0; fold < 2; ++fold) {
            const double f = f1s[i];
            rs.push_back({{"TFIDF", "KNN", n, "none", fold}, f, f, f, 0.9});
            rs.push_back({{"TFIDF", "KNN", n, "full_dataset", fold}, f + 0.1, f + 0.1, f + 0.1, 0.95});
            rs.push_back({{"LSI", "SVM", n, "none", fold}, 0.5, 0.5, 0.5, 0.8});
        }
        ++i;
    }
    return rs;
}

}  // namespace

TEST_CASE("config defaults and round-trip") {
    const auto c = parse_grid_config(R"({"bundle_path": "b.json"})");
    CHECK(c.methods == std::vector<std::string>{"TFIDF"});
    CHECK(c.K == 5);
    CHECK(c.seed == 0);
    CHECK(c.min_support == 30);
    CHECK(c.num_topics == 500);
    CHECK(c.smote_k == 6);
    CHECK(c.bm25_k1 == 1.5);
    CHECK(c.bm25_b == 0.75);

    const auto full = parse_grid_config(R"({"bundle_path": "b.json", "conllu_path": "a.conllu",
        "methods": ["TFIDF", "M:LSI-Co", "bm25"], "classifiers": ["knn", "RF"], "n_list": [2, 64],
        "oversample_modes": ["none", "train_only"], "K": 3, "seed": 9, "out_dir": "o"})");
    CHECK(full.methods == std::vector<std::string>{"TFIDF", "LSI_CO", "BM25"});
    CHECK(full.classifiers == std::vector<std::string>{"KNN", "RF"});
    CHECK(parse_grid_config(serialize_grid_config(full)) == full);
    CHECK(parse_grid_config(serialize_grid_config(c)) == c);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_grid_config("{}"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "methods": ["doc2vec"]})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "classifiers": ["XGB"]})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "n_list": [3]})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "n_list": []})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "methods": ["LSI", "lsi"]})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "K": "five"})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "typo_key": 1})"), Error);
    CHECK_THROWS_AS(parse_grid_config(R"({"bundle_path": "b", "oversample_modes": ["always"]})"), Error);
    CHECK_THROWS_AS(parse_grid_config("not json"), Error);
}

TEST_CASE("gain arithmetic") {
    CHECK(gain_percent(72, 92) == 28);
    CHECK(gain_percent(89, 97) == 9);
    CHECK(gain_percent(62, 82) == 32);
    CHECK(gain_percent(87, 95) == 9);
    CHECK(gain_percent(91, 96) == 5);
    CHECK(gain_percent(46, 68) == 48);
    CHECK(gain_percent(88, 95) == 8);
    // 100 * 18 / 71 = 25.35 and 100 * 22 / 60 = 36.67; the formula gives 25 and 37
    CHECK(gain_percent(71, 89) == 25);
    CHECK(gain_percent(60, 82) == 37);
    CHECK(gain_percent(50, 40) == -20);
    CHECK_THROWS_AS(gain_percent(0, 10), Error);
}

TEST_CASE("table4 rendering") {
    const auto rs = two_method_results();
    const auto t = render_table4(rs);
    CHECK(t.find("| Method | Classifier | Precision | Recall | F1 | AUC |") != std::string::npos);
    CHECK(t.find("| M:TFIDF | KNN | 60-80(70) | 60-80(70) | 60-80(70) | 90-90(90) |") != std::string::npos);
    CHECK(t.find("| M:LSI | SVM | 50-50(50)") != std::string::npos);
    const auto over = render_table4(rs, "full_dataset");
    CHECK(over.find("70-90(80)") != std::string::npos);
    CHECK(over.find("M:LSI") == std::string::npos);

    const auto single = render_table4({{{"BM25", "NB", 2, "none", 0}, 0.4, 0.5, 0.45, 0.7}});
    CHECK(single.find("| M:BM25 | NB | 40-40(40) | 50-50(50) | 45-45(45) | 70-70(70) |") != std::string::npos);
}

TEST_CASE("table5 and boxplot data") {
    const auto rs = two_method_results();
    const auto t5 = render_table5(rs);
    // TFIDF F1: no 70, yes 80 -> 14
    CHECK(t5.find("| M:TFIDF | F1 | 70 | 80 | 14 |") != std::string::npos);
    CHECK(t5.find("| M:TFIDF | AUC | 90 | 95 | 6 |") != std::string::npos);

    const auto box = render_boxplot_data(rs);
    std::istringstream in(box);
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,classifier,n,oversampled,metric,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9 * 4);
    CHECK(box.find("TFIDF,KNN,2,none,f1,0.600000") != std::string::npos);
}

TEST_CASE("fold means") {
    const auto means = fold_means(two_method_results());
    CHECK(means.size() == 9);
    for (const auto& m : means) CHECK(m.f1 >= 0.0);
}

TEST_CASE("cli ingest") {
    TempDir dir("ingest");
    const auto r = run_cli("ingest " + q(fs::path(TTPBENCH_FIXTURES) / "mini_bundle.json") + " --min-support 1 --out " +
                           q(dir.path));
    CHECK(r.code == 0);
    CHECK(r.output.find("1 procedure records / 1 techniques (all)") != std::string::npos);
    CHECK(r.output.find("1 descriptions / 1 techniques (min_support=1)") != std::string::npos);
    CHECK(fs::exists(dir.path / "corpus.csv"));
    CHECK(fs::exists(dir.path / "parser_input.jsonl"));

    write_file(dir.path / "empty.json", R"({"type": "bundle", "id": "bundle--e", "objects": []})");
    const auto e = run_cli("ingest " + q(dir.path / "empty.json"));
    CHECK(e.code == 1);
    CHECK(e.output.find("error") != std::string::npos);
    write_file(dir.path / "broken.json", "{\"objects\": [");
    CHECK(run_cli("ingest " + q(dir.path / "broken.json")).code == 1);
    CHECK(run_cli("ingest " + q(dir.path / "missing.json")).code == 1);
    CHECK(run_cli("").code == 1);
}

TEST_CASE("cli run, resume and report") {
    TempDir dir("run");
    testing::SyntheticSpec spec;
    spec.class_sizes = {40, 30, 24};
    testing::write_synthetic(testing::make_synthetic(spec), dir.path.string());
    const auto out = dir.path / "out";
    write_file(dir.path / "minimal.json", R"({"bundle_path": ")" + (dir.path / "bundle.json").string() +
                                              R"(", "min_support": 15, "out_dir": ")" + out.string() + R"("})");
    const auto first = run_cli("run --config " + q(dir.path / "minimal.json"));
    CHECK(first.code == 0);
    CHECK(first.output.find("5 cells computed, 0 resumed, 0 failed") != std::string::npos);
    std::ifstream csv(out / "results.csv");
    int lines = 0;
    for (std::string l; std::getline(csv, l);) ++lines;
    CHECK(lines == 6);

    const auto again = run_cli("run --config " + q(dir.path / "minimal.json"));
    CHECK(again.code == 0);
    CHECK(again.output.find("0 cells computed, 5 resumed") != std::string::npos);

    const auto t4 = run_cli("report " + q(out / "results.csv") + " --mode table4");
    CHECK(t4.code == 0);
    CHECK(t4.output.find("| M:TFIDF | KNN |") != std::string::npos);
    CHECK(run_cli("report " + q(out / "results.csv") + " --mode boxplot-data").code == 0);
    CHECK(run_cli("report " + q(out / "results.csv") + " --mode pie").code == 1);

    write_file(dir.path / "empty.csv", std::string(kResultsHeader) + "\n");
    CHECK(run_cli("report " + q(dir.path / "empty.csv")).code == 1);

    write_file(dir.path / "unknown.json", R"({"bundle_path": ")" + (dir.path / "bundle.json").string() +
                                              R"(", "methods": ["GloVe"], "out_dir": ")" + (dir.path / "o2").string() + R"("})");
    CHECK(run_cli("run --config " + q(dir.path / "unknown.json")).code == 1);
    CHECK_FALSE(fs::exists(dir.path / "o2"));

    write_file(dir.path / "bm25.json", R"({"bundle_path": ")" + (dir.path / "bundle.json").string() +
                                           R"(", "methods": ["BM25"], "min_support": 15, "out_dir": ")" +
                                           (dir.path / "o3").string() + R"("})");
    const auto noann = run_cli("run --config " + q(dir.path / "bm25.json"));
    CHECK(noann.code == 1);
    CHECK(noann.output.find("BM25") != std::string::npos);

    write_file(dir.path / "fail.json", R"({"bundle_path": ")" + (dir.path / "bundle.json").string() +
                                           R"(", "K": 35, "min_support": 15, "out_dir": ")" +
                                           (dir.path / "o4").string() + R"("})");
    const auto partial = run_cli("run --config " + q(dir.path / "fail.json"));
    CHECK(partial.code == 2);
    CHECK(fs::exists(dir.path / "o4" / "failures.csv"));
}
