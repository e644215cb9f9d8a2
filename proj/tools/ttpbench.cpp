#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ttpbench/attack_ingest.hpp"
#include "ttpbench/config.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/featurize.hpp"
#include "ttpbench/grid.hpp"
#include "ttpbench/report.hpp"

namespace fs = std::filesystem;
using namespace ttpbench;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

// One JSON object per line: procedures first, then technique descriptions.
void write_parser_input(const fs::path& path, const AttackBundle& bundle) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& r : bundle.records)
        out << nlohmann::json{{"doc_id", r.doc_id}, {"text", r.text}}.dump() << '\n';
    for (const auto& t : bundle.techniques)
        out << nlohmann::json{{"doc_id", t.technique_id}, {"text", t.description}}.dump() << '\n';
}

int cmd_ingest(const std::string& bundle_path, const std::string& out_dir, int min_support, bool keep_sub) {
    IngestOptions opts;
    opts.collapse_subtechniques = !keep_sub;
    const auto bundle = load_attack_bundle(bundle_path, opts);
    if (bundle.records.empty()) throw Error(bundle_path + ": no procedure records found");
    std::cout << bundle.records.size() << " procedure records / " << count_distinct_techniques(bundle.records)
              << " techniques (all)\n";
    const auto corpus = filter_min_support(bundle.records, static_cast<std::size_t>(min_support));
    std::cout << corpus.records.size() << " descriptions / " << corpus.label_set.size()
              << " techniques (min_support=" << min_support << ")\n";
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_corpus_csv((fs::path(out_dir) / "corpus.csv").string(), bundle.records);
        write_text(fs::path(out_dir) / "skips.txt", bundle.skips.render());
        write_parser_input(fs::path(out_dir) / "parser_input.jsonl", bundle);
        std::cout << "wrote corpus.csv, skips.txt, parser_input.jsonl to " << out_dir << "\n";
    }
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::string& seed) {
    auto config = load_grid_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!seed.empty()) config.seed = std::stoull(seed);
    config.validate();
    for (const auto& m : config.methods)
        if (needs_annotations(parse_method(m)) && config.conllu_path.empty())
            throw Error("method " + m + " needs dependency annotations; set conllu_path in the config");
    if (!fs::exists(config.bundle_path)) throw Error("bundle not found: " + config.bundle_path);
    if (!config.conllu_path.empty() && !fs::exists(config.conllu_path))
        throw Error("annotations not found: " + config.conllu_path);

    const auto loaded = load_inputs(config);
    GridHooks hooks;
    hooks.log = [](const std::string& msg) { std::cerr << msg << std::endl; };
    const auto outcome = run_grid(loaded.inputs, config, hooks);
    std::cout << outcome.computed << " cells computed, " << outcome.resumed << " resumed, " << outcome.failures.size()
              << " failed; results in " << (fs::path(config.out_dir) / "results.csv").string() << "\n";
    for (const auto& f : outcome.failures)
        std::cerr << "failed " << f.key.method << "/" << f.key.classifier << "/n=" << f.key.n << "/"
                  << f.key.oversampled << "/fold " << f.key.fold << ": " << f.reason << "\n";
    return outcome.failures.empty() ? 0 : 2;
}

int cmd_report(const std::string& results_path, const std::string& mode, const std::string& oversampled) {
    if (!fs::exists(results_path)) throw Error("results not found: " + results_path);
    const auto results = read_results(results_path);
    if (results.empty()) throw Error(results_path + " has no results");
    if (mode == "table4")
        std::cout << render_table4(results, oversampled);
    else if (mode == "table5")
        std::cout << render_table5(results);
    else
        std::cout << render_boxplot_data(results);
    return 0;
}

int cmd_features(const std::string& config_path, const std::string& method_name, int n, const std::string& out) {
    const auto config = load_grid_config(config_path);
    const auto method = parse_method(method_name);
    const auto loaded = load_inputs(config);
    if (needs_annotations(method) && !loaded.annotations)
        throw Error("method " + std::string(ttpbench::method_name(method)) + " needs dependency annotations");
    const auto slice = select_top_n(loaded.inputs.corpus, static_cast<std::size_t>(n));
    const auto prepared = prepare_corpus(slice, loaded.inputs.techniques,
                                         needs_annotations(method) ? loaded.annotations.get() : nullptr);
    FeatureParams fp;
    fp.num_topics = config.num_topics;
    fp.bm25 = {config.bm25_k1, config.bm25_b};
    fp.seed = config.seed;
    const auto fm = build_features(method, prepared, fp);
    write_fmx(out, fm);
    std::cout << fm.rows() << " x " << fm.cols() << " written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark TTP classification methods on ATT&CK procedure descriptions"};
    app.require_subcommand(1);

    std::string bundle_path, ingest_out;
    int min_support = 30;
    bool keep_sub = false;
    auto* ingest = app.add_subcommand("ingest", "Parse a STIX bundle into a labeled corpus");
    ingest->add_option("bundle", bundle_path, "ATT&CK enterprise STIX bundle (JSON)")->required();
    ingest->add_option("--out", ingest_out, "Directory for corpus.csv, skips.txt and parser_input.jsonl");
    ingest->add_option("--min-support", min_support, "Minimum records per technique")->check(CLI::PositiveNumber);
    ingest->add_flag("--keep-subtechniques", keep_sub, "Do not fold sub-techniques into their parent");

    std::string config_path, run_out, seed;
    auto* run = app.add_subcommand("run", "Run the evaluation grid");
    run->add_option("--config", config_path, "Grid configuration (JSON)")->required();
    run->add_option("--out", run_out, "Override out_dir");
    run->add_option("--seed", seed, "Override seed");

    std::string results_path, mode = "table4", oversampled = "none";
    auto* report = app.add_subcommand("report", "Summarize results.csv");
    report->add_option("results", results_path, "results.csv from `run`")->required();
    report->add_option("--mode", mode, "table4, table5 or boxplot-data")
        ->check(CLI::IsMember({"table4", "table5", "boxplot-data"}));
    report->add_option("--oversampled", oversampled, "Oversampling mode shown by table4");

    std::string feat_config, feat_method, feat_out;
    int feat_n = 2;
    auto* features = app.add_subcommand("features", "Write one feature matrix as .fmx");
    features->add_option("--config", feat_config, "Grid configuration (JSON)")->required();
    features->add_option("--method", feat_method, "Feature method")->required();
    features->add_option("--n", feat_n, "Number of top techniques")->check(CLI::IsMember({2, 4, 8, 16, 32, 64}));
    features->add_option("--out", feat_out, "Output .fmx path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*ingest) return cmd_ingest(bundle_path, ingest_out, min_support, keep_sub);
        if (*run) return cmd_run(config_path, run_out, seed);
        if (*report) return cmd_report(results_path, mode, oversampled);
        if (*features) return cmd_features(feat_config, feat_method, feat_n, feat_out);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << " (at " << e.position() << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
