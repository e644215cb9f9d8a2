#include "ttpbench/grid.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "ttpbench/csv.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/learners.hpp"
#include "ttpbench/random.hpp"
#include "ttpbench/sampling.hpp"

namespace ttpbench {

namespace {

std::string key_string(const CellKey& k) {
    return k.method + "/" + k.classifier + "/" + std::to_string(k.n) + "/" + k.oversampled + "/" +
           std::to_string(k.fold);
}

struct Job {
    int n;
    std::string method;
    std::string mode;
    std::vector<CellKey> pending;
};

void write_failures(const std::string& path, std::vector<CellFailure> failures) {
    std::sort(failures.begin(), failures.end(), [](const CellFailure& a, const CellFailure& b) { return a.key < b.key; });
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << "method,classifier,n,oversampled,fold,reason\n";
    for (const auto& f : failures) {
        csv::write_row(out, {f.key.method, f.key.classifier, std::to_string(f.key.n), f.key.oversampled,
                             std::to_string(f.key.fold), f.reason});
    }
}

CellResult evaluate(const CellKey& key, const FeatureMatrix& train_set, const FeatureMatrix& test_set,
                    std::uint64_t seed) {
    LearnerSpec spec;
    spec.kind = parse_learner(key.classifier);
    spec.seed = derive_seed(seed, "learner/" + key_string(key));
    const auto model = train(spec, train_set);
    const Eigen::MatrixXd scores = model.predict_scores(test_set.values);
    const auto predicted = argmax_rows(scores);
    const auto prf = macro_prf(confusion(test_set.labels, predicted, model.n_classes()));
    CellResult r;
    r.key = key;
    r.precision = prf.precision;
    r.recall = prf.recall;
    r.f1 = prf.f1;
    r.auc = macro_auc(test_set.labels, scores);
    return r;
}

}  // namespace

LoadedInputs load_inputs(const GridConfig& config) {
    LoadedInputs out;
    out.bundle = load_attack_bundle(config.bundle_path);
    if (!config.conllu_path.empty())
        out.annotations = std::make_unique<AnnotationIndex>(read_conllu(config.conllu_path));
    out.inputs.corpus = filter_min_support(out.bundle.records, static_cast<std::size_t>(config.min_support));
    out.inputs.techniques = out.bundle.techniques;
    out.inputs.annotations = out.annotations.get();
    return out;
}

std::vector<CellKey> grid_cells(const GridConfig& config) {
    std::vector<CellKey> out;
    for (const auto& m : config.methods)
        for (const auto& c : config.classifiers)
            for (int n : config.n_list)
                for (const auto& o : config.oversample_modes)
                    for (int f = 0; f < config.K; ++f) out.push_back({m, c, n, o, f});
    std::sort(out.begin(), out.end());
    return out;
}

unsigned worker_count() {
    if (const char* env = std::getenv("TTPBENCH_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

GridOutcome run_grid(const GridInputs& inputs, const GridConfig& config, const GridHooks& hooks) {
    config.validate();
    for (const auto& m : config.methods)
        if (needs_annotations(parse_method(m)) && !inputs.annotations)
            throw Error("method " + m + " needs dependency annotations; set conllu_path");
    for (const auto& o : config.oversample_modes) parse_oversample(o);

    auto log = [&](const std::string& msg) {
        if (hooks.log) hooks.log(msg);
    };

    std::filesystem::create_directories(config.out_dir);
    const std::string results_path = (std::filesystem::path(config.out_dir) / "results.csv").string();
    const std::string failures_path = (std::filesystem::path(config.out_dir) / "failures.csv").string();

    GridOutcome outcome;
    std::map<CellKey, CellResult> store;
    for (auto& r : read_results(results_path)) store[r.key] = r;

    std::map<std::tuple<int, std::string, std::string>, Job> jobs;
    for (const auto& key : grid_cells(config)) {
        if (store.count(key)) {
            ++outcome.resumed;
            continue;
        }
        auto& job = jobs[{key.n, key.method, key.oversampled}];
        job.n = key.n;
        job.method = key.method;
        job.mode = key.oversampled;
        job.pending.push_back(key);
    }
    log(std::to_string(outcome.resumed) + " cells already done, " + std::to_string(jobs.size()) + " jobs to run");

    std::set<int> needed_n;
    for (const auto& [k, job] : jobs) needed_n.insert(job.n);
    bool want_annotations = false;
    for (const auto& [k, job] : jobs) want_annotations |= needs_annotations(parse_method(job.method));
    std::map<int, PreparedCorpus> prepared;
    for (int n : needed_n) {
        const auto slice = select_top_n(inputs.corpus, static_cast<std::size_t>(n));
        prepared.emplace(n, prepare_corpus(slice, inputs.techniques, want_annotations ? inputs.annotations : nullptr));
        log("n=" + std::to_string(n) + ": " + std::to_string(slice.records.size()) + " records");
    }

    std::vector<Job> queue;
    for (auto& [k, job] : jobs) queue.push_back(std::move(job));

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto record_failure = [&](const CellKey& key, const std::string& reason) {
        std::lock_guard lock(mu);
        outcome.failures.push_back({key, reason});
    };

    auto run_job = [&](const Job& job) {
        const auto start = std::chrono::steady_clock::now();
        const auto& corpus = prepared.at(job.n);
        const Method method = parse_method(job.method);
        const OversampleMode mode = parse_oversample(job.mode);
        const std::string job_key = job.method + "/" + std::to_string(job.n) + "/" + job.mode;
        FeatureParams fp;
        fp.num_topics = config.num_topics;
        fp.bm25 = {config.bm25_k1, config.bm25_b};
        fp.seed = derive_seed(config.seed, "features/" + job.method + "/" + std::to_string(job.n));
        std::map<int, std::vector<CellKey>> by_fold;
        for (const auto& key : job.pending) by_fold[key.fold].push_back(key);
        std::vector<CellResult> done;
        std::vector<std::string> warnings;

        auto run_fold = [&](const std::vector<CellKey>& keys, const FeatureMatrix& train_set,
                            const FeatureMatrix& test_set) {
            for (const auto& key : keys) {
                try {
                    done.push_back(evaluate(key, train_set, test_set, config.seed));
                } catch (const std::exception& e) {
                    record_failure(key, e.what());
                }
            }
        };

        try {
            Featurizer fz(method, corpus, fp);
            SmoteConfig sc;
            sc.k_neighbors = config.smote_k;
            if (mode == OversampleMode::FULL_DATASET) {
                fz.fit(all_rows(corpus.size()));
                sc.mode = SmoteMode::FULL_DATASET;
                sc.seed = derive_seed(config.seed, "smote/" + job_key);
                const auto full = smote(fz.transform(all_rows(corpus.size())), sc, &warnings);
                const auto plan =
                    stratified_kfold(full.labels, config.K, derive_seed(config.seed, "folds/" + std::to_string(job.n) + "/full"));
                for (const auto& [fold, keys] : by_fold) {
                    try {
                        run_fold(keys, full.select_rows(plan.train_rows(fold)), full.select_rows(plan.test_rows(fold)));
                    } catch (const std::exception& e) {
                        for (const auto& key : keys) record_failure(key, e.what());
                    }
                }
            } else {
                const auto plan = stratified_kfold(corpus.labels, config.K,
                                                   derive_seed(config.seed, "folds/" + std::to_string(job.n)));
                for (const auto& [fold, keys] : by_fold) {
                    try {
                        const auto train_rows = plan.train_rows(fold);
                        const auto test_rows = plan.test_rows(fold);
                        fz.fit(train_rows);
                        if (hooks.on_fold_fit) {
                            std::lock_guard lock(mu);
                            hooks.on_fold_fit(keys.front(), fz, test_rows);
                        }
                        auto train_set = fz.transform(train_rows);
                        if (mode == OversampleMode::TRAIN_ONLY) {
                            sc.mode = SmoteMode::TRAIN_ONLY;
                            sc.seed = derive_seed(config.seed, "smote/" + job_key + "/" + std::to_string(fold));
                            train_set = smote(train_set, sc, &warnings);
                        }
                        run_fold(keys, train_set, fz.transform(test_rows));
                    } catch (const std::exception& e) {
                        for (const auto& key : keys) record_failure(key, e.what());
                    }
                }
            }
        } catch (const std::exception& e) {
            for (const auto& key : job.pending) record_failure(key, e.what());
        }

        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::lock_guard lock(mu);
        for (auto& r : done) store[r.key] = r;
        outcome.computed += done.size();
        std::vector<CellResult> all;
        for (const auto& [k, r] : store) all.push_back(r);
        write_results(results_path, std::move(all));
        if (hooks.log) {
            for (const auto& w : warnings) hooks.log(job_key + ": " + w);
            char buf[64];
            std::snprintf(buf, sizeof buf, " in %.1fs", secs);
            hooks.log(job_key + ": " + std::to_string(done.size()) + "/" + std::to_string(job.pending.size()) +
                      " cells" + buf);
        }
    };

    const unsigned n_workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(1, queue.size())));
    auto worker = [&] {
        for (std::size_t i = next++; i < queue.size(); i = next++) run_job(queue[i]);
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (const auto& [k, r] : store) outcome.results.push_back(r);
    if (queue.empty()) write_results(results_path, outcome.results);
    if (!outcome.failures.empty())
        write_failures(failures_path, outcome.failures);
    else
        std::filesystem::remove(failures_path);
    std::sort(outcome.failures.begin(), outcome.failures.end(),
              [](const CellFailure& a, const CellFailure& b) { return a.key < b.key; });
    return outcome;
}

}  // namespace ttpbench
