#include "ttpbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ttpbench/error.hpp"
#include "ttpbench/evaluation.hpp"
#include "ttpbench/feature_matrix.hpp"
#include "ttpbench/learners.hpp"

namespace ttpbench {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys{"bundle_path", "conllu_path", "methods",   "classifiers", "n_list",
                                  "oversample_modes", "K", "seed", "min_support", "num_topics",
                                  "smote_k", "bm25_k1", "bm25_b", "out_dir"};

template <typename T>
T get(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(std::string("config: field '") + key + "' has the wrong type");
    }
}

void require_unique(const std::vector<std::string>& v, const char* field) {
    if (std::set<std::string>(v.begin(), v.end()).size() != v.size())
        throw Error(std::string("config: duplicate entry in '") + field + "'");
}

}  // namespace

void GridConfig::validate() const {
    if (methods.empty()) throw Error("config: 'methods' must not be empty");
    if (classifiers.empty()) throw Error("config: 'classifiers' must not be empty");
    if (n_list.empty()) throw Error("config: 'n_list' must not be empty");
    if (oversample_modes.empty()) throw Error("config: 'oversample_modes' must not be empty");
    for (const auto& m : methods) parse_method(m);
    for (const auto& c : classifiers) parse_learner(c);
    for (const auto& o : oversample_modes) parse_oversample(o);
    require_unique(methods, "methods");
    require_unique(classifiers, "classifiers");
    require_unique(oversample_modes, "oversample_modes");
    for (int n : n_list)
        if (n != 2 && n != 4 && n != 8 && n != 16 && n != 32 && n != 64)
            throw Error("config: n_list entry " + std::to_string(n) + " not in {2,4,8,16,32,64}");
    if (std::set<int>(n_list.begin(), n_list.end()).size() != n_list.size())
        throw Error("config: duplicate entry in 'n_list'");
    if (K < 2) throw Error("config: 'K' must be >= 2");
    if (min_support < 1) throw Error("config: 'min_support' must be >= 1");
    if (num_topics < 1) throw Error("config: 'num_topics' must be >= 1");
    if (smote_k < 1) throw Error("config: 'smote_k' must be >= 1");
    if (!(bm25_k1 >= 0.0)) throw Error("config: 'bm25_k1' must be >= 0");
    if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) throw Error("config: 'bm25_b' must be in [0, 1]");
    if (bundle_path.empty()) throw Error("config: 'bundle_path' is required");
    if (out_dir.empty()) throw Error("config: 'out_dir' must not be empty");
}

GridConfig parse_grid_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what(), e.byte);
    }
    if (!j.is_object()) throw Error("config: top level must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!kKeys.count(key)) throw Error("config: unknown field '" + key + "'");
    GridConfig c;
    c.bundle_path = get(j, "bundle_path", c.bundle_path);
    c.conllu_path = get(j, "conllu_path", c.conllu_path);
    c.methods = get(j, "methods", c.methods);
    c.classifiers = get(j, "classifiers", c.classifiers);
    c.n_list = get(j, "n_list", c.n_list);
    c.oversample_modes = get(j, "oversample_modes", c.oversample_modes);
    c.K = get(j, "K", c.K);
    c.seed = get(j, "seed", c.seed);
    c.min_support = get(j, "min_support", c.min_support);
    c.num_topics = get(j, "num_topics", c.num_topics);
    c.smote_k = get(j, "smote_k", c.smote_k);
    c.bm25_k1 = get(j, "bm25_k1", c.bm25_k1);
    c.bm25_b = get(j, "bm25_b", c.bm25_b);
    c.out_dir = get(j, "out_dir", c.out_dir);
    for (auto& m : c.methods) m = std::string(method_name(parse_method(m)));
    for (auto& l : c.classifiers) l = std::string(learner_name(parse_learner(l)));
    c.validate();
    return c;
}

GridConfig load_grid_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grid_config(ss.str());
}

std::string serialize_grid_config(const GridConfig& c) {
    json j = json::object();
    j["bundle_path"] = c.bundle_path;
    j["conllu_path"] = c.conllu_path;
    j["methods"] = c.methods;
    j["classifiers"] = c.classifiers;
    j["n_list"] = c.n_list;
    j["oversample_modes"] = c.oversample_modes;
    j["K"] = c.K;
    j["seed"] = c.seed;
    j["min_support"] = c.min_support;
    j["num_topics"] = c.num_topics;
    j["smote_k"] = c.smote_k;
    j["bm25_k1"] = c.bm25_k1;
    j["bm25_b"] = c.bm25_b;
    j["out_dir"] = c.out_dir;
    return j.dump(2) + "\n";
}

}  // namespace ttpbench
