#include "ttpbench/attack_ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "ttpbench/csv.hpp"
#include "ttpbench/error.hpp"

namespace ttpbench {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string string_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

bool bool_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && it->is_boolean() && it->get<bool>();
}

bool is_retired(const json& obj) {
    return bool_field(obj, "revoked") || bool_field(obj, "x_mitre_deprecated");
}

/// External id from the "mitre-attack" reference (mobile/ics sources too).
std::string mitre_external_id(const json& obj) {
    auto refs = obj.find("external_references");
    if (refs == obj.end() || !refs->is_array()) return {};
    for (const auto& ref : *refs) {
        const auto source = string_field(ref, "source_name");
        if (source.rfind("mitre-", 0) == 0) {
            auto id = string_field(ref, "external_id");
            if (!id.empty()) return id;
        }
    }
    return {};
}

struct TacticIndex {
    std::unordered_map<std::string, std::string> shortname_to_id;

    std::vector<std::string> resolve(const json& pattern) const {
        std::set<std::string> ids;
        auto phases = pattern.find("kill_chain_phases");
        if (phases != pattern.end() && phases->is_array()) {
            for (const auto& phase : *phases) {
                const auto chain = string_field(phase, "kill_chain_name");
                if (chain.rfind("mitre-", 0) != 0) continue;
                const auto name = string_field(phase, "phase_name");
                auto it = shortname_to_id.find(name);
                ids.insert(it != shortname_to_id.end() ? it->second : name);
            }
        }
        return {ids.begin(), ids.end()};
    }
};

}  // namespace

bool is_technique_id(std::string_view id) {
    auto digits = [&](std::size_t from, std::size_t count) {
        if (id.size() < from + count) return false;
        for (std::size_t i = from; i < from + count; ++i)
            if (id[i] < '0' || id[i] > '9') return false;
        return true;
    };
    if (id.size() != 5 && id.size() != 9) return false;
    if (id[0] != 'T' || !digits(1, 4)) return false;
    if (id.size() == 9) return id[5] == '.' && digits(6, 3);
    return true;
}

std::string parent_technique_id(std::string_view id) {
    return std::string(id.substr(0, std::min<std::size_t>(id.size(), 5)));
}

std::string SkipReport::render() const {
    std::ostringstream out;
    out << "missing_object " << missing_object << '\n'
        << "non_technique_target " << non_technique_target << '\n'
        << "empty_description " << empty_description << '\n'
        << "revoked_or_deprecated " << revoked_or_deprecated << '\n'
        << "missing_tactic " << missing_tactic << '\n'
        << "duplicate_texts " << duplicate_texts << '\n';
    for (const auto& line : lines) out << line << '\n';
    return out.str();
}

const TechniqueInfo* AttackBundle::find_technique(std::string_view technique_id) const {
    auto it = std::lower_bound(techniques.begin(), techniques.end(), technique_id,
                               [](const TechniqueInfo& t, std::string_view id) { return t.technique_id < id; });
    if (it == techniques.end() || it->technique_id != technique_id) return nullptr;
    return &*it;
}

AttackBundle parse_attack_bundle(std::string_view json_text, const IngestOptions& options) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("objects") || !doc["objects"].is_array())
        throw ParseError("bundle has no \"objects\" array", 0);

    const json& objects = doc["objects"];
    std::unordered_map<std::string, const json*> by_stix_id;
    TacticIndex tactics;
    for (const auto& obj : objects) {
        const auto id = string_field(obj, "id");
        if (!id.empty()) by_stix_id.emplace(id, &obj);
        if (string_field(obj, "type") == "x-mitre-tactic") {
            const auto shortname = string_field(obj, "x_mitre_shortname");
            const auto ext = mitre_external_id(obj);
            if (!shortname.empty() && !ext.empty()) tactics.shortname_to_id[shortname] = ext;
        }
    }

    AttackBundle bundle;
    std::map<std::string, TechniqueInfo> catalog;
    for (const auto& obj : objects) {
        if (string_field(obj, "type") != "attack-pattern" || is_retired(obj)) continue;
        TechniqueInfo info;
        info.technique_id = mitre_external_id(obj);
        if (!is_technique_id(info.technique_id)) continue;
        info.name = string_field(obj, "name");
        info.description = trim(string_field(obj, "description"));
        info.tactic_ids = tactics.resolve(obj);
        if (info.description.empty()) continue;
        catalog.emplace(info.technique_id, std::move(info));
    }
    for (auto& [id, info] : catalog) bundle.techniques.push_back(info);

    auto& skips = bundle.skips;
    for (const auto& obj : objects) {
        if (string_field(obj, "type") != "relationship") continue;
        if (string_field(obj, "relationship_type") != "uses") continue;
        const auto rel_id = string_field(obj, "id");
        if (is_retired(obj)) {
            ++skips.revoked_or_deprecated;
            skips.lines.push_back(rel_id + "\trevoked_or_deprecated");
            continue;
        }
        const auto src_it = by_stix_id.find(string_field(obj, "source_ref"));
        const auto dst_it = by_stix_id.find(string_field(obj, "target_ref"));
        if (src_it == by_stix_id.end() || dst_it == by_stix_id.end()) {
            ++skips.missing_object;
            skips.lines.push_back(rel_id + "\tmissing_object");
            continue;
        }
        const json& target = *dst_it->second;
        const json& source = *src_it->second;
        if (string_field(target, "type") != "attack-pattern") {
            ++skips.non_technique_target;
            continue;
        }
        if (is_retired(target) || is_retired(source)) {
            ++skips.revoked_or_deprecated;
            skips.lines.push_back(rel_id + "\trevoked_or_deprecated");
            continue;
        }
        auto text = string_field(obj, "description");
        if (trim(text).empty()) {
            ++skips.empty_description;
            skips.lines.push_back(rel_id + "\tempty_description");
            continue;
        }
        std::string technique_id = mitre_external_id(target);
        if (!is_technique_id(technique_id)) {
            ++skips.non_technique_target;
            skips.lines.push_back(rel_id + "\tbad_technique_id");
            continue;
        }
        std::string name = string_field(target, "name");
        std::vector<std::string> tactic_ids = tactics.resolve(target);
        if (options.collapse_subtechniques && technique_id.size() > 5) {
            technique_id = parent_technique_id(technique_id);
            if (auto parent = catalog.find(technique_id); parent != catalog.end()) {
                name = parent->second.name;
                tactic_ids = parent->second.tactic_ids;
            }
        }
        if (tactic_ids.empty()) {
            ++skips.missing_tactic;
            skips.lines.push_back(rel_id + "\tmissing_tactic");
            continue;
        }
        ProcedureRecord rec;
        rec.procedure_id = mitre_external_id(source);
        rec.text = std::move(text);
        rec.technique_id = std::move(technique_id);
        rec.technique_name = std::move(name);
        rec.tactic_ids = std::move(tactic_ids);
        rec.doc_id = "proc-" + std::to_string(bundle.records.size());
        bundle.records.push_back(std::move(rec));
    }

    std::unordered_map<std::string, std::string> first_label;
    for (const auto& rec : bundle.records) {
        auto [it, inserted] = first_label.emplace(trim(rec.text), rec.technique_id);
        if (!inserted && it->second != rec.technique_id) ++skips.duplicate_texts;
    }
    return bundle;
}

AttackBundle load_attack_bundle(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open bundle " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_attack_bundle(buf.str(), options);
}

std::vector<int> LabeledCorpus::labels() const {
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < label_set.size(); ++i) index.emplace(label_set[i], static_cast<int>(i));
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(index.at(rec.technique_id));
    return out;
}

std::size_t LabeledCorpus::class_size(std::size_t label) const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const ProcedureRecord& r) {
        return r.technique_id == label_set.at(label);
    }));
}

namespace {

LabeledCorpus order_corpus(std::vector<ProcedureRecord> records) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[r.technique_id];
    LabeledCorpus corpus;
    for (const auto& [id, count] : counts) corpus.label_set.push_back(id);
    std::stable_sort(corpus.label_set.begin(), corpus.label_set.end(),
                     [&](const std::string& a, const std::string& b) { return counts[a] > counts[b]; });
    std::unordered_map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < corpus.label_set.size(); ++i) rank[corpus.label_set[i]] = i;
    std::stable_sort(records.begin(), records.end(), [&](const ProcedureRecord& a, const ProcedureRecord& b) {
        return rank[a.technique_id] < rank[b.technique_id];
    });
    corpus.records = std::move(records);
    return corpus;
}

}  // namespace

LabeledCorpus filter_min_support(const std::vector<ProcedureRecord>& records, std::size_t min_count) {
    if (min_count < 1) throw Error("min_support must be >= 1");
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[r.technique_id];
    std::vector<ProcedureRecord> kept;
    for (const auto& r : records)
        if (counts[r.technique_id] >= min_count) kept.push_back(r);
    if (kept.empty())
        throw Error("no classes survive filter (min_support=" + std::to_string(min_count) + ")");
    return order_corpus(std::move(kept));
}

LabeledCorpus select_top_n(const LabeledCorpus& corpus, std::size_t n) {
    if (n < 1 || n > corpus.label_set.size())
        throw Error("select_top_n: n=" + std::to_string(n) + " but corpus has " +
                    std::to_string(corpus.label_set.size()) + " classes");
    std::set<std::string> keep(corpus.label_set.begin(), corpus.label_set.begin() + static_cast<std::ptrdiff_t>(n));
    LabeledCorpus out;
    out.label_set.assign(corpus.label_set.begin(), corpus.label_set.begin() + static_cast<std::ptrdiff_t>(n));
    for (const auto& r : corpus.records)
        if (keep.count(r.technique_id)) out.records.push_back(r);
    return out;
}

std::size_t count_distinct_techniques(const std::vector<ProcedureRecord>& records) {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.technique_id);
    return ids.size();
}

void write_corpus_csv(const std::string& path, const std::vector<ProcedureRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    csv::write_row(out, {"procedure_id", "technique_id", "technique_name", "text"});
    for (const auto& r : records) csv::write_row(out, {r.procedure_id, r.technique_id, r.technique_name, r.text});
}

std::vector<ProcedureRecord> read_corpus_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"procedure_id", "technique_id", "technique_name", "text"})
        throw ParseError("corpus csv: unexpected header in " + path, 1);
    std::vector<ProcedureRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 4) throw ParseError("corpus csv: expected 4 fields", i + 1);
        ProcedureRecord r;
        r.procedure_id = rows[i][0];
        r.technique_id = rows[i][1];
        r.technique_name = rows[i][2];
        r.text = rows[i][3];
        r.doc_id = "proc-" + std::to_string(i - 1);
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace ttpbench
