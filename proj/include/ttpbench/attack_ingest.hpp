#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ttpbench {

/// One procedure description mapped to the technique it exemplifies.
struct ProcedureRecord {
    std::string procedure_id;    // external id of the source object, e.g. "G0016"
    std::string text;            // raw description, citations and URLs intact
    std::string technique_id;    // "T1059" (or "T1059.001" when not collapsing)
    std::string technique_name;
    std::vector<std::string> tactic_ids;
    std::string doc_id;          // "proc-<ingest index>", key into CoNLL-U annotations

    bool operator==(const ProcedureRecord&) const = default;
};

struct TechniqueInfo {
    std::string technique_id;
    std::string name;
    std::string description;
    std::vector<std::string> tactic_ids;

    bool operator==(const TechniqueInfo&) const = default;
};

/// Records ordered by descending class size, ties by ascending technique id;
/// records of one class keep ingestion order. label_set follows the same order.
struct LabeledCorpus {
    std::vector<ProcedureRecord> records;
    std::vector<std::string> label_set;

    /// Class index (into label_set) of every record.
    std::vector<int> labels() const;
    std::size_t class_size(std::size_t label) const;

    bool operator==(const LabeledCorpus&) const = default;
};

struct SkipReport {
    std::size_t missing_object = 0;        // source or target id not in bundle
    std::size_t non_technique_target = 0;  // "uses" pointing at malware/tool/...
    std::size_t empty_description = 0;
    std::size_t revoked_or_deprecated = 0;
    std::size_t missing_tactic = 0;
    std::size_t duplicate_texts = 0;       // kept; same text under another technique
    std::vector<std::string> lines;        // one entry per skipped relationship

    std::string render() const;
};

struct AttackBundle {
    std::vector<ProcedureRecord> records;
    std::vector<TechniqueInfo> techniques;  // sorted by technique_id
    SkipReport skips;

    const TechniqueInfo* find_technique(std::string_view technique_id) const;
};

struct IngestOptions {
    /// Map T####.### onto its parent T####. Required to reproduce the
    /// 8,104 procedure / 170 technique counts of the v9 enterprise bundle.
    bool collapse_subtechniques = true;
};

AttackBundle parse_attack_bundle(std::string_view json_text, const IngestOptions& options = {});
AttackBundle load_attack_bundle(const std::string& path, const IngestOptions& options = {});

/// Keep techniques with at least min_count records. Throws when nothing survives.
LabeledCorpus filter_min_support(const std::vector<ProcedureRecord>& records, std::size_t min_count);

/// Restrict to the n largest classes.
LabeledCorpus select_top_n(const LabeledCorpus& corpus, std::size_t n);

std::size_t count_distinct_techniques(const std::vector<ProcedureRecord>& records);

/// Corpus cache: RFC 4180 CSV, header procedure_id,technique_id,technique_name,text.
/// Row i (0-based, header excluded) carries doc_id "proc-<i>" when written
/// from a full ingest.
void write_corpus_csv(const std::string& path, const std::vector<ProcedureRecord>& records);
std::vector<ProcedureRecord> read_corpus_csv(const std::string& path);

bool is_technique_id(std::string_view id);
std::string parent_technique_id(std::string_view id);

}  // namespace ttpbench
