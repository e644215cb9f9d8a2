#include "synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ttpbench/random.hpp"

namespace ttpbench::testing {

namespace {

using nlohmann::json;

const char* const kSyllables[] = {"ba", "ke", "di", "fo", "gu", "la", "mi", "no", "pu", "ri", "sa", "tu", "vo", "zi"};
const char* const kCodas[] = {"k", "x", "m", "p", "t"};

std::string pseudo_word(int index, const char* prefix) {
    std::string w = prefix;
    int v = index;
    for (int i = 0; i < 2; ++i) {
        w += kSyllables[v % 14];
        v /= 14;
    }
    w += kCodas[v % 5];
    return w;
}

std::vector<std::string> words(int count, int start, const char* prefix) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back(pseudo_word(start + i, prefix));
    return out;
}

struct Vocab {
    std::vector<std::string> verbs, nouns, adjs;
};

struct Token {
    std::string form, upos, deprel;
    int head;
};

class Builder {
public:
    Builder(const std::vector<Vocab>& classes, const Vocab& shared, const std::vector<std::string>& groups, double own,
            Rng& rng)
        : classes_(classes), shared_(shared), groups_(groups), own_(own), rng_(rng) {}

    // subject verb [adj] compound object with oblique .
    std::vector<Token> sentence(std::size_t c) {
        const std::string subj = groups_[rng_.below(groups_.size())];
        const std::string verb = pick(c, &Vocab::verbs);
        const bool adj = rng_.uniform() < 0.5;
        std::vector<Token> t;
        t.push_back({subj, "PROPN", "nsubj", 2});
        t.push_back({verb, "VERB", "root", 0});
        if (adj) t.push_back({pick(c, &Vocab::adjs), "ADJ", "amod", 0});
        const int comp = static_cast<int>(t.size()) + 1;
        t.push_back({pick(c, &Vocab::nouns), "NOUN", "compound", comp + 1});
        t.push_back({pick(c, &Vocab::nouns), "NOUN", "obj", 2});
        if (adj) t[2].head = comp + 1;
        t.push_back({"with", "ADP", "case", comp + 3});
        t.push_back({pick(c, &Vocab::nouns), "NOUN", "obl", 2});
        t.push_back({".", "PUNCT", "punct", 2});
        return t;
    }

private:
    std::string pick(std::size_t c, std::vector<std::string> Vocab::*field) {
        const double u = rng_.uniform();
        const Vocab* v = &shared_;
        if (u < own_)
            v = &classes_[c];
        else if (u < own_ + (1.0 - own_) / 2.0)
            v = &classes_[rng_.below(classes_.size())];
        const auto& list = v->*field;
        return list[rng_.below(list.size())];
    }

    const std::vector<Vocab>& classes_;
    const Vocab& shared_;
    const std::vector<std::string>& groups_;
    double own_;
    Rng& rng_;
};

void emit(std::ostringstream& conllu, std::string& text, const std::vector<Token>& tokens) {
    std::string sent;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && tokens[i].upos != "PUNCT") sent += ' ';
        sent += tokens[i].form;
    }
    conllu << "# text = " << sent << "\n";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        conllu << i + 1 << '\t' << t.form << '\t' << t.form << '\t' << t.upos << "\t_\t_\t" << t.head << '\t'
               << t.deprel << "\t_\t_\n";
    }
    conllu << "\n";
    if (!text.empty()) text += ' ';
    text += sent;
}

json external(const std::string& id) {
    return json::array({json{{"source_name", "mitre-attack"}, {"external_id", id}}});
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    const auto n_classes = spec.class_sizes.size();
    std::vector<Vocab> classes(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        const int base = static_cast<int>(c) * 16;
        classes[c] = {words(4, base, "v"), words(8, base + 4, "n"), words(3, base + 12, "a")};
    }
    const Vocab shared{words(6, 900, "v"), words(12, 910, "n"), words(4, 930, "a")};
    const auto groups = words(10, 950, "g");
    Builder builder(classes, shared, groups, spec.own_word_rate, rng);

    SyntheticData out;
    json objects = json::array();
    objects.push_back({{"type", "x-mitre-tactic"},
                       {"id", "x-mitre-tactic--exec"},
                       {"name", "Execution"},
                       {"x_mitre_shortname", "execution"},
                       {"external_references", external("TA0002")}});
    objects.push_back({{"type", "intrusion-set"},
                       {"id", "intrusion-set--g1"},
                       {"name", "Group One"},
                       {"external_references", external("G0001")}});

    std::ostringstream conllu;
    for (std::size_t c = 0; c < n_classes; ++c) {
        char id[32];
        std::snprintf(id, sizeof id, "T%04zu", 1000 + c);
        out.technique_ids.push_back(id);
        std::string description;
        conllu << "# doc_id = " << id << "\n";
        for (int s = 0; s < 3; ++s) emit(conllu, description, builder.sentence(c));
        objects.push_back({{"type", "attack-pattern"},
                           {"id", std::string("attack-pattern--") + id},
                           {"name", std::string("Technique ") + id},
                           {"description", description},
                           {"kill_chain_phases", json::array({json{{"kill_chain_name", "mitre-attack"},
                                                                   {"phase_name", "execution"}}})},
                           {"external_references", external(id)}});
    }

    // Procedures interleaved across classes so ingest order is mixed.
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < n_classes; ++c)
        for (int i = 0; i < spec.class_sizes[c]; ++i) order.push_back(c);
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto c = order[i];
        std::string text;
        conllu << "# doc_id = proc-" << i << "\n";
        for (int s = 0; s < spec.sentences_per_doc; ++s) emit(conllu, text, builder.sentence(c));
        objects.push_back({{"type", "relationship"},
                           {"id", "relationship--" + std::to_string(i)},
                           {"relationship_type", "uses"},
                           {"source_ref", "intrusion-set--g1"},
                           {"target_ref", "attack-pattern--" + out.technique_ids[c]},
                           {"description", text}});
    }
    out.bundle_json = json{{"type", "bundle"}, {"id", "bundle--synthetic"}, {"objects", objects}}.dump();
    out.conllu = conllu.str();
    return out;
}

void write_synthetic(const SyntheticData& data, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream(std::filesystem::path(dir) / "bundle.json", std::ios::binary) << data.bundle_json;
    std::ofstream(std::filesystem::path(dir) / "annotations.conllu", std::ios::binary) << data.conllu;
}

}  // namespace ttpbench::testing
