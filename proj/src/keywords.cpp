#include "vf/keywords.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "vf/postags.hpp"
#include "vf/tokenize.hpp"

namespace vf {

namespace {

using nlohmann::json;

const std::set<std::string>& stopwords() {
    static const std::set<std::string> sw = {
        "the", "a", "an", "this", "that", "these", "those", "is", "are", "was", "were",
        "be", "been", "has", "have", "had", "of", "in", "on", "at", "by", "for", "with",
        "from", "to", "and", "or", "but", "not", "it", "he", "she", "they", "there", "as"};
    return sw;
}

struct TreeNode {
    std::string label;
    std::string word;  // leaves only
    std::vector<TreeNode> children;
};

// Recursive-descent parse of a Penn bracketed tree.
TreeNode parse_tree(std::string_view s, std::size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size() || s[pos] != '(') throw std::runtime_error("malformed tree: expected '('");
    ++pos;
    TreeNode node;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '(' && s[pos] != ')')
        node.label.push_back(s[pos++]);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    while (pos < s.size() && s[pos] != ')') {
        if (s[pos] == '(') {
            node.children.push_back(parse_tree(s, pos));
        } else {
            std::string word;
            while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
                   s[pos] != ')')
                word.push_back(s[pos++]);
            if (node.word.empty())
                node.word = std::move(word);
            else
                node.word += " " + word;
        }
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos >= s.size()) throw std::runtime_error("malformed tree: missing ')'");
    ++pos;
    return node;
}

void yield_of(const TreeNode& node, std::string& out) {
    if (!node.word.empty()) {
        if (!out.empty()) out.push_back(' ');
        out += node.word;
    }
    for (const auto& child : node.children) yield_of(child, out);
}

void collect_np(const TreeNode& node, int depth, std::vector<std::string>& out) {
    if (depth >= 1 && node.label == "NP") {
        std::string phrase;
        yield_of(node, phrase);
        if (!phrase.empty()) out.push_back(phrase);
    }
    if (depth >= 2) return;
    for (const auto& child : node.children) collect_np(child, depth + 1, out);
}

bool is_capitalized(const std::string& w) {
    return !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
}

// Maximal runs of capitalized tokens; a sentence-initial stopword never
// starts a run.
std::vector<std::string> capitalized_runs(const std::string& claim) {
    std::vector<std::string> surfaces = tokenize_surface(claim);
    std::vector<std::string> runs;
    std::string current;
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        const std::string& w = surfaces[i];
        bool eligible = is_capitalized(w) &&
                        !(i == 0 && stopwords().count(fold_case(w)));
        if (eligible) {
            if (!current.empty()) current.push_back(' ');
            current += w;
        } else if (!current.empty()) {
            runs.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) runs.push_back(std::move(current));
    return runs;
}

// Chunks of shape: optional determiner, adjectives, nouns.
std::vector<std::string> noun_chunks(const std::string& claim) {
    TaggedText tagged = tag(claim);
    std::vector<std::string> chunks;
    std::size_t i = 0;
    const auto& toks = tagged.tokens;
    while (i < toks.size()) {
        std::size_t start = i;
        if (i < toks.size() && toks[i].second == "DT") ++i;
        while (i < toks.size() && toks[i].second.starts_with("JJ")) ++i;
        std::size_t noun_start = i;
        while (i < toks.size() && toks[i].second.starts_with("NN")) ++i;
        if (i > noun_start) {
            std::string chunk;
            for (std::size_t k = start; k < i; ++k) {
                if (!chunk.empty()) chunk.push_back(' ');
                chunk += toks[k].first;
            }
            chunks.push_back(std::move(chunk));
        } else {
            i = start + 1;
        }
    }
    return chunks;
}

void add_keywords(KeywordSet& set, const std::vector<std::string>& phrases,
                  KeywordSource source, std::set<std::string>& seen) {
    for (const auto& phrase : phrases) {
        std::string trimmed = trim(phrase);
        if (trimmed.empty()) continue;
        std::string key = fold_case(trimmed);
        if (!seen.insert(key).second) continue;
        set.keywords.push_back({trimmed, source});
    }
}

}  // namespace

std::vector<std::string> keywords_from_ner(
    const std::vector<std::pair<std::string, std::string>>& spans) {
    std::vector<std::string> out;
    out.reserve(spans.size());
    for (const auto& [phrase, type] : spans) out.push_back(phrase);
    return out;
}

std::vector<std::string> keywords_from_constituency(const std::string& tree) {
    std::size_t pos = 0;
    TreeNode root = parse_tree(tree, pos);
    while (pos < tree.size() && std::isspace(static_cast<unsigned char>(tree[pos]))) ++pos;
    if (pos != tree.size()) throw std::runtime_error("malformed tree: trailing input");
    // strip a ROOT/TOP wrapper so depth counts from the clause node
    const TreeNode* clause = &root;
    while ((clause->label == "ROOT" || clause->label == "TOP" || clause->label.empty()) &&
           clause->children.size() == 1)
        clause = &clause->children[0];
    std::vector<std::string> out;
    collect_np(*clause, 0, out);
    return out;
}

std::vector<std::string> keywords_from_dependency(const std::vector<DepArc>& arcs) {
    static const std::set<std::string> wanted = {"nsubj", "nsubjpass", "dobj", "iobj", "obj"};
    std::vector<std::string> out;
    for (const auto& arc : arcs) {
        if (!wanted.count(arc.relation)) continue;
        // subtree yield of the dependent, in token order
        std::set<int> subtree = {arc.dep};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& other : arcs)
                if (subtree.count(other.head) && subtree.insert(other.dep).second) grew = true;
        }
        std::string phrase;
        for (const auto& other : arcs) {
            if (!subtree.count(other.dep)) continue;
            if (!phrase.empty()) phrase.push_back(' ');
            phrase += other.token;
        }
        if (!phrase.empty()) out.push_back(phrase);
    }
    return out;
}

KeywordSet extract(const std::string& claim,
                   const std::optional<ClaimAnnotations>& annotations) {
    if (trim(claim).empty()) throw std::invalid_argument("empty claim");

    KeywordSet set;
    std::set<std::string> seen;
    if (annotations) {
        add_keywords(set, keywords_from_ner(annotations->ner_spans), KeywordSource::NER, seen);
        if (!annotations->constituency.empty()) {
            try {
                add_keywords(set, keywords_from_constituency(annotations->constituency),
                             KeywordSource::NP, seen);
            } catch (const std::runtime_error&) {
                add_keywords(set, noun_chunks(claim), KeywordSource::NP, seen);
            }
        }
        add_keywords(set, keywords_from_dependency(annotations->dependency), KeywordSource::DEP,
                     seen);
    } else {
        add_keywords(set, capitalized_runs(claim), KeywordSource::NER, seen);
        std::vector<std::string> chunks = noun_chunks(claim);
        add_keywords(set, chunks, KeywordSource::NP, seen);
        if (!chunks.empty()) {
            add_keywords(set, {chunks.front(), chunks.back()}, KeywordSource::DEP, seen);
        }
    }

    if (set.empty()) {
        std::vector<std::string> runs = capitalized_runs(claim);
        if (!runs.empty()) {
            auto longest = std::max_element(runs.begin(), runs.end(),
                                            [](const std::string& a, const std::string& b) {
                                                return a.size() < b.size();
                                            });
            add_keywords(set, {*longest}, KeywordSource::NER, seen);
        } else {
            std::string residue;
            for (const auto& w : tokenize_surface(claim)) {
                if (stopwords().count(fold_case(w))) continue;
                if (tokenize(w).empty()) continue;  // punctuation
                if (!residue.empty()) residue.push_back(' ');
                residue += w;
            }
            if (residue.empty()) {
                // all-stopword claim: keep every word so the set stays non-empty
                for (const auto& w : tokenize_surface(claim)) {
                    if (tokenize(w).empty()) continue;
                    if (!residue.empty()) residue.push_back(' ');
                    residue += w;
                }
            }
            if (!residue.empty()) add_keywords(set, {residue}, KeywordSource::NER, seen);
        }
    }
    return set;
}

AnnotationStore AnnotationStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open annotation file: " + path);
    AnnotationStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("id"))
            throw std::runtime_error("bad annotation record at line " + std::to_string(lineno));
        ClaimAnnotations ann;
        if (j.contains("ner"))
            for (const auto& span : j["ner"])
                ann.ner_spans.emplace_back(span.at(0).get<std::string>(),
                                           span.size() > 1 ? span.at(1).get<std::string>() : "");
        ann.constituency = j.value("constituency", std::string());
        if (j.contains("dependency"))
            for (const auto& arc : j["dependency"])
                ann.dependency.push_back({arc.at(0).get<int>(), arc.at(1).get<int>(),
                                          arc.at(2).get<std::string>(),
                                          arc.at(3).get<std::string>()});
        store.entries_.emplace_back(j["id"].get<std::int64_t>(), std::move(ann));
    }
    return store;
}

std::optional<ClaimAnnotations> AnnotationStore::find(std::int64_t claim_id) const {
    for (const auto& [id, ann] : entries_)
        if (id == claim_id) return ann;
    return std::nullopt;
}

}  // namespace vf
