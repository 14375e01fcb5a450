#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vf {

enum class KeywordSource { NER, NP, DEP };

struct Keyword {
    std::string phrase;
    KeywordSource source;
};

struct KeywordSet {
    std::vector<Keyword> keywords;  // NER first, then NP, then DEP
    bool empty() const { return keywords.empty(); }
};

// One dependency arc per token: the token's index, its head index (root = -1),
// the relation label and the surface form.
struct DepArc {
    int head = -1;
    int dep = 0;
    std::string relation;
    std::string token;
};

struct ClaimAnnotations {
    std::vector<std::pair<std::string, std::string>> ner_spans;  // (phrase, type)
    std::string constituency;                                    // bracketed tree
    std::vector<DepArc> dependency;
};

std::vector<std::string> keywords_from_ner(
    const std::vector<std::pair<std::string, std::string>>& spans);

// NP-labeled nodes at depth <= 2 below the root clause node. A ROOT/TOP
// wrapper with a single child is stripped first. Throws on malformed trees.
std::vector<std::string> keywords_from_constituency(const std::string& tree);

std::vector<std::string> keywords_from_dependency(const std::vector<DepArc>& arcs);

KeywordSet extract(const std::string& claim,
                   const std::optional<ClaimAnnotations>& annotations);

// Sidecar file: one JSON object per line, keyed by claim id.
class AnnotationStore {
public:
    AnnotationStore() = default;
    static AnnotationStore load(const std::string& path);
    std::optional<ClaimAnnotations> find(std::int64_t claim_id) const;

private:
    std::vector<std::pair<std::int64_t, ClaimAnnotations>> entries_;
};

}  // namespace vf
