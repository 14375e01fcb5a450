#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vf/corpus.hpp"

namespace vf {

enum class QueryType { Type1, Type2, Type3 };
enum class Field { Title, Body };

struct Query {
    QueryType qtype = QueryType::Type1;
    Field field = Field::Title;
    bool must = false;
    // Each clause is a phrase: one word for Type1/Type2, possibly several
    // for Type3. Words are analyzer tokens (case-folded).
    std::vector<std::vector<std::string>> clauses;
    std::uint32_t limit = 20;
};

struct Hit {
    std::uint32_t doc_id = 0;
    std::uint32_t matched_clauses = 0;
    double score = 0.0;
};

struct Candidate {
    std::uint32_t doc_id = 0;
    std::string presented_text;
    double retrieval_score = 0.0;
    std::set<QueryType> source_queries;
};

struct Posting {
    std::uint32_t doc_id;
    std::uint32_t tf;
};

class IndexedCorpus {
public:
    // Sorts docs by (title_display, sentence_index) and builds postings for
    // both fields. Throws on duplicate (title, index) pairs.
    static IndexedCorpus build(std::vector<SentenceDoc> docs);

    const std::vector<SentenceDoc>& docs() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

    const std::vector<Posting>* postings(Field f, const std::string& term) const;
    std::uint32_t doc_freq(Field f, const std::string& term) const;
    double avg_field_len(Field f) const { return f == Field::Title ? avg_title_len_ : avg_body_len_; }

    // save -> load -> save is bit-identical.
    void save(const std::string& path) const;
    static IndexedCorpus load(const std::string& path);

private:
    std::vector<SentenceDoc> docs_;
    // std::map keeps term iteration deterministic
    std::map<std::string, std::vector<Posting>> title_postings_;
    std::map<std::string, std::vector<Posting>> body_postings_;
    double avg_title_len_ = 0.0;
    double avg_body_len_ = 0.0;
};

struct KeywordSet;  // keywords.hpp

// Title-prepended text unless the sentence already mentions the title
// (case-folded substring test).
std::string presented_text(const SentenceDoc& doc);

std::vector<Query> make_queries(const KeywordSet& keywords,
                                std::uint32_t type1_limit = 2,
                                std::uint32_t type2_limit = 20,
                                std::uint32_t type3_limit = 20);

std::vector<Hit> execute(const Query& query, const IndexedCorpus& index);

std::vector<Candidate> collect_candidates(const std::vector<Query>& queries,
                                          const IndexedCorpus& index);

}  // namespace vf
