#include "vf/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "vf/io.hpp"
#include "vf/keywords.hpp"
#include "vf/tokenize.hpp"

namespace vf {

namespace {

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;
constexpr char kIndexMagic[4] = {'V', 'F', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

const std::vector<std::string>& field_tokens(const SentenceDoc& doc, Field f) {
    return f == Field::Title ? doc.title_tokens : doc.body_tokens;
}

double bm25_idf(std::size_t n_docs, std::uint32_t df) {
    return std::log(1.0 + (static_cast<double>(n_docs) - df + 0.5) / (df + 0.5));
}

// True if `phrase` occurs as a consecutive run in `tokens`.
bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
    if (phrase.empty() || phrase.size() > tokens.size()) return false;
    for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < phrase.size(); ++k) {
            if (tokens[i + k] != phrase[k]) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

IndexedCorpus IndexedCorpus::build(std::vector<SentenceDoc> docs) {
    std::sort(docs.begin(), docs.end(), [](const SentenceDoc& a, const SentenceDoc& b) {
        if (a.page_title_display != b.page_title_display)
            return a.page_title_display < b.page_title_display;
        return a.sentence_index < b.sentence_index;
    });
    for (std::size_t i = 1; i < docs.size(); ++i) {
        if (docs[i].page_title_display == docs[i - 1].page_title_display &&
            docs[i].sentence_index == docs[i - 1].sentence_index)
            throw std::runtime_error("duplicate sentence doc: (" + docs[i].page_title_display +
                                     ", " + std::to_string(docs[i].sentence_index) + ")");
    }

    IndexedCorpus index;
    index.docs_ = std::move(docs);
    std::size_t title_len_sum = 0, body_len_sum = 0;
    for (std::uint32_t doc_id = 0; doc_id < index.docs_.size(); ++doc_id) {
        const SentenceDoc& doc = index.docs_[doc_id];
        title_len_sum += doc.title_tokens.size();
        body_len_sum += doc.body_tokens.size();
        for (Field f : {Field::Title, Field::Body}) {
            auto& postings = f == Field::Title ? index.title_postings_ : index.body_postings_;
            std::unordered_map<std::string, std::uint32_t> tf;
            for (const auto& t : field_tokens(doc, f)) ++tf[t];
            for (const auto& [term, freq] : tf) postings[term].push_back({doc_id, freq});
        }
    }
    for (auto* postings : {&index.title_postings_, &index.body_postings_})
        for (auto& [term, list] : *postings)
            std::sort(list.begin(), list.end(),
                      [](const Posting& a, const Posting& b) { return a.doc_id < b.doc_id; });
    if (!index.docs_.empty()) {
        index.avg_title_len_ = static_cast<double>(title_len_sum) / index.docs_.size();
        index.avg_body_len_ = static_cast<double>(body_len_sum) / index.docs_.size();
    }
    return index;
}

const std::vector<Posting>* IndexedCorpus::postings(Field f, const std::string& term) const {
    const auto& map = f == Field::Title ? title_postings_ : body_postings_;
    auto it = map.find(term);
    return it == map.end() ? nullptr : &it->second;
}

std::uint32_t IndexedCorpus::doc_freq(Field f, const std::string& term) const {
    const auto* list = postings(f, term);
    return list ? static_cast<std::uint32_t>(list->size()) : 0;
}

void IndexedCorpus::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index file: " + path);
    out.write(kIndexMagic, 4);
    io::write_u32(out, kIndexVersion);
    io::write_u64(out, docs_.size());
    for (const auto& doc : docs_) {
        io::write_str(out, doc.page_title_raw);
        io::write_str(out, doc.page_title_display);
        io::write_u32(out, doc.sentence_index);
        io::write_str(out, doc.raw_text);
        io::write_str(out, doc.contextualized_text);
        io::write_u32(out, static_cast<std::uint32_t>(doc.title_tokens.size()));
        for (const auto& t : doc.title_tokens) io::write_str(out, t);
        io::write_u32(out, static_cast<std::uint32_t>(doc.body_tokens.size()));
        for (const auto& t : doc.body_tokens) io::write_str(out, t);
    }
    if (!out) throw std::runtime_error("error writing index file: " + path);
}

IndexedCorpus IndexedCorpus::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kIndexMagic, 4) != 0)
        throw std::runtime_error("not an index file: " + path);
    std::uint32_t version = io::read_u32(in);
    if (version != kIndexVersion)
        throw std::runtime_error("unsupported index version " + std::to_string(version));
    std::uint64_t n = io::read_u64(in);
    std::vector<SentenceDoc> docs;
    docs.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SentenceDoc doc;
        doc.page_title_raw = io::read_str(in);
        doc.page_title_display = io::read_str(in);
        doc.sentence_index = io::read_u32(in);
        doc.raw_text = io::read_str(in);
        doc.contextualized_text = io::read_str(in);
        std::uint32_t nt = io::read_u32(in);
        doc.title_tokens.reserve(nt);
        for (std::uint32_t k = 0; k < nt; ++k) doc.title_tokens.push_back(io::read_str(in));
        std::uint32_t nb = io::read_u32(in);
        doc.body_tokens.reserve(nb);
        for (std::uint32_t k = 0; k < nb; ++k) doc.body_tokens.push_back(io::read_str(in));
        docs.push_back(std::move(doc));
    }
    return build(std::move(docs));
}

std::vector<Query> make_queries(const KeywordSet& keywords, std::uint32_t type1_limit,
                                std::uint32_t type2_limit, std::uint32_t type3_limit) {
    std::vector<Query> queries;
    std::vector<std::string> all_words;
    std::vector<std::vector<std::string>> phrases;
    for (const auto& kw : keywords.keywords) {
        std::vector<std::string> words = tokenize(kw.phrase);
        if (words.empty()) continue;
        Query q1;
        q1.qtype = QueryType::Type1;
        q1.field = Field::Title;
        q1.must = true;
        q1.limit = type1_limit;
        for (const auto& w : words) q1.clauses.push_back({w});
        queries.push_back(std::move(q1));
        for (const auto& w : words)
            if (std::find(all_words.begin(), all_words.end(), w) == all_words.end())
                all_words.push_back(w);
        if (std::find(phrases.begin(), phrases.end(), words) == phrases.end())
            phrases.push_back(words);
    }
    if (queries.empty()) return queries;

    Query q2;
    q2.qtype = QueryType::Type2;
    q2.field = Field::Title;
    q2.must = false;
    q2.limit = type2_limit;
    for (const auto& w : all_words) q2.clauses.push_back({w});
    queries.push_back(std::move(q2));

    Query q3;
    q3.qtype = QueryType::Type3;
    q3.field = Field::Body;
    q3.must = false;
    q3.limit = type3_limit;
    q3.clauses = std::move(phrases);
    queries.push_back(std::move(q3));
    return queries;
}

std::vector<Hit> execute(const Query& query, const IndexedCorpus& index) {
    if (index.size() == 0 || query.clauses.empty()) return {};

    struct Acc {
        std::uint32_t matched = 0;
        double score = 0.0;
    };
    std::unordered_map<std::uint32_t, Acc> acc;

    for (const auto& phrase : query.clauses) {
        if (phrase.empty()) continue;
        // docs containing every word of the phrase, via postings intersection
        std::vector<std::uint32_t> doc_ids;
        bool first = true;
        for (const auto& word : phrase) {
            const auto* list = index.postings(query.field, word);
            if (!list) {
                doc_ids.clear();
                break;
            }
            std::vector<std::uint32_t> ids;
            ids.reserve(list->size());
            for (const auto& p : *list) ids.push_back(p.doc_id);
            if (first) {
                doc_ids = std::move(ids);
                first = false;
            } else {
                std::vector<std::uint32_t> merged;
                std::set_intersection(doc_ids.begin(), doc_ids.end(), ids.begin(), ids.end(),
                                      std::back_inserter(merged));
                doc_ids = std::move(merged);
            }
            if (doc_ids.empty()) break;
        }
        for (std::uint32_t doc_id : doc_ids) {
            const SentenceDoc& doc = index.docs()[doc_id];
            const auto& tokens = query.field == Field::Title ? doc.title_tokens : doc.body_tokens;
            if (phrase.size() > 1 && !contains_phrase(tokens, phrase)) continue;
            double score = 0.0;
            for (const auto& word : phrase) {
                std::uint32_t df = index.doc_freq(query.field, word);
                std::uint32_t tf = 0;
                for (const auto& t : tokens)
                    if (t == word) ++tf;
                double norm = static_cast<double>(tokens.size()) /
                              std::max(index.avg_field_len(query.field), 1e-9);
                double tf_part = (tf * (kBm25K1 + 1.0)) /
                                 (tf + kBm25K1 * (1.0 - kBm25B + kBm25B * norm));
                score += bm25_idf(index.size(), df) * tf_part;
            }
            Acc& a = acc[doc_id];
            a.matched += 1;
            a.score += score;
        }
    }

    std::vector<Hit> hits;
    hits.reserve(acc.size());
    for (const auto& [doc_id, a] : acc) {
        if (query.must && a.matched < query.clauses.size()) continue;
        hits.push_back({doc_id, a.matched, a.score});
    }
    std::sort(hits.begin(), hits.end(), [&](const Hit& a, const Hit& b) {
        if (!query.must && a.matched_clauses != b.matched_clauses)
            return a.matched_clauses > b.matched_clauses;
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;  // docs are sorted by (title, index)
    });
    if (hits.size() > query.limit) hits.resize(query.limit);
    return hits;
}

std::string presented_text(const SentenceDoc& doc) {
    std::string folded_text = fold_case(doc.contextualized_text);
    std::string folded_title = fold_case(doc.page_title_display);
    if (folded_text.find(folded_title) != std::string::npos) return doc.contextualized_text;
    return doc.page_title_display + " " + doc.contextualized_text;
}

std::vector<Candidate> collect_candidates(const std::vector<Query>& queries,
                                          const IndexedCorpus& index) {
    std::vector<Candidate> candidates;
    std::unordered_map<std::uint32_t, std::size_t> seen;  // doc_id -> candidate slot
    for (const auto& query : queries) {
        for (const Hit& hit : execute(query, index)) {
            auto it = seen.find(hit.doc_id);
            if (it != seen.end()) {
                candidates[it->second].source_queries.insert(query.qtype);
                continue;
            }
            const SentenceDoc& doc = index.docs()[hit.doc_id];
            Candidate cand;
            cand.doc_id = hit.doc_id;
            cand.retrieval_score = hit.score;
            cand.source_queries.insert(query.qtype);
            cand.presented_text = presented_text(doc);
            seen.emplace(hit.doc_id, candidates.size());
            candidates.push_back(std::move(cand));
        }
    }
    return candidates;
}

}  // namespace vf
