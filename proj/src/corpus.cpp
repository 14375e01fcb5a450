#include "vf/corpus.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vf/tokenize.hpp"

namespace vf {

namespace {

using nlohmann::json;

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

const char* kPronouns[] = {"He", "She", "It", "They"};
const char* kPronounsLower[] = {"he", "she", "it", "they"};

}  // namespace

std::string normalize_title(std::string_view title_raw) {
    std::string out(title_raw);
    for (char& c : out)
        if (c == '_') c = ' ';
    return out;
}

std::string contextualize(std::string_view sentence, std::string_view title_display,
                          bool lowercase_too) {
    std::string out;
    out.reserve(sentence.size());
    std::size_t i = 0;
    while (i < sentence.size()) {
        if (!is_word_char(static_cast<unsigned char>(sentence[i]))) {
            out.push_back(sentence[i]);
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < sentence.size() && is_word_char(static_cast<unsigned char>(sentence[j]))) ++j;
        std::string_view word = sentence.substr(i, j - i);
        bool replaced = false;
        for (const char* p : kPronouns) {
            if (word == p) {
                out.append(title_display);
                replaced = true;
                break;
            }
        }
        if (!replaced && lowercase_too) {
            for (const char* p : kPronounsLower) {
                if (word == p) {
                    out.append(title_display);
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out.append(word);
        i = j;
    }
    return out;
}

bool keep_sentence(std::string_view sentence) {
    if (trim(sentence).empty()) return false;
    return codepoint_count(sentence) <= 2000;
}

std::optional<Page> parse_wiki_record(std::string_view record, IngestStats& stats) {
    json j = json::parse(record, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string()) {
        ++stats.malformed_records;
        return std::nullopt;
    }
    Page page;
    page.title_raw = j["id"].get<std::string>();
    page.title_display = normalize_title(page.title_raw);

    std::string lines = j.value("lines", std::string());
    std::size_t pos = 0;
    while (pos <= lines.size() && !lines.empty()) {
        std::size_t nl = lines.find('\n', pos);
        std::string_view row(lines.data() + pos, (nl == std::string::npos ? lines.size() : nl) - pos);
        if (!row.empty()) {
            std::size_t tab = row.find('\t');
            if (tab == std::string_view::npos) {
                ++stats.malformed_rows;
            } else {
                std::uint32_t idx = 0;
                auto [p, ec] = std::from_chars(row.data(), row.data() + tab, idx);
                if (ec != std::errc() || p != row.data() + tab) {
                    ++stats.malformed_rows;
                } else {
                    std::string_view rest = row.substr(tab + 1);
                    std::size_t tab2 = rest.find('\t');
                    std::string_view sent = tab2 == std::string_view::npos ? rest : rest.substr(0, tab2);
                    if (!page.sentences.empty() && idx <= page.sentences.back().first) {
                        ++stats.malformed_rows;  // indices must strictly increase
                    } else if (keep_sentence(sent)) {
                        page.sentences.emplace_back(idx, std::string(sent));
                    } else {
                        ++stats.sentences_dropped;
                    }
                }
            }
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return page;
}

SentenceDoc make_sentence_doc(const Page& page, std::uint32_t index, const std::string& text,
                              bool lowercase_pronouns) {
    SentenceDoc doc;
    doc.page_title_raw = page.title_raw;
    doc.page_title_display = page.title_display;
    doc.sentence_index = index;
    doc.raw_text = text;
    doc.contextualized_text = contextualize(text, page.title_display, lowercase_pronouns);
    doc.title_tokens = tokenize(page.title_display);
    doc.body_tokens = tokenize(doc.contextualized_text);
    return doc;
}

std::vector<SentenceDoc> load_dump(const std::string& path, IngestStats& stats,
                                   bool lowercase_pronouns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dump file: " + path);
    std::vector<SentenceDoc> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto page = parse_wiki_record(line, stats);
        if (!page) continue;
        ++stats.pages;
        for (const auto& [idx, text] : page->sentences) {
            docs.push_back(make_sentence_doc(*page, idx, text, lowercase_pronouns));
            ++stats.sentences_kept;
        }
    }
    return docs;
}

std::vector<ClaimRecord> load_claims(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open claim file: " + path);
    std::vector<ClaimRecord> claims;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw std::runtime_error("bad claim record at line " + std::to_string(lineno));
        ClaimRecord rec;
        rec.id = j.at("id").get<std::int64_t>();
        rec.claim = j.at("claim").get<std::string>();
        rec.label = j.value("label", std::string());
        if (j.contains("evidence") && j["evidence"].is_array()) {
            for (const auto& group : j["evidence"]) {
                std::vector<std::pair<std::string, std::uint32_t>> g;
                for (const auto& item : group) {
                    if (!item.is_array() || item.size() < 4) continue;
                    if (item[2].is_null() || item[3].is_null()) continue;
                    g.emplace_back(item[2].get<std::string>(), item[3].get<std::uint32_t>());
                }
                if (!g.empty()) rec.evidence_groups.push_back(std::move(g));
            }
        }
        claims.push_back(std::move(rec));
    }
    return claims;
}

}  // namespace vf
