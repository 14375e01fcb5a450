#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vf {

struct Page {
    std::string title_raw;      // underscored form, as in the dump
    std::string title_display;  // underscores replaced by spaces
    std::vector<std::pair<std::uint32_t, std::string>> sentences;  // (index, text)
};

struct SentenceDoc {
    std::string page_title_raw;
    std::string page_title_display;
    std::uint32_t sentence_index = 0;
    std::string raw_text;
    std::string contextualized_text;
    std::vector<std::string> title_tokens;
    std::vector<std::string> body_tokens;
};

struct IngestStats {
    std::size_t pages = 0;
    std::size_t sentences_kept = 0;
    std::size_t sentences_dropped = 0;
    std::size_t malformed_records = 0;
    std::size_t malformed_rows = 0;
};

std::string normalize_title(std::string_view title_raw);

// Replaces whole-word, case-exact "He", "She", "It", "They" with the page
// title. With `lowercase_too` the lowercase forms are replaced as well.
std::string contextualize(std::string_view sentence, std::string_view title_display,
                          bool lowercase_too = false);

bool keep_sentence(std::string_view sentence);

// Parses one line of the dump file. Returns nullopt for unparseable records;
// the caller counts those. Malformed sentence rows inside a good record are
// skipped and tallied in `stats`.
std::optional<Page> parse_wiki_record(std::string_view record, IngestStats& stats);

SentenceDoc make_sentence_doc(const Page& page, std::uint32_t index, const std::string& text,
                              bool lowercase_pronouns = false);

// Reads the whole dump file into sentence docs (filtered, contextualized).
std::vector<SentenceDoc> load_dump(const std::string& path, IngestStats& stats,
                                   bool lowercase_pronouns = false);

// One gold/test claim record.
struct ClaimRecord {
    std::int64_t id = 0;
    std::string claim;
    std::string label;  // empty when unlabeled
    // each group is a list of (page_title_raw, sentence_index)
    std::vector<std::vector<std::pair<std::string, std::uint32_t>>> evidence_groups;
};

std::vector<ClaimRecord> load_claims(const std::string& path);

}  // namespace vf
