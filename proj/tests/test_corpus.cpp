#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vf/corpus.hpp"
#include "vf/tokenize.hpp"

using namespace vf;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("normalize_title replaces underscores with spaces") {
    CHECK(normalize_title("Northern_Isles") == "Northern Isles");
    CHECK(normalize_title("Walk_of_Life_(album)") == "Walk of Life (album)");
    CHECK(normalize_title("AI") == "AI");
}

TEST_CASE("contextualize replaces whole-word capitalized pronouns") {
    CHECK(contextualize("He was a painter.", "Claude Monet") == "Claude Monet was a painter.");
    CHECK(contextualize("The cat ate. It slept.", "Felix") == "The cat ate. Felix slept.");
    CHECK(contextualize("Items hit the shelf.", "X") == "Items hit the shelf.");
    // case-exact: lowercase forms survive unless the flag is set
    CHECK(contextualize("he said it.", "X") == "he said it.");
    CHECK(contextualize("he said it.", "X", true) == "X said X.");
    CHECK(contextualize("They are here. Theyre not.", "Alps") == "Alps are here. Theyre not.");
}

TEST_CASE("contextualize is idempotent without pronoun words in the title") {
    std::string once = contextualize("He left. She stayed.", "Claude Monet");
    CHECK(contextualize(once, "Claude Monet") == once);
}

TEST_CASE("keep_sentence filters empty and over-long sentences") {
    CHECK_FALSE(keep_sentence(""));
    CHECK_FALSE(keep_sentence("   \t"));
    CHECK_FALSE(keep_sentence(std::string(2001, 'a')));
    CHECK(keep_sentence(std::string(2000, 'a')));
    CHECK(keep_sentence("Scotland is a country."));
    // measured in codepoints, not bytes: 1500 two-byte chars = 3000 bytes, kept
    std::string two_byte;
    for (int i = 0; i < 1500; ++i) two_byte += "\xc3\xa9";
    CHECK(keep_sentence(two_byte));
}

TEST_CASE("keep_sentence is idempotent on retained sentences") {
    IngestStats stats;
    auto page = parse_wiki_record(
        R"({"id":"T","text":"","lines":"0\tAlpha.\n1\tBeta gamma."})", stats);
    REQUIRE(page.has_value());
    for (const auto& [idx, text] : page->sentences) CHECK(keep_sentence(text));
}

TEST_CASE("parse_wiki_record maps fields and filters rows") {
    IngestStats stats;
    auto page = parse_wiki_record(
        R"x({"id":"Walk_of_Life_(album)","text":"x","lines":"0\tFirst sentence.\n1\tSecond sentence.\tAnchor"})x",
        stats);
    REQUIRE(page.has_value());
    CHECK(page->title_display == "Walk of Life (album)");
    REQUIRE(page->sentences.size() == 2);
    CHECK(page->sentences[0] == std::pair<std::uint32_t, std::string>{0, "First sentence."});
    CHECK(page->sentences[1].second == "Second sentence.");  // anchor field dropped
    CHECK(stats.malformed_records == 0);
    CHECK(stats.malformed_rows == 0);
}

TEST_CASE("parse_wiki_record handles empty lines field") {
    IngestStats stats;
    auto page = parse_wiki_record(R"({"id":"Empty","text":"","lines":""})", stats);
    REQUIRE(page.has_value());
    CHECK(page->sentences.empty());
}

TEST_CASE("parse_wiki_record drops over-long sentences") {
    IngestStats stats;
    std::string record = R"({"id":"T","text":"","lines":"0\t)" + std::string(2500, 'a') + R"("})";
    auto page = parse_wiki_record(record, stats);
    REQUIRE(page.has_value());
    CHECK(page->sentences.empty());
    CHECK(stats.sentences_dropped == 1);
}

TEST_CASE("parse_wiki_record counts malformed input") {
    IngestStats stats;
    CHECK_FALSE(parse_wiki_record("not json at all", stats).has_value());
    CHECK_FALSE(parse_wiki_record(R"({"text":"no id"})", stats).has_value());
    CHECK(stats.malformed_records == 2);

    auto page = parse_wiki_record(
        R"({"id":"T","text":"","lines":"0\tGood row.\nno tab here\nx\tbad index\n0\tindex repeats."})",
        stats);
    REQUIRE(page.has_value());
    CHECK(page->sentences.size() == 1);
    CHECK(stats.malformed_rows == 3);  // missing tab, bad index, non-increasing index
}

TEST_CASE("make_sentence_doc round-trips one doc per retained sentence") {
    IngestStats stats;
    auto page = parse_wiki_record(
        R"({"id":"Claude_Monet","text":"","lines":"0\tClaude Monet was a French painter.\n1\tHe was a founder of French impressionist painting."})",
        stats);
    REQUIRE(page.has_value());
    REQUIRE(page->sentences.size() == 2);
    SentenceDoc doc = make_sentence_doc(*page, 1, page->sentences[1].second);
    CHECK(doc.page_title_raw == "Claude_Monet");
    CHECK(doc.contextualized_text ==
          "Claude Monet was a founder of French impressionist painting.");
    CHECK(doc.title_tokens == std::vector<std::string>{"claude", "monet"});
    CHECK(doc.body_tokens.front() == "claude");
}

TEST_CASE("load_dump on the fixture corpus") {
    IngestStats stats;
    auto docs = load_dump(std::string(VF_FIXTURE_DIR) + "/mini_dump.jsonl", stats);
    CHECK(stats.pages == 20);
    CHECK(stats.sentences_kept == 24);
    CHECK(docs.size() == 24);
    CHECK(stats.sentences_dropped == 1);   // the 2500-char Danube row
    CHECK(stats.malformed_rows == 1);      // the bad-index Danube row
    CHECK(stats.malformed_records == 0);
    for (const auto& doc : docs) CHECK(keep_sentence(doc.raw_text));
}

TEST_CASE("load_claims parses labels and evidence groups") {
    auto claims = load_claims(std::string(VF_FIXTURE_DIR) + "/claims.jsonl");
    REQUIRE(claims.size() == 12);
    CHECK(claims[0].id == 1);
    CHECK(claims[0].label == "SUPPORTS");
    REQUIRE(claims[0].evidence_groups.size() == 1);
    CHECK(claims[0].evidence_groups[0][0] ==
          std::pair<std::string, std::uint32_t>{"Scotland", 0});
    // NEI rows have null page/index quadruples -> no groups survive
    CHECK(claims[8].label == "NOT ENOUGH INFO");
    CHECK(claims[8].evidence_groups.empty());
}

TEST_CASE("load_claims rejects malformed lines") {
    std::string path = write_temp("vf_bad_claims.jsonl", "{\"id\":1,\"claim\":\"x\"}\nnot json\n");
    CHECK_THROWS(load_claims(path));
    std::filesystem::remove(path);
}
