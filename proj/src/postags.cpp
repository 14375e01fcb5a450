#include "vf/postags.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "vf/tokenize.hpp"

namespace vf {

namespace {

// Closed-class lexicon. Lookup is on the case-folded form.
const std::unordered_map<std::string, std::string>& lexicon() {
    static const std::unordered_map<std::string, std::string> lex = {
        // determiners / articles
        {"the", "DT"}, {"a", "DT"}, {"an", "DT"}, {"this", "DT"}, {"that", "DT"},
        {"these", "DT"}, {"those", "DT"}, {"each", "DT"}, {"every", "DT"}, {"some", "DT"},
        {"any", "DT"}, {"no", "DT"}, {"all", "DT"}, {"both", "DT"},
        // auxiliaries and common verbs
        {"is", "VBZ"}, {"are", "VBP"}, {"was", "VBD"}, {"were", "VBD"}, {"be", "VB"},
        {"been", "VBN"}, {"being", "VBG"}, {"am", "VBP"}, {"has", "VBZ"}, {"have", "VBP"},
        {"had", "VBD"}, {"having", "VBG"}, {"do", "VBP"}, {"does", "VBZ"}, {"did", "VBD"},
        {"will", "MD"}, {"would", "MD"}, {"can", "MD"}, {"could", "MD"}, {"shall", "MD"},
        {"should", "MD"}, {"may", "MD"}, {"might", "MD"}, {"must", "MD"},
        {"belong", "VBP"}, {"belongs", "VBZ"}, {"belonged", "VBD"},
        {"raises", "VBZ"}, {"raise", "VBP"}, {"raised", "VBD"},
        {"says", "VBZ"}, {"said", "VBD"}, {"made", "VBD"}, {"make", "VBP"}, {"makes", "VBZ"},
        {"won", "VBD"}, {"wins", "VBZ"}, {"win", "VBP"}, {"became", "VBD"}, {"become", "VBP"},
        // pronouns
        {"i", "PRP"}, {"you", "PRP"}, {"he", "PRP"}, {"she", "PRP"}, {"it", "PRP"},
        {"we", "PRP"}, {"they", "PRP"}, {"him", "PRP"}, {"her", "PRP"}, {"them", "PRP"},
        {"its", "PRP$"}, {"his", "PRP$"}, {"their", "PRP$"}, {"my", "PRP$"}, {"your", "PRP$"},
        {"who", "WP"}, {"what", "WP"}, {"which", "WDT"}, {"whose", "WP$"},
        // prepositions / subordinators
        {"of", "IN"}, {"in", "IN"}, {"on", "IN"}, {"at", "IN"}, {"by", "IN"}, {"for", "IN"},
        {"with", "IN"}, {"from", "IN"}, {"to", "TO"}, {"into", "IN"}, {"as", "IN"},
        {"about", "IN"}, {"than", "IN"}, {"after", "IN"}, {"before", "IN"}, {"between", "IN"},
        {"during", "IN"}, {"under", "IN"}, {"over", "IN"}, {"through", "IN"}, {"against", "IN"},
        {"if", "IN"}, {"because", "IN"}, {"while", "IN"}, {"since", "IN"},
        // conjunctions
        {"and", "CC"}, {"or", "CC"}, {"but", "CC"}, {"nor", "CC"}, {"yet", "CC"},
        // particles / negation / existential
        {"not", "RB"}, {"n't", "RB"}, {"there", "EX"},
        // common adverbs that no suffix rule catches
        {"very", "RB"}, {"also", "RB"}, {"only", "RB"}, {"never", "RB"}, {"always", "RB"},
        {"often", "RB"}, {"again", "RB"}, {"still", "RB"}, {"too", "RB"}, {"well", "RB"},
        {"most", "RBS"}, {"more", "RBR"}, {"now", "RB"}, {"then", "RB"}, {"here", "RB"},
        // common adjectives without marker suffixes
        {"good", "JJ"}, {"bad", "JJ"}, {"new", "JJ"}, {"old", "JJ"}, {"high", "JJ"},
        {"low", "JJ"}, {"big", "JJ"}, {"small", "JJ"}, {"long", "JJ"}, {"short", "JJ"},
        {"first", "JJ"}, {"last", "JJ"}, {"same", "JJ"}, {"own", "JJ"}, {"other", "JJ"},
        {"several", "JJ"}, {"many", "JJ"}, {"few", "JJ"}, {"major", "JJ"},
        {"american", "JJ"}, {"british", "JJ"}, {"scottish", "JJ"}, {"english", "JJ"},
        {"french", "JJ"}, {"german", "JJ"},
        // cardinal words
        {"one", "CD"}, {"two", "CD"}, {"three", "CD"}, {"four", "CD"}, {"five", "CD"},
        {"six", "CD"}, {"seven", "CD"}, {"eight", "CD"}, {"nine", "CD"}, {"ten", "CD"},
        {"million", "CD"}, {"billion", "CD"}, {"thousand", "CD"}, {"hundred", "CD"},
    };
    return lex;
}

bool has_digit(std::string_view w) {
    return std::any_of(w.begin(), w.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool all_digits_or_marks(std::string_view w) {
    return std::all_of(w.begin(), w.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '.' || c == ',' || c == '-' || c == '/';
    });
}

bool ends_with(std::string_view w, std::string_view suffix) {
    return w.size() > suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::string tag_word(const std::string& surface, bool sentence_initial) {
    if (surface.empty()) return "NN";
    unsigned char first = static_cast<unsigned char>(surface[0]);
    if (!std::isalnum(first) && first < 0x80) {
        if (surface == "." || surface == "!" || surface == "?") return ".";
        if (surface == ",") return ",";
        if (surface == ":" || surface == ";") return ":";
        if (surface == "(") return "-LRB-";
        if (surface == ")") return "-RRB-";
        if (surface == "$") return "$";
        if (surface == "\"" || surface == "''" || surface == "``") return "''";
        return "SYM";
    }
    if (has_digit(surface) && all_digits_or_marks(surface)) return "CD";

    std::string folded = fold_case(surface);
    if (auto it = lexicon().find(folded); it != lexicon().end()) return it->second;

    bool capitalized = std::isupper(first) != 0;
    if (capitalized && !sentence_initial) return ends_with(folded, "s") ? "NNPS" : "NNP";

    // suffix rules
    if (ends_with(folded, "ly")) return "RB";
    if (ends_with(folded, "ing")) return "VBG";
    if (ends_with(folded, "ed")) return "VBD";
    if (ends_with(folded, "ful") || ends_with(folded, "ous") || ends_with(folded, "ive") ||
        ends_with(folded, "able") || ends_with(folded, "ible") || ends_with(folded, "ical") ||
        ends_with(folded, "less") || ends_with(folded, "ish") || ends_with(folded, "est"))
        return "JJ";
    if (ends_with(folded, "ion") || ends_with(folded, "ment") || ends_with(folded, "ness") ||
        ends_with(folded, "ity") || ends_with(folded, "ism") || ends_with(folded, "ance") ||
        ends_with(folded, "ence"))
        return "NN";
    if (capitalized) return ends_with(folded, "s") ? "NNPS" : "NNP";
    if (ends_with(folded, "s") && !ends_with(folded, "ss")) return "NNS";
    return "NN";
}

}  // namespace

TaggedText tag(std::string_view text, const std::optional<TaggedText>& precomputed) {
    if (precomputed) return *precomputed;
    TaggedText out;
    std::vector<std::string> surfaces = tokenize_surface(text);
    bool sentence_initial = true;
    for (const auto& s : surfaces) {
        std::string t = tag_word(s, sentence_initial);
        sentence_initial = (t == ".");
        out.tokens.emplace_back(s, std::move(t));
    }
    return out;
}

std::optional<PosCategory> category_of(std::string_view penn_tag) {
    if (penn_tag.starts_with("VB")) return PosCategory::Verb;
    if (penn_tag.starts_with("NN")) return PosCategory::Noun;
    if (penn_tag.starts_with("JJ")) return PosCategory::Adjective;
    if (penn_tag.starts_with("RB")) return PosCategory::Adverb;
    if (penn_tag == "CD") return PosCategory::Number;
    return std::nullopt;
}

PointScore score(const TaggedText& claim, const TaggedText& candidate) {
    std::set<std::string> candidate_words;
    for (const auto& [surface, tag_] : candidate.tokens)
        candidate_words.insert(fold_case(surface));

    std::map<PosCategory, std::set<std::string>> claim_words;
    for (const auto& [surface, tag_] : claim.tokens)
        if (auto cat = category_of(tag_))
            claim_words[*cat].insert(fold_case(surface));

    PointScore result;
    for (PosCategory cat : kAllCategories) {
        int missing = 0;
        if (auto it = claim_words.find(cat); it != claim_words.end())
            for (const auto& w : it->second)
                if (!candidate_words.count(w)) ++missing;
        result.per_category[cat] = std::max(0, 3 - missing);
        result.total += result.per_category[cat];
    }
    return result;
}

std::vector<TaggedText> batch_tag(const std::vector<std::string>& texts, unsigned workers) {
    std::vector<TaggedText> out(texts.size());
    if (workers <= 1 || texts.size() < 2) {
        for (std::size_t i = 0; i < texts.size(); ++i) out[i] = tag(texts[i]);
        return out;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(texts.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < texts.size(); i += workers) out[i] = tag(texts[i]);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

TagStore TagStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tag file: " + path);
    TagStore store;
    std::string line;
    while (std::getline(in, line)) {
        TaggedText tt;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && line[i] == ' ') ++i;
            std::size_t j = line.find(' ', i);
            if (j == std::string::npos) j = line.size();
            std::string_view item(line.data() + i, j - i);
            std::size_t sep = item.rfind('_');
            if (sep != std::string_view::npos && sep > 0)
                tt.tokens.emplace_back(std::string(item.substr(0, sep)),
                                       std::string(item.substr(sep + 1)));
            i = j;
        }
        store.lines_.push_back(std::move(tt));
    }
    return store;
}

std::optional<TaggedText> TagStore::at(std::size_t position) const {
    if (position >= lines_.size()) return std::nullopt;
    return lines_[position];
}

}  // namespace vf
