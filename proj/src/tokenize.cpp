#include "vf/tokenize.hpp"

#include <cctype>

namespace vf {

namespace {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

}  // namespace

std::string fold_case(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (unsigned char c : word)
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        tokens.push_back(fold_case(text.substr(i, j - i)));
        i = j;
    }
    return tokens;
}

std::vector<std::string> tokenize_surface(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (is_word_byte(c)) {
            std::size_t j = i;
            while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
            tokens.emplace_back(text.substr(i, j - i));
            i = j;
        } else {
            // run of identical punctuation collapses ("..." stays one token)
            std::size_t j = i;
            while (j < text.size() && text[j] == text[i]) ++j;
            tokens.emplace_back(text.substr(i, j - i));
            i = j;
        }
    }
    return tokens;
}

std::size_t codepoint_count(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::string trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    return std::string(text.substr(b, e - b));
}

}  // namespace vf
