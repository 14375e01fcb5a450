#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vf {

struct TaggedText {
    std::vector<std::pair<std::string, std::string>> tokens;  // (surface, Penn tag)
    std::size_t size() const { return tokens.size(); }
};

enum class PosCategory { Verb, Noun, Adjective, Adverb, Number };
constexpr std::array<PosCategory, 5> kAllCategories = {
    PosCategory::Verb, PosCategory::Noun, PosCategory::Adjective, PosCategory::Adverb,
    PosCategory::Number};

struct PointScore {
    std::map<PosCategory, int> per_category;  // each in [0,3]
    int total = 0;                            // sum, in [0,15]
};

// Rule/lexicon tagger. When `precomputed` is given it is returned as-is.
TaggedText tag(std::string_view text, const std::optional<TaggedText>& precomputed = {});

std::optional<PosCategory> category_of(std::string_view penn_tag);

PointScore score(const TaggedText& claim, const TaggedText& candidate);

// Order-preserving parallel tagging; output element-wise equals a
// sequential run.
std::vector<TaggedText> batch_tag(const std::vector<std::string>& texts,
                                  unsigned workers = 1);

// "word_TAG word_TAG ..." lines, positionally aligned with the input file.
class TagStore {
public:
    TagStore() = default;
    static TagStore load(const std::string& path);
    std::optional<TaggedText> at(std::size_t position) const;

private:
    std::vector<TaggedText> lines_;
};

}  // namespace vf
