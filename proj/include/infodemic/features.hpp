#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodemic/corpus.hpp"
#include "infodemic/sentiment.hpp"

namespace infodemic {

/// Raw tags without their sigil, in order of occurrence.
struct TagSet {
    std::vector<std::string> hashtags;
    std::vector<std::string> mentions;
};

/// A tag is '#' or '@' followed by a maximal run of letters, digits or '_'.
TagSet extract_tags(std::string_view text);

/// Lowercases and keeps only letters and digits: "Covid_19" -> "covid19".
std::string normalize_tag(std::string_view tag);

struct BehavioralFeatures {
    std::size_t word_count = 0;
    std::size_t char_count = 0;
    std::size_t hashtag_count = 0;
    std::size_t mention_count = 0;
    int sentiment_code = 2;

    /// (sentiment, words, chars, hashtags, mentions), the SVM input order.
    std::array<double, 5> as_vector() const;
    bool operator==(const BehavioralFeatures&) const = default;
};

/// Negative classes -> 0, Neutral -> 2, positive classes -> 4.
int sentiment_code(SentimentLabel label);

BehavioralFeatures extract_features(std::string_view text, SentimentLabel sentiment);

enum class EliminationMode { None, DropHashtags, DropMentions, DropBoth };

inline constexpr std::array<EliminationMode, 4> kEliminationModes = {
    EliminationMode::None, EliminationMode::DropHashtags, EliminationMode::DropMentions,
    EliminationMode::DropBoth};

std::string_view elimination_name(EliminationMode mode);  // none, drop-hashtags, ...
EliminationMode parse_elimination(std::string_view name);

/// Deletes each eliminated tag together with its sigil. Whitespace touching a
/// deletion collapses to one space, or disappears at either end of the text.
std::string eliminate(std::string_view text, EliminationMode mode);

enum class TagKind { Hashtag, Mention };

struct TagFrequencyTable {
    TagKind kind = TagKind::Hashtag;
    /// Descending by count, ties broken lexicographically.
    std::vector<std::pair<std::string, std::size_t>> entries;

    std::size_t total() const;
};

/// Occurrence counts of normalized tags over posts matching the filter.
/// Tags that normalize to the empty string are left out.
std::map<std::string, std::size_t> tag_counts(const Corpus& corpus, TagKind kind,
                                              std::optional<Label> filter = std::nullopt);

TagFrequencyTable tag_frequency(const Corpus& corpus, TagKind kind, std::optional<Label> filter = std::nullopt,
                                std::size_t top_n = SIZE_MAX);

/// Entries of `of` whose tag never appears in `others`, order preserved.
TagFrequencyTable exclusive_tags(const TagFrequencyTable& of, const TagFrequencyTable& others,
                                 std::size_t top_n = SIZE_MAX);

}  // namespace infodemic
