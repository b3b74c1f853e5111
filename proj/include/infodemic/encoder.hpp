#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "infodemic/corpus.hpp"
#include "infodemic/features.hpp"

namespace infodemic {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 100;
inline constexpr int kBosId = 101;
inline constexpr int kEosId = 102;
inline constexpr int kFirstContentId = 103;
/// Content ids stay below this; feature ids live in [31000, 36000).
inline constexpr int kFeatureIdBase = 31000;
inline constexpr int kFeatureBandWidth = 1000;
inline constexpr int kFeatureCount = 5;
inline constexpr std::size_t kMaxContentTokens = 128;

/// Lowercased maximal runs of letters/digits; every '#' and '@' is a token of its own.
std::vector<std::string> encoder_tokens(std::string_view text);

class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::map<std::string, int> ids);

    /// UNK for tokens outside the vocabulary.
    int lookup(std::string_view token) const;
    bool contains(std::string_view token) const;
    std::size_t size() const { return ids_.size(); }
    /// One past the largest content id (103 for an empty vocabulary).
    int id_bound() const { return kFirstContentId + static_cast<int>(ids_.size()); }
    const std::map<std::string, int, std::less<>>& ids() const { return ids_; }

    /// `token<TAB>id` lines in id order.
    std::string to_tsv() const;

private:
    std::map<std::string, int, std::less<>> ids_;
};

/// Tokens seen at least `min_freq` times get ids from 103 upward by descending
/// frequency, ties in lexicographic order.
Vocabulary build_vocab(const std::vector<std::string>& texts, std::size_t min_freq);
Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq);

struct TokenSequence {
    std::vector<int> ids;

    bool has_features() const;
    bool operator==(const TokenSequence&) const = default;
};

/// [101, content ids..., 102] with at most `max_content` content ids.
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_content = kMaxContentTokens);

/// Offset-encoded behavioral features; counts above 999 clamp to 999 so the
/// bands never overlap.
struct FeatureTokenIds {
    int sentiment = 0, words = 0, chars = 0, hashtags = 0, mentions = 0;

    std::array<int, kFeatureCount> as_array() const { return {sentiment, words, chars, hashtags, mentions}; }
};

FeatureTokenIds feature_token_ids(const BehavioralFeatures& features);

/// Inserts the five feature ids immediately before the closing 102.
TokenSequence inject_features(const TokenSequence& seq, const BehavioralFeatures& features);

/// How raw text becomes a model input.
struct SequenceOptions {
    bool inject = false;
    EliminationMode elimination = EliminationMode::None;
    std::size_t max_content = kMaxContentTokens;
};

/// Eliminates tags, tokenizes, and (when injecting) appends features counted on
/// the eliminated text with the given sentiment.
TokenSequence prepare_sequence(std::string_view text, SentimentLabel sentiment, const Vocabulary& vocab,
                               const SequenceOptions& options);

}  // namespace infodemic
