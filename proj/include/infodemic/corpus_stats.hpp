#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

#include "infodemic/corpus.hpp"
#include "infodemic/features.hpp"

namespace infodemic {

struct LabelStats {
    std::size_t posts = 0;
    double mean_words = 0.0;  // 0 when posts == 0, see `empty`
    double mean_chars = 0.0;
    bool empty = true;
    std::size_t hashtag_total = 0;
    std::size_t hashtag_unique = 0;  // distinct normalized tags
    std::size_t mention_total = 0;
    std::size_t mention_unique = 0;
};

struct CorpusStats {
    LabelStats fake;
    LabelStats real;
    std::size_t rows_with_hashtags = 0;
    std::size_t rows_with_mentions = 0;
    std::size_t rows_with_both = 0;

    const LabelStats& of(Label label) const { return label == Label::Fake ? fake : real; }
};

/// `features` must be aligned one-to-one with `corpus.posts`.
CorpusStats corpus_stats(const Corpus& corpus, std::span<const BehavioralFeatures> features);

/// Features for every post, sentiment classified on the raw text and counts
/// taken from the text after elimination.
std::vector<BehavioralFeatures> corpus_features(const Corpus& corpus, std::span<const SentimentLabel> sentiment,
                                                EliminationMode mode = EliminationMode::None);

nlohmann::json to_json(const CorpusStats& stats);

}  // namespace infodemic
