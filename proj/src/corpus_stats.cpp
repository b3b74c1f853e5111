#include "infodemic/corpus_stats.hpp"

#include <set>

#include "infodemic/text.hpp"

namespace infodemic {

CorpusStats corpus_stats(const Corpus& corpus, std::span<const BehavioralFeatures> features) {
    if (features.size() != corpus.size()) {
        throw Error("corpus_stats: " + std::to_string(features.size()) + " feature records for " +
                    std::to_string(corpus.size()) + " posts");
    }
    CorpusStats stats;
    std::set<std::string> unique_hashtags[2], unique_mentions[2];
    double words[2] = {0, 0}, chars[2] = {0, 0};

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& post = corpus.posts[i];
        const auto& f = features[i];
        const int side = post.label == Label::Fake ? 0 : 1;
        LabelStats& ls = side == 0 ? stats.fake : stats.real;
        ++ls.posts;
        words[side] += static_cast<double>(f.word_count);
        chars[side] += static_cast<double>(f.char_count);
        ls.hashtag_total += f.hashtag_count;
        ls.mention_total += f.mention_count;

        const auto tags = extract_tags(post.text);
        for (const auto& t : tags.hashtags) {
            if (auto n = normalize_tag(t); !n.empty()) unique_hashtags[side].insert(std::move(n));
        }
        for (const auto& t : tags.mentions) {
            if (auto n = normalize_tag(t); !n.empty()) unique_mentions[side].insert(std::move(n));
        }
        stats.rows_with_hashtags += f.hashtag_count > 0;
        stats.rows_with_mentions += f.mention_count > 0;
        stats.rows_with_both += (f.hashtag_count > 0 && f.mention_count > 0);
    }
    for (int side : {0, 1}) {
        LabelStats& ls = side == 0 ? stats.fake : stats.real;
        ls.hashtag_unique = unique_hashtags[side].size();
        ls.mention_unique = unique_mentions[side].size();
        ls.empty = ls.posts == 0;
        if (!ls.empty) {
            ls.mean_words = words[side] / static_cast<double>(ls.posts);
            ls.mean_chars = chars[side] / static_cast<double>(ls.posts);
        }
    }
    return stats;
}

std::vector<BehavioralFeatures> corpus_features(const Corpus& corpus, std::span<const SentimentLabel> sentiment,
                                                EliminationMode mode) {
    if (sentiment.size() != corpus.size()) throw Error("corpus_features: sentiment labels not aligned with posts");
    std::vector<BehavioralFeatures> out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out.push_back(extract_features(eliminate(corpus.posts[i].text, mode), sentiment[i]));
    }
    return out;
}

namespace {
nlohmann::json label_json(const LabelStats& s) {
    return {{"posts", s.posts},
            {"mean_words", s.mean_words},
            {"mean_chars", s.mean_chars},
            {"empty", s.empty},
            {"hashtags", {{"total", s.hashtag_total}, {"unique", s.hashtag_unique}}},
            {"mentions", {{"total", s.mention_total}, {"unique", s.mention_unique}}}};
}
}  // namespace

nlohmann::json to_json(const CorpusStats& stats) {
    return {{"fake", label_json(stats.fake)},
            {"real", label_json(stats.real)},
            {"rows_with_hashtags", stats.rows_with_hashtags},
            {"rows_with_mentions", stats.rows_with_mentions},
            {"rows_with_both", stats.rows_with_both}};
}

}  // namespace infodemic
