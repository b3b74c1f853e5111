#include "infodemic/features.hpp"

#include <algorithm>
#include <set>

#include "infodemic/text.hpp"

namespace infodemic {

namespace {

bool is_tag_char(char32_t cp) { return text::is_letter(cp) || text::is_digit(cp) || cp == '_'; }

std::size_t tag_run(const std::u32string& cps, std::size_t start) {
    std::size_t end = start;
    while (end < cps.size() && is_tag_char(cps[end])) ++end;
    return end;
}

bool drops(EliminationMode mode, char32_t sigil) {
    switch (mode) {
        case EliminationMode::None: return false;
        case EliminationMode::DropHashtags: return sigil == '#';
        case EliminationMode::DropMentions: return sigil == '@';
        case EliminationMode::DropBoth: return sigil == '#' || sigil == '@';
    }
    return false;
}

}  // namespace

TagSet extract_tags(std::string_view text) {
    TagSet tags;
    const auto cps = text::decode_utf8(text);
    std::size_t i = 0;
    while (i < cps.size()) {
        const char32_t c = cps[i];
        if (c == '#' || c == '@') {
            const std::size_t end = tag_run(cps, i + 1);
            if (end > i + 1) {
                auto tag = text::encode_utf8(std::u32string_view(cps).substr(i + 1, end - i - 1));
                (c == '#' ? tags.hashtags : tags.mentions).push_back(std::move(tag));
                i = end;
                continue;
            }
        }
        ++i;
    }
    return tags;
}

std::string normalize_tag(std::string_view tag) {
    std::u32string out;
    for (char32_t cp : text::decode_utf8(tag)) {
        if (text::is_letter(cp)) {
            out.push_back(text::to_lower(cp));
        } else if (text::is_digit(cp)) {
            out.push_back(cp);
        }
    }
    return text::encode_utf8(out);
}

std::array<double, 5> BehavioralFeatures::as_vector() const {
    return {static_cast<double>(sentiment_code), static_cast<double>(word_count), static_cast<double>(char_count),
            static_cast<double>(hashtag_count), static_cast<double>(mention_count)};
}

int sentiment_code(SentimentLabel label) {
    switch (label) {
        case SentimentLabel::VeryNegative:
        case SentimentLabel::Negative: return 0;
        case SentimentLabel::Neutral: return 2;
        case SentimentLabel::Positive:
        case SentimentLabel::VeryPositive: return 4;
    }
    return 2;
}

BehavioralFeatures extract_features(std::string_view text, SentimentLabel sentiment) {
    const auto tags = extract_tags(text);
    BehavioralFeatures f;
    f.word_count = text::word_count(text);
    f.char_count = text::char_count(text);
    f.hashtag_count = tags.hashtags.size();
    f.mention_count = tags.mentions.size();
    f.sentiment_code = sentiment_code(sentiment);
    return f;
}

std::string_view elimination_name(EliminationMode mode) {
    switch (mode) {
        case EliminationMode::None: return "none";
        case EliminationMode::DropHashtags: return "drop-hashtags";
        case EliminationMode::DropMentions: return "drop-mentions";
        case EliminationMode::DropBoth: return "drop-both";
    }
    return "none";
}

EliminationMode parse_elimination(std::string_view name) {
    for (auto mode : kEliminationModes) {
        if (elimination_name(mode) == name) return mode;
    }
    throw Error("unknown elimination mode '" + std::string(name) +
                "' (expected none, drop-hashtags, drop-mentions or drop-both)");
}

std::string eliminate(std::string_view text, EliminationMode mode) {
    if (mode == EliminationMode::None) return std::string(text);
    const auto cps = text::decode_utf8(text);
    std::u32string out;
    out.reserve(cps.size());
    bool changed = false;
    std::size_t i = 0;
    while (i < cps.size()) {
        const char32_t c = cps[i];
        if (drops(mode, c)) {
            const std::size_t end = tag_run(cps, i + 1);
            if (end > i + 1) {
                changed = true;
                bool spaced = false;
                while (!out.empty() && text::is_space(out.back())) {
                    out.pop_back();
                    spaced = true;
                }
                i = end;
                while (i < cps.size() && text::is_space(cps[i])) {
                    ++i;
                    spaced = true;
                }
                if (spaced && !out.empty() && i < cps.size()) out.push_back(' ');
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    // untouched input keeps its exact bytes
    return changed ? text::encode_utf8(out) : std::string(text);
}

std::size_t TagFrequencyTable::total() const {
    std::size_t t = 0;
    for (const auto& e : entries) t += e.second;
    return t;
}

std::map<std::string, std::size_t> tag_counts(const Corpus& corpus, TagKind kind, std::optional<Label> filter) {
    std::map<std::string, std::size_t> counts;
    for (const auto& post : corpus.posts) {
        if (filter && post.label != *filter) continue;
        const auto tags = extract_tags(post.text);
        for (const auto& raw : kind == TagKind::Hashtag ? tags.hashtags : tags.mentions) {
            auto norm = normalize_tag(raw);
            if (!norm.empty()) ++counts[norm];
        }
    }
    return counts;
}

namespace {
TagFrequencyTable ranked(TagKind kind, std::vector<std::pair<std::string, std::size_t>> entries, std::size_t top_n) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (entries.size() > top_n) entries.resize(top_n);
    return {kind, std::move(entries)};
}
}  // namespace

TagFrequencyTable tag_frequency(const Corpus& corpus, TagKind kind, std::optional<Label> filter, std::size_t top_n) {
    if (top_n == 0) throw Error("tag_frequency: top_n must be positive");
    auto counts = tag_counts(corpus, kind, filter);
    return ranked(kind, {counts.begin(), counts.end()}, top_n);
}

TagFrequencyTable exclusive_tags(const TagFrequencyTable& of, const TagFrequencyTable& others, std::size_t top_n) {
    std::set<std::string> excluded;
    for (const auto& e : others.entries) excluded.insert(e.first);
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& e : of.entries) {
        if (!excluded.contains(e.first)) kept.push_back(e);
    }
    return ranked(of.kind, std::move(kept), top_n);
}

}  // namespace infodemic
