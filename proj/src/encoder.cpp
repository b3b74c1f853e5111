#include "infodemic/encoder.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "infodemic/text.hpp"

namespace infodemic {

std::vector<std::string> encoder_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::u32string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(text::encode_utf8(current));
        current.clear();
    };
    for (char32_t cp : text::decode_utf8(text)) {
        if (text::is_letter(cp) || text::is_digit(cp)) {
            current.push_back(text::to_lower(cp));
        } else {
            flush();
            if (cp == '#' || cp == '@') tokens.emplace_back(1, static_cast<char>(cp));
        }
    }
    flush();
    return tokens;
}

Vocabulary::Vocabulary(std::map<std::string, int> ids) {
    for (auto& [token, id] : ids) {
        if (id < kFirstContentId || id >= kFeatureIdBase) {
            throw Error("vocabulary: id " + std::to_string(id) + " for '" + token + "' outside the content range");
        }
        ids_.emplace(token, id);
    }
    std::vector<int> seen;
    for (const auto& [token, id] : ids_) seen.push_back(id);
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] != kFirstContentId + static_cast<int>(i)) throw Error("vocabulary: content ids must be dense from 103");
    }
}

int Vocabulary::lookup(std::string_view token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

std::string Vocabulary::to_tsv() const {
    std::vector<std::pair<int, std::string>> by_id;
    for (const auto& [token, id] : ids_) by_id.emplace_back(id, token);
    std::sort(by_id.begin(), by_id.end());
    std::ostringstream out;
    for (const auto& [id, token] : by_id) out << token << '\t' << id << '\n';
    return out.str();
}

Vocabulary build_vocab(const std::vector<std::string>& texts, std::size_t min_freq) {
    if (min_freq == 0) throw Error("build_vocab: min_freq must be positive");
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& t : texts) {
        for (auto& tok : encoder_tokens(t)) ++freq[std::move(tok)];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [tok, n] : freq) {
        if (n >= min_freq) kept.emplace_back(tok, n);
    }
    constexpr std::size_t kCapacity = kFeatureIdBase - kFirstContentId;
    if (kept.size() >= kCapacity) {
        throw Error("build_vocab: " + std::to_string(kept.size()) + " tokens exceed the content id range; raise min_freq");
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::map<std::string, int> ids;
    int next = kFirstContentId;
    for (auto& [tok, n] : kept) ids.emplace(std::move(tok), next++);
    return Vocabulary(std::move(ids));
}

Vocabulary build_vocab(const Corpus& corpus, std::size_t min_freq) {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& p : corpus.posts) texts.push_back(p.text);
    return build_vocab(texts, min_freq);
}

bool TokenSequence::has_features() const {
    return std::any_of(ids.begin(), ids.end(), [](int id) { return id >= kFeatureIdBase; });
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_content) {
    TokenSequence seq;
    seq.ids.push_back(kBosId);
    for (const auto& tok : encoder_tokens(text)) {
        if (seq.ids.size() - 1 >= max_content) break;
        seq.ids.push_back(vocab.lookup(tok));
    }
    seq.ids.push_back(kEosId);
    return seq;
}

FeatureTokenIds feature_token_ids(const BehavioralFeatures& f) {
    auto band = [](int index, std::size_t value) {
        const auto clamped = std::min<std::size_t>(value, kFeatureBandWidth - 1);
        return kFeatureIdBase + index * kFeatureBandWidth + static_cast<int>(clamped);
    };
    if (f.sentiment_code != 0 && f.sentiment_code != 2 && f.sentiment_code != 4) {
        throw Error("feature_token_ids: sentiment code must be 0, 2 or 4");
    }
    return {band(0, static_cast<std::size_t>(f.sentiment_code)), band(1, f.word_count), band(2, f.char_count),
            band(3, f.hashtag_count), band(4, f.mention_count)};
}

TokenSequence inject_features(const TokenSequence& seq, const BehavioralFeatures& features) {
    if (seq.ids.size() < 2 || seq.ids.front() != kBosId || seq.ids.back() != kEosId) {
        throw Error("inject_features: sequence must start with 101 and end with 102");
    }
    if (seq.has_features()) throw Error("inject_features: sequence already carries feature ids");
    const auto block = feature_token_ids(features).as_array();
    TokenSequence out;
    out.ids.reserve(seq.ids.size() + block.size());
    out.ids.assign(seq.ids.begin(), seq.ids.end() - 1);
    out.ids.insert(out.ids.end(), block.begin(), block.end());
    out.ids.push_back(kEosId);
    return out;
}

TokenSequence prepare_sequence(std::string_view text, SentimentLabel sentiment, const Vocabulary& vocab,
                               const SequenceOptions& options) {
    const auto cleaned = eliminate(text, options.elimination);
    auto seq = tokenize(cleaned, vocab, options.max_content);
    if (options.inject) seq = inject_features(seq, extract_features(cleaned, sentiment));
    return seq;
}

}  // namespace infodemic
