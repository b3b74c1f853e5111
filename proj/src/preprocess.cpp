#include "infodemic/preprocess.hpp"

#include <array>

#include "infodemic/text.hpp"

namespace infodemic {

const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "ain", "all", "am", "an", "and", "any", "are",
        "aren", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
        "by", "can", "couldn", "d", "did", "didn", "do", "does", "doesn", "doing", "don", "down", "during",
        "each", "few", "for", "from", "further", "had", "hadn", "has", "hasn", "have", "haven", "having",
        "he", "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into",
        "is", "isn", "it", "its", "itself", "just", "ll", "m", "ma", "me", "mightn", "more", "most",
        "mustn", "my", "myself", "needn", "no", "nor", "not", "now", "o", "of", "off", "on", "once", "only",
        "or", "other", "our", "ours", "ourselves", "out", "over", "own", "re", "s", "same", "shan", "she",
        "should", "shouldn", "so", "some", "such", "t", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too", "under",
        "until", "up", "ve", "very", "was", "wasn", "we", "were", "weren", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "won", "wouldn", "y", "you", "your", "yours",
        "yourself", "yourselves", "also", "would", "could", "said", "says", "via", "amp", "rt"};
    return words;
}

std::string stem(std::string_view word) {
    std::string w(word);
    constexpr std::size_t kMinStem = 3;
    static constexpr std::array<std::string_view, 5> kSuffixes = {"ing", "ed", "ly", "es", "s"};
    for (auto suffix : kSuffixes) {
        if (!w.ends_with(suffix) || w.size() < suffix.size() + kMinStem) continue;
        if (suffix == "s") {
            const char before = w[w.size() - 2];
            if (before == 's' || before == 'u' || before == 'i') break;
        }
        w.resize(w.size() - suffix.size());
        break;
    }
    if (w.size() > kMinStem && w.back() == 'e' && w[w.size() - 2] != 'e') w.pop_back();
    return w;
}

std::vector<std::string> preprocess_topic_text(std::string_view text, const PreprocessConfig& config) {
    std::vector<std::string> out;
    for (const auto& raw : text::split_whitespace(text)) {
        if (config.drop_urls) {
            std::string lower;
            for (char c : raw.substr(0, 8)) lower.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c);
            if (lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")) continue;
        }
        std::u32string letters;
        for (char32_t cp : text::decode_utf8(raw)) {
            if (text::is_letter(cp)) letters.push_back(text::to_lower(cp));
        }
        if (letters.size() < config.min_length) continue;
        std::string token = text::encode_utf8(letters);
        if (config.stopwords.contains(token)) continue;
        if (config.stemmer == Stemmer::RuleBasedSuffix) token = stem(token);
        out.push_back(std::move(token));
    }
    return out;
}

}  // namespace infodemic
