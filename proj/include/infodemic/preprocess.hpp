#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace infodemic {

enum class Stemmer { RuleBasedSuffix, None };

/// Bundled English stopword list.
const std::unordered_set<std::string>& default_stopwords();

struct PreprocessConfig {
    std::unordered_set<std::string> stopwords = default_stopwords();
    std::size_t min_length = 2;
    Stemmer stemmer = Stemmer::RuleBasedSuffix;
    /// Drop whitespace tokens that start with http://, https:// or www.
    bool drop_urls = true;
};

/// Strips one of -ing, -ed, -ly, -es, -s (not after s, u or i), then a final
/// -e (not -ee), each only when at least three characters remain.
std::string stem(std::string_view word);

/// Lowercases, deletes every non-letter character inside each whitespace
/// token, drops stopwords and short tokens, then stems.
std::vector<std::string> preprocess_topic_text(std::string_view text, const PreprocessConfig& config = {});

}  // namespace infodemic
