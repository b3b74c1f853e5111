#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "infodemic/corpus.hpp"

namespace infodemic {

enum class SentimentLabel { VeryNegative, Negative, Neutral, Positive, VeryPositive };

inline constexpr std::array<SentimentLabel, 5> kSentimentLabels = {
    SentimentLabel::VeryNegative, SentimentLabel::Negative, SentimentLabel::Neutral,
    SentimentLabel::Positive, SentimentLabel::VeryPositive};

/// "Very Negative", "Negative", "Neutral", "Positive", "Very Positive".
std::string_view sentiment_name(SentimentLabel label);
/// Case-insensitive; spaces, underscores and hyphens between words are optional.
SentimentLabel parse_sentiment(std::string_view name);

struct SentimentDistribution {
    std::array<std::size_t, 5> counts{};

    std::size_t& operator[](SentimentLabel l) { return counts[static_cast<std::size_t>(l)]; }
    std::size_t operator[](SentimentLabel l) const { return counts[static_cast<std::size_t>(l)]; }
    std::size_t total() const;

    static SentimentDistribution from_counts(std::size_t very_negative, std::size_t negative,
                                             std::size_t neutral, std::size_t positive,
                                             std::size_t very_positive);
};

SentimentDistribution sentiment_distribution(std::span<const SentimentLabel> labels);

/// Concern Index N / (N + P + 1); Neutral items are ignored.
struct ConcernReport {
    std::size_t negative = 0;  // VeryNegative + Negative
    std::size_t positive = 0;  // Positive + VeryPositive
    double concern_index = 0.0;
};

ConcernReport concern_index(const SentimentDistribution& dist);

enum class Rounding { FullPrecision, TwoDecimal };

/// Two-proportion z-test on the negative share of non-neutral items.
/// Proportions here have no +1 in the denominator, unlike ConcernReport.
struct SignificanceResult {
    std::size_t n_fake = 0, t_fake = 0, n_real = 0, t_real = 0;
    double c_fake = 0, c_real = 0, c_total = 0;
    double std_diff = 0;
    double z_score = 0;
    double p_value = 1;
    Rounding rounding = Rounding::FullPrecision;
};

/// TwoDecimal rounds the three proportions to 2 decimals and the standard
/// error to 5 decimals before taking the ratio.
SignificanceResult concern_significance(const SentimentDistribution& fake, const SentimentDistribution& real,
                                        Rounding rounding = Rounding::FullPrecision);

/// Two-tailed standard-normal tail mass beyond |z|.
double two_tailed_p(double z);

class SentimentBackend {
public:
    virtual ~SentimentBackend() = default;
    virtual SentimentLabel classify(const Post& post) const = 0;
};

/// Sums signed per-token weights and thresholds the total:
/// s <= -4 VeryNegative, s < 0 Negative, 0 Neutral, s < 4 Positive, else VeryPositive.
class LexiconBackend final : public SentimentBackend {
public:
    explicit LexiconBackend(std::unordered_map<std::string, int> weights);

    /// Bundled English word list.
    static LexiconBackend builtin();
    /// `word<TAB>integer-weight` lines; '#' starts a comment line.
    static LexiconBackend from_file(const std::filesystem::path& path);
    static LexiconBackend parse(std::istream& in);

    int score(std::string_view text) const;
    SentimentLabel classify_text(std::string_view text) const;
    SentimentLabel classify(const Post& post) const override { return classify_text(post.text); }

    std::size_t size() const { return weights_.size(); }

private:
    std::unordered_map<std::string, int> weights_;
};

SentimentLabel label_for_score(int score);

/// Pass-through backend over labels produced elsewhere, keyed by post id.
class ExternalLabelBackend final : public SentimentBackend {
public:
    explicit ExternalLabelBackend(std::map<std::string, SentimentLabel> labels) : labels_(std::move(labels)) {}

    SentimentLabel classify(const Post& post) const override;
    std::vector<std::string> missing_ids(const Corpus& corpus) const;
    const std::map<std::string, SentimentLabel>& labels() const { return labels_; }

private:
    std::map<std::string, SentimentLabel> labels_;
};

/// CSV with header `id,label`; labels are the five class names.
std::map<std::string, SentimentLabel> load_external_labels(const std::filesystem::path& path);
std::map<std::string, SentimentLabel> parse_external_labels(std::istream& in);

inline SentimentLabel classify_sentiment(const Post& post, const SentimentBackend& backend) {
    return backend.classify(post);
}

std::vector<SentimentLabel> classify_corpus(const Corpus& corpus, const SentimentBackend& backend);

nlohmann::json to_json(const SentimentDistribution& dist);
nlohmann::json to_json(const ConcernReport& report);
nlohmann::json to_json(const SignificanceResult& result);

}  // namespace infodemic
