#include "infodemic/sentiment.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "infodemic/csv.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

std::string_view builtin_lexicon_tsv();  // generated from data/lexicon.tsv

namespace {

double round_to(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
        out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    return out;
}

}  // namespace

std::string_view sentiment_name(SentimentLabel label) {
    switch (label) {
        case SentimentLabel::VeryNegative: return "Very Negative";
        case SentimentLabel::Negative: return "Negative";
        case SentimentLabel::Neutral: return "Neutral";
        case SentimentLabel::Positive: return "Positive";
        case SentimentLabel::VeryPositive: return "Very Positive";
    }
    return "Neutral";
}

SentimentLabel parse_sentiment(std::string_view name) {
    const auto key = squash(name);
    for (auto label : kSentimentLabels) {
        if (squash(sentiment_name(label)) == key) return label;
    }
    throw Error("unknown sentiment class '" + std::string(name) + "'");
}

std::size_t SentimentDistribution::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

SentimentDistribution SentimentDistribution::from_counts(std::size_t very_negative, std::size_t negative,
                                                         std::size_t neutral, std::size_t positive,
                                                         std::size_t very_positive) {
    return SentimentDistribution{{very_negative, negative, neutral, positive, very_positive}};
}

SentimentDistribution sentiment_distribution(std::span<const SentimentLabel> labels) {
    SentimentDistribution dist;
    for (auto l : labels) ++dist[l];
    return dist;
}

ConcernReport concern_index(const SentimentDistribution& dist) {
    ConcernReport r;
    r.negative = dist[SentimentLabel::VeryNegative] + dist[SentimentLabel::Negative];
    r.positive = dist[SentimentLabel::Positive] + dist[SentimentLabel::VeryPositive];
    r.concern_index = static_cast<double>(r.negative) / static_cast<double>(r.negative + r.positive + 1);
    return r;
}

double two_tailed_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

SignificanceResult concern_significance(const SentimentDistribution& fake, const SentimentDistribution& real,
                                        Rounding rounding) {
    const auto cf = concern_index(fake);
    const auto cr = concern_index(real);
    SignificanceResult r;
    r.rounding = rounding;
    r.n_fake = cf.negative;
    r.t_fake = cf.negative + cf.positive;
    r.n_real = cr.negative;
    r.t_real = cr.negative + cr.positive;
    if (r.t_fake == 0 || r.t_real == 0) {
        throw Error("concern_significance: both classes need at least one non-neutral item");
    }
    const double tf = static_cast<double>(r.t_fake);
    const double tr = static_cast<double>(r.t_real);
    r.c_fake = static_cast<double>(r.n_fake) / tf;
    r.c_real = static_cast<double>(r.n_real) / tr;
    r.c_total = static_cast<double>(r.n_fake + r.n_real) / (tf + tr);
    if (rounding == Rounding::TwoDecimal) {
        r.c_fake = round_to(r.c_fake, 2);
        r.c_real = round_to(r.c_real, 2);
        r.c_total = round_to(r.c_total, 2);
    }
    const double pq = r.c_total * (1.0 - r.c_total);
    r.std_diff = std::sqrt(pq / tf + pq / tr);
    if (rounding == Rounding::TwoDecimal) r.std_diff = round_to(r.std_diff, 5);
    const double diff = std::abs(r.c_fake - r.c_real);
    if (r.std_diff > 0.0) {
        r.z_score = diff / r.std_diff;
    } else {
        // both classes entirely negative or entirely positive
        r.z_score = diff > 0.0 ? INFINITY : 0.0;
    }
    r.p_value = two_tailed_p(r.z_score);
    return r;
}

SentimentLabel label_for_score(int score) {
    if (score <= -4) return SentimentLabel::VeryNegative;
    if (score < 0) return SentimentLabel::Negative;
    if (score == 0) return SentimentLabel::Neutral;
    if (score < 4) return SentimentLabel::Positive;
    return SentimentLabel::VeryPositive;
}

LexiconBackend::LexiconBackend(std::unordered_map<std::string, int> weights) : weights_(std::move(weights)) {}

LexiconBackend LexiconBackend::parse(std::istream& in) {
    std::unordered_map<std::string, int> weights;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("lexicon line " + std::to_string(line_no) + ": expected word<TAB>weight");
        std::string word = line.substr(0, tab);
        int weight = 0;
        try {
            std::size_t used = 0;
            weight = std::stoi(line.substr(tab + 1), &used);
        } catch (const std::exception&) {
            throw Error("lexicon line " + std::to_string(line_no) + ": weight is not an integer");
        }
        std::u32string lowered;
        for (char32_t cp : text::decode_utf8(word)) lowered.push_back(text::to_lower(cp));
        weights[text::encode_utf8(lowered)] = weight;
    }
    return LexiconBackend(std::move(weights));
}

LexiconBackend LexiconBackend::builtin() {
    std::istringstream in{std::string(builtin_lexicon_tsv())};
    return parse(in);
}

LexiconBackend LexiconBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read lexicon file '" + path.string() + "'");
    return parse(in);
}

int LexiconBackend::score(std::string_view text) const {
    int total = 0;
    std::u32string token;
    auto flush = [&] {
        if (token.empty()) return;
        auto it = weights_.find(text::encode_utf8(token));
        if (it != weights_.end()) total += it->second;
        token.clear();
    };
    for (char32_t cp : text::decode_utf8(text)) {
        if (text::is_letter(cp) || text::is_digit(cp)) {
            token.push_back(text::to_lower(cp));
        } else if (cp != '\'') {
            flush();
        }
    }
    flush();
    return total;
}

SentimentLabel LexiconBackend::classify_text(std::string_view text) const { return label_for_score(score(text)); }

SentimentLabel ExternalLabelBackend::classify(const Post& post) const {
    auto it = labels_.find(post.id);
    if (it == labels_.end()) throw Error("no external sentiment label for post '" + post.id + "'");
    return it->second;
}

std::vector<std::string> ExternalLabelBackend::missing_ids(const Corpus& corpus) const {
    std::vector<std::string> missing;
    for (const auto& p : corpus.posts) {
        if (!labels_.contains(p.id)) missing.push_back(p.id);
    }
    return missing;
}

std::map<std::string, SentimentLabel> parse_external_labels(std::istream& in) {
    auto rows = csv::read(in);
    if (rows.empty()) throw Error("label file: header row required");
    const auto& header = rows.front();
    if (header.size() < 2 || header[0] != "id" || header[1] != "label") {
        throw Error("label file: expected header 'id,label'");
    }
    std::map<std::string, SentimentLabel> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() < 2) throw Error("label file row " + std::to_string(r) + ": expected two columns");
        SentimentLabel label;
        try {
            label = parse_sentiment(row[1]);
        } catch (const Error&) {
            throw Error("label file row " + std::to_string(r) + ": unknown sentiment class '" + row[1] + "'");
        }
        if (!out.emplace(row[0], label).second) {
            throw Error("label file row " + std::to_string(r) + ": duplicate id '" + row[0] + "'");
        }
    }
    return out;
}

std::map<std::string, SentimentLabel> load_external_labels(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read label file '" + path.string() + "'");
    return parse_external_labels(in);
}

std::vector<SentimentLabel> classify_corpus(const Corpus& corpus, const SentimentBackend& backend) {
    std::vector<SentimentLabel> out;
    out.reserve(corpus.size());
    for (const auto& p : corpus.posts) out.push_back(backend.classify(p));
    return out;
}

nlohmann::json to_json(const SentimentDistribution& dist) {
    nlohmann::json j = nlohmann::json::object();
    for (auto l : kSentimentLabels) j[std::string(sentiment_name(l))] = dist[l];
    return j;
}

nlohmann::json to_json(const ConcernReport& report) {
    return {{"N", report.negative}, {"P", report.positive}, {"concern_index", report.concern_index}};
}

nlohmann::json to_json(const SignificanceResult& r) {
    return {{"rounding", r.rounding == Rounding::TwoDecimal ? "two_decimal" : "full_precision"},
            {"N_F", r.n_fake},
            {"T_F", r.t_fake},
            {"N_R", r.n_real},
            {"T_R", r.t_real},
            {"C_F", r.c_fake},
            {"C_R", r.c_real},
            {"C_T", r.c_total},
            {"std", r.std_diff},
            {"z", r.z_score},
            {"p", r.p_value}};
}

}  // namespace infodemic
