#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace infodemic {

struct LdaConfig {
    std::size_t topics = 10;
    double alpha = 0.0;  // <= 0 selects 50 / topics
    double beta = 0.01;
    std::size_t iterations = 1000;
    std::uint64_t seed = 0;
};

/// Collapsed Gibbs sampler state. Count tables always agree with `assignments`.
struct LdaModel {
    std::size_t topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<std::string> vocabulary;  // sorted
    std::vector<std::vector<int>> docs;   // word ids
    std::vector<std::vector<int>> assignments;
    std::vector<std::vector<int>> doc_topic;   // docs x topics
    std::vector<std::vector<int>> topic_word;  // topics x vocabulary
    std::vector<int> topic_totals;

    std::size_t vocabulary_size() const { return vocabulary.size(); }
    std::size_t token_count() const;
    /// Smoothed document-topic mixture; sums to 1.
    std::vector<double> theta(std::size_t doc) const;
    /// Smoothed topic-word distribution; sums to 1.
    std::vector<double> phi(std::size_t topic) const;
    /// Most probable words of a topic, ties broken lexicographically.
    std::vector<std::string> top_words(std::size_t topic, std::size_t n) const;
};

/// Called after every sweep with the 1-based sweep number.
using LdaSweepHook = std::function<void(const LdaModel&, std::size_t sweep)>;

/// Errors when the corpus holds no tokens or fewer than two topics are asked for.
LdaModel train_lda(const std::vector<std::vector<std::string>>& docs, const LdaConfig& config,
                   const LdaSweepHook& on_sweep = {});

}  // namespace infodemic
