#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "infodemic/autoencoder.hpp"
#include "infodemic/kmeans.hpp"
#include "infodemic/lda.hpp"

namespace infodemic {

using TokenDocs = std::vector<std::vector<std::string>>;

/// [theta_d | embedding_d] per document. Errors on misalignment or empty embeddings.
std::vector<Eigen::VectorXd> hybrid_vectors(const LdaModel& lda, const std::vector<std::vector<double>>& embeddings);

struct CoherenceResult {
    std::vector<double> per_topic;
    double mean = 0.0;
};

/// UMass coherence of the first `top_n` words of each list over `docs`. Pairs
/// whose higher-ranked word occurs in no document are skipped.
CoherenceResult coherence(const std::vector<std::vector<std::string>>& top_words, const TokenDocs& docs,
                          std::size_t top_n);

struct TopicWord {
    std::string word;
    std::size_t count = 0;
    double weight = 0.0;  // count over all tokens of the cluster's documents
};

struct TopicCluster {
    std::size_t index = 0;
    std::vector<std::size_t> members;
    std::vector<TopicWord> words;  // count descending, then lexicographic
    double coherence = 0.0;
};

struct KScore {
    std::size_t k = 0;
    double mean_coherence = 0.0;
};

struct TopicReport {
    std::string name;
    std::size_t k = 0;
    std::vector<TopicCluster> clusters;
    double mean_coherence = 0.0;
    std::vector<KScore> k_table;
};

struct TopicPipelineConfig {
    double alpha = 0.0;  // <= 0 selects 50 / k
    double beta = 0.01;
    std::size_t lda_iterations = 1000;
    AutoencoderConfig autoencoder;  // latent_dim is capped at input dim - 1
    std::size_t kmeans_restarts = 10;
    std::size_t kmeans_max_iters = 300;
    std::size_t top_n = 10;
};

/// LDA with k topics, hybrid vectors, autoencoder compression, then the
/// lowest-inertia of several k-means runs with k clusters.
TopicReport run_topic_pipeline(const TokenDocs& docs, const std::vector<std::vector<double>>& embeddings,
                               std::size_t k, const TopicPipelineConfig& config, std::uint64_t seed);

/// Ranked words of the documents in `members`.
std::vector<TopicWord> cluster_top_words(const TokenDocs& docs, const std::vector<std::size_t>& members,
                                         std::size_t top_n);

/// Runs the pipeline for every k in [k_min, k_max] with seed + k and keeps the
/// highest mean coherence. Scores within a relative 1e-9 count as ties and go to
/// the smaller k.
TopicReport select_k(const TokenDocs& docs, const std::vector<std::vector<double>>& embeddings, std::size_t k_min,
                     std::size_t k_max, const TopicPipelineConfig& config, std::uint64_t seed);

/// Entry (i, j) is the Jaccard similarity of the top_n word sets of cluster i of
/// `a` and cluster j of `b`.
std::vector<std::vector<double>> topic_similarity(const TopicReport& a, const TopicReport& b, std::size_t top_n);

/// Clusters of `a` whose best match in `b` reaches `threshold`.
std::size_t overlapping_topics(const std::vector<std::vector<double>>& similarity, double threshold);

nlohmann::json to_json(const TopicReport& report);

}  // namespace infodemic
