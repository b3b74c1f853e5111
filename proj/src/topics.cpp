#include "infodemic/topics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "infodemic/text.hpp"

namespace infodemic {

std::vector<Eigen::VectorXd> hybrid_vectors(const LdaModel& lda, const std::vector<std::vector<double>>& embeddings) {
    if (embeddings.size() != lda.docs.size()) {
        throw Error("hybrid_vectors: " + std::to_string(embeddings.size()) + " embeddings for " +
                    std::to_string(lda.docs.size()) + " documents");
    }
    const std::size_t K = lda.topics;
    std::vector<Eigen::VectorXd> out;
    out.reserve(embeddings.size());
    for (std::size_t d = 0; d < embeddings.size(); ++d) {
        const auto& e = embeddings[d];
        if (e.empty()) throw Error("hybrid_vectors: embedding dimension must be at least 1");
        if (e.size() != embeddings.front().size()) throw Error("hybrid_vectors: embeddings differ in dimension");
        Eigen::VectorXd v(static_cast<Eigen::Index>(K + e.size()));
        const auto theta = lda.theta(d);
        for (std::size_t k = 0; k < K; ++k) v[static_cast<Eigen::Index>(k)] = theta[k];
        for (std::size_t i = 0; i < e.size(); ++i) v[static_cast<Eigen::Index>(K + i)] = e[i];
        if (!v.allFinite()) throw Error("hybrid_vectors: non-finite embedding for document " + std::to_string(d));
        out.push_back(std::move(v));
    }
    return out;
}

CoherenceResult coherence(const std::vector<std::vector<std::string>>& top_words, const TokenDocs& docs,
                          std::size_t top_n) {
    if (top_n < 2) throw Error("coherence: top_n must be at least 2");
    if (docs.empty()) throw Error("coherence: no documents");
    std::set<std::string> wanted;
    for (const auto& list : top_words) {
        for (std::size_t i = 0; i < std::min(top_n, list.size()); ++i) wanted.insert(list[i]);
    }
    std::map<std::string, std::vector<std::size_t>> postings;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::set<std::string> seen;
        for (const auto& w : docs[d]) {
            if (wanted.contains(w) && seen.insert(w).second) postings[w].push_back(d);
        }
    }
    auto df = [&](const std::string& w) -> std::size_t {
        auto it = postings.find(w);
        return it == postings.end() ? 0 : it->second.size();
    };
    auto co_df = [&](const std::string& a, const std::string& b) -> std::size_t {
        auto ia = postings.find(a), ib = postings.find(b);
        if (ia == postings.end() || ib == postings.end()) return 0;
        std::vector<std::size_t> both;
        std::set_intersection(ia->second.begin(), ia->second.end(), ib->second.begin(), ib->second.end(),
                              std::back_inserter(both));
        return both.size();
    };

    CoherenceResult out;
    for (const auto& list : top_words) {
        const std::size_t n = std::min(top_n, list.size());
        double score = 0.0;
        for (std::size_t m = 1; m < n; ++m) {
            for (std::size_t l = 0; l < m; ++l) {
                const std::size_t dl = df(list[l]);
                if (dl == 0) continue;
                score += std::log((static_cast<double>(co_df(list[m], list[l])) + 1.0) / static_cast<double>(dl));
            }
        }
        out.per_topic.push_back(score);
    }
    if (!out.per_topic.empty()) {
        double sum = 0.0;
        for (double s : out.per_topic) sum += s;
        out.mean = sum / static_cast<double>(out.per_topic.size());
    }
    return out;
}

std::vector<TopicWord> cluster_top_words(const TokenDocs& docs, const std::vector<std::size_t>& members,
                                         std::size_t top_n) {
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (auto d : members) {
        for (const auto& w : docs.at(d)) {
            ++counts[w];
            ++total;
        }
    }
    std::vector<TopicWord> words;
    for (const auto& [w, c] : counts) words.push_back({w, c, static_cast<double>(c) / static_cast<double>(total)});
    std::stable_sort(words.begin(), words.end(), [](const TopicWord& a, const TopicWord& b) { return a.count > b.count; });
    if (words.size() > top_n) words.resize(top_n);
    return words;
}

TopicReport run_topic_pipeline(const TokenDocs& docs, const std::vector<std::vector<double>>& embeddings,
                               std::size_t k, const TopicPipelineConfig& config, std::uint64_t seed) {
    if (k < 2) throw Error("topics: k must be at least 2");
    if (docs.size() < k) {
        throw Error("topics: k = " + std::to_string(k) + " exceeds the " + std::to_string(docs.size()) + " documents");
    }
    LdaConfig lda_cfg;
    lda_cfg.topics = k;
    lda_cfg.alpha = config.alpha;
    lda_cfg.beta = config.beta;
    lda_cfg.iterations = config.lda_iterations;
    lda_cfg.seed = seed;
    const LdaModel lda = train_lda(docs, lda_cfg);

    const auto hybrid = hybrid_vectors(lda, embeddings);
    AutoencoderConfig ae_cfg = config.autoencoder;
    ae_cfg.latent_dim = std::min<std::size_t>(ae_cfg.latent_dim, static_cast<std::size_t>(hybrid.front().size()) - 1);
    const auto ae = train_autoencoder(hybrid, ae_cfg, seed ^ 0x5DEECE66DULL);
    std::vector<Eigen::VectorXd> latent;
    latent.reserve(hybrid.size());
    for (const auto& v : hybrid) latent.push_back(encode_latent(ae.model, v));

    ClusterModel best;
    bool have_best = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, config.kmeans_restarts); ++r) {
        auto model = kmeans(latent, k, seed + 1000 + r, config.kmeans_max_iters);
        if (!have_best || model.inertia < best.inertia) {
            best = std::move(model);
            have_best = true;
        }
    }

    TopicReport report;
    report.k = k;
    std::vector<std::vector<std::string>> lists;
    for (std::size_t c = 0; c < k; ++c) {
        TopicCluster cluster;
        cluster.index = c;
        for (std::size_t d = 0; d < best.assignments.size(); ++d) {
            if (best.assignments[d] == c) cluster.members.push_back(d);
        }
        cluster.words = cluster_top_words(docs, cluster.members, config.top_n);
        std::vector<std::string> list;
        for (const auto& w : cluster.words) list.push_back(w.word);
        lists.push_back(std::move(list));
        report.clusters.push_back(std::move(cluster));
    }
    const auto scores = coherence(lists, docs, config.top_n);
    for (std::size_t c = 0; c < k; ++c) report.clusters[c].coherence = scores.per_topic[c];
    report.mean_coherence = scores.mean;
    report.k_table.push_back({k, scores.mean});
    return report;
}

TopicReport select_k(const TokenDocs& docs, const std::vector<std::vector<double>>& embeddings, std::size_t k_min,
                     std::size_t k_max, const TopicPipelineConfig& config, std::uint64_t seed) {
    if (k_min < 2 || k_max < k_min) {
        throw Error("select_k: invalid k range " + std::to_string(k_min) + ".." + std::to_string(k_max));
    }
    TopicReport best;
    std::vector<KScore> table;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        TopicReport report;
        try {
            report = run_topic_pipeline(docs, embeddings, k, config, seed + k);
        } catch (const std::exception& e) {
            throw Error("k = " + std::to_string(k) + ": " + e.what());
        }
        table.push_back({k, report.mean_coherence});
        const double tol = 1e-9 * std::max(1.0, std::abs(best.mean_coherence));
        if (best.clusters.empty() || report.mean_coherence > best.mean_coherence + tol) best = std::move(report);
    }
    best.k_table = std::move(table);
    return best;
}

std::vector<std::vector<double>> topic_similarity(const TopicReport& a, const TopicReport& b, std::size_t top_n) {
    if (top_n < 1) throw Error("topic_similarity: top_n must be at least 1");
    if (a.clusters.empty() || b.clusters.empty()) throw Error("topic_similarity: both reports need a cluster");
    auto word_set = [top_n](const TopicCluster& c) {
        std::set<std::string> s;
        for (std::size_t i = 0; i < std::min(top_n, c.words.size()); ++i) s.insert(c.words[i].word);
        return s;
    };
    std::vector<std::vector<double>> out(a.clusters.size(), std::vector<double>(b.clusters.size(), 0.0));
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        const auto sa = word_set(a.clusters[i]);
        for (std::size_t j = 0; j < b.clusters.size(); ++j) {
            const auto sb = word_set(b.clusters[j]);
            std::size_t inter = 0;
            for (const auto& w : sa) inter += sb.contains(w) ? 1 : 0;
            const std::size_t uni = sa.size() + sb.size() - inter;
            out[i][j] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
        }
    }
    return out;
}

std::size_t overlapping_topics(const std::vector<std::vector<double>>& similarity, double threshold) {
    std::size_t n = 0;
    for (const auto& row : similarity) {
        if (std::any_of(row.begin(), row.end(), [threshold](double s) { return s >= threshold; })) ++n;
    }
    return n;
}

nlohmann::json to_json(const TopicReport& report) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : report.clusters) {
        nlohmann::json words = nlohmann::json::array();
        for (const auto& w : c.words) words.push_back({{"word", w.word}, {"count", w.count}, {"weight", w.weight}});
        clusters.push_back({{"index", c.index}, {"size", c.members.size()}, {"coherence", c.coherence}, {"words", words}});
    }
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : report.k_table) table.push_back({{"k", row.k}, {"mean_coherence", row.mean_coherence}});
    return {{"name", report.name},
            {"k", report.k},
            {"mean_coherence", report.mean_coherence},
            {"clusters", clusters},
            {"k_table", table}};
}

}  // namespace infodemic
