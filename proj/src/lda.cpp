#include "infodemic/lda.hpp"

#include <algorithm>
#include <numeric>

#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

std::size_t LdaModel::token_count() const {
    std::size_t n = 0;
    for (const auto& d : docs) n += d.size();
    return n;
}

std::vector<double> LdaModel::theta(std::size_t doc) const {
    const auto& counts = doc_topic.at(doc);
    const double denom = static_cast<double>(docs[doc].size()) + static_cast<double>(topics) * alpha;
    std::vector<double> out(topics);
    for (std::size_t k = 0; k < topics; ++k) out[k] = (counts[k] + alpha) / denom;
    return out;
}

std::vector<double> LdaModel::phi(std::size_t topic) const {
    const auto& counts = topic_word.at(topic);
    const double denom = topic_totals[topic] + static_cast<double>(vocabulary.size()) * beta;
    std::vector<double> out(vocabulary.size());
    for (std::size_t w = 0; w < vocabulary.size(); ++w) out[w] = (counts[w] + beta) / denom;
    return out;
}

std::vector<std::string> LdaModel::top_words(std::size_t topic, std::size_t n) const {
    const auto& counts = topic_word.at(topic);
    std::vector<std::size_t> order(vocabulary.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // vocabulary is sorted, so index order is lexicographic order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(n, order.size()); ++i) out.push_back(vocabulary[order[i]]);
    return out;
}

LdaModel train_lda(const std::vector<std::vector<std::string>>& docs, const LdaConfig& config,
                   const LdaSweepHook& on_sweep) {
    if (config.topics < 2) throw Error("lda: at least two topics are required");
    if (!(config.beta > 0.0)) throw Error("lda: beta must be positive");

    LdaModel m;
    m.topics = config.topics;
    m.alpha = config.alpha > 0.0 ? config.alpha : 50.0 / static_cast<double>(config.topics);
    m.beta = config.beta;

    std::map<std::string, int> ids;
    for (const auto& d : docs) {
        for (const auto& w : d) ids.emplace(w, 0);
    }
    if (ids.empty()) throw Error("lda: corpus has no tokens after preprocessing");
    for (auto& [word, id] : ids) {
        id = static_cast<int>(m.vocabulary.size());
        m.vocabulary.push_back(word);
    }
    const std::size_t K = m.topics, V = m.vocabulary.size();

    Rng rng(config.seed);
    m.doc_topic.assign(docs.size(), std::vector<int>(K, 0));
    m.topic_word.assign(K, std::vector<int>(V, 0));
    m.topic_totals.assign(K, 0);
    for (std::size_t d = 0; d < docs.size(); ++d) {
        std::vector<int> words, zs;
        for (const auto& w : docs[d]) {
            const int id = ids.at(w);
            const int z = static_cast<int>(rng.index(K));
            words.push_back(id);
            zs.push_back(z);
            ++m.doc_topic[d][z];
            ++m.topic_word[z][id];
            ++m.topic_totals[z];
        }
        m.docs.push_back(std::move(words));
        m.assignments.push_back(std::move(zs));
    }

    const double vbeta = static_cast<double>(V) * m.beta;
    std::vector<double> cumulative(K);
    for (std::size_t sweep = 1; sweep <= config.iterations; ++sweep) {
        for (std::size_t d = 0; d < m.docs.size(); ++d) {
            auto& dt = m.doc_topic[d];
            for (std::size_t i = 0; i < m.docs[d].size(); ++i) {
                const int w = m.docs[d][i];
                int z = m.assignments[d][i];
                --dt[z];
                --m.topic_word[z][w];
                --m.topic_totals[z];
                double total = 0.0;
                for (std::size_t k = 0; k < K; ++k) {
                    total += (dt[k] + m.alpha) * (m.topic_word[k][w] + m.beta) / (m.topic_totals[k] + vbeta);
                    cumulative[k] = total;
                }
                const double u = rng.uniform() * total;
                z = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
                if (z >= static_cast<int>(K)) z = static_cast<int>(K) - 1;
                m.assignments[d][i] = z;
                ++dt[z];
                ++m.topic_word[z][w];
                ++m.topic_totals[z];
            }
        }
        if (on_sweep) on_sweep(m, sweep);
    }
    return m;
}

}  // namespace infodemic
