#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "infodemic/corpus.hpp"
#include "infodemic/encoder.hpp"

namespace infodemic {

struct EncoderConfig {
    std::size_t embed_dim = 64;
    std::size_t hidden_dim = 64;
    double learning_rate = 0.01;
    double clip_norm = 5.0;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    double init_range = 0.1;
    std::size_t min_freq = 1;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Embedding + single-layer LSTM + two-way softmax head (class 0 = Fake).
///
/// Gates are stacked in the order input, forget, output, candidate inside the
/// 4H-row weight matrices. Feature ids 31000-35999 get embedding rows after the
/// vocabulary rows.
struct EncoderModel {
    EncoderConfig config;
    SequenceOptions options;
    Vocabulary vocab;

    RowMatrix embedding;       // (vocab bound + 5000) x D
    Eigen::MatrixXd w_input;   // 4H x D
    Eigen::MatrixXd w_hidden;  // 4H x H
    Eigen::VectorXd bias;      // 4H
    Eigen::MatrixXd w_out;     // 2 x H
    Eigen::VectorXd b_out;     // 2

    /// Seeded uniform(-init_range, init_range) weights, zero biases.
    static EncoderModel initialize(Vocabulary vocab, const EncoderConfig& config, const SequenceOptions& options,
                                   std::uint64_t seed);

    /// Embedding row of a token id; throws for ids outside every known range.
    std::size_t row_of(int id) const;
    std::size_t parameter_count() const;
    bool finite() const;
};

/// Gradients of the cross-entropy loss; embedding rows are sparse.
struct EncoderGradients {
    std::map<std::size_t, Eigen::VectorXd> embedding;
    Eigen::MatrixXd w_input, w_hidden, w_out;
    Eigen::VectorXd bias, b_out;

    void reset(const EncoderModel& model);
    void scale(double factor);
    double squared_norm() const;
};

/// Class probabilities (Fake, Real) for one sequence.
Eigen::Vector2d encoder_probabilities(const EncoderModel& model, std::span<const int> ids);

/// Loss -log p(target) for one sequence; accumulates into `grads` when given.
double encoder_loss(const EncoderModel& model, std::span<const int> ids, Label target,
                    EncoderGradients* grads = nullptr);

struct EncoderPrediction {
    Label label = Label::Real;
    double score = 0.5;  // probability of Fake
};

/// argmax of the softmax; an exact tie goes to Real.
EncoderPrediction predict(const EncoderModel& model, const TokenSequence& seq);
/// Prepares the text with the model's own options first.
EncoderPrediction predict_text(const EncoderModel& model, std::string_view text, SentimentLabel sentiment);

struct EncoderTraining {
    EncoderModel model;
    std::vector<double> epoch_losses;  // mean per-example loss over each epoch
    double final_loss = 0.0;
};

/// Mini-batch SGD with global gradient-norm clipping. Example order is
/// reshuffled each epoch from the seed; throws on a non-finite loss.
EncoderTraining train_encoder_on(EncoderModel model, std::span<const TokenSequence> sequences,
                                 std::span<const Label> labels, std::uint64_t seed);

/// Builds the vocabulary from the training folds only and trains on every
/// fold other than `held_out`. `sentiment` is aligned with the corpus and only
/// read when injecting.
EncoderTraining train_encoder(const Corpus& corpus, const FoldPlan& folds, std::size_t held_out,
                              const EncoderConfig& config, std::uint64_t seed, const SequenceOptions& options,
                              std::span<const SentimentLabel> sentiment);

/// Trains on the given posts of `corpus`.
EncoderTraining train_encoder_indices(const Corpus& corpus, std::span<const std::size_t> train,
                                      const EncoderConfig& config, std::uint64_t seed,
                                      const SequenceOptions& options, std::span<const SentimentLabel> sentiment);

/// Mean of the embedding rows of the post's content tokens (no markers, no
/// feature ids); zero for a text without tokens.
Eigen::VectorXd sentence_embedding(const EncoderModel& model, std::string_view text);

/// Versioned binary container: magic, JSON header (config, options,
/// vocabulary, shapes), then raw little-endian doubles.
void save_encoder(const EncoderModel& model, const std::filesystem::path& path);
EncoderModel load_encoder(const std::filesystem::path& path);

}  // namespace infodemic
