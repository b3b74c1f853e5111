#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace infodemic {

enum class Optimizer { Adam, Sgd };

struct AutoencoderConfig {
    std::size_t latent_dim = 32;
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    Optimizer optimizer = Optimizer::Adam;
};

/// x -> tanh(w_enc x + b_enc) -> w_dec h + b_dec
struct AutoencoderModel {
    Eigen::MatrixXd w_enc;  // latent x input
    Eigen::VectorXd b_enc;
    Eigen::MatrixXd w_dec;  // input x latent
    Eigen::VectorXd b_dec;
    AutoencoderConfig config;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return static_cast<std::size_t>(w_enc.cols()); }
    std::size_t latent_dim() const { return static_cast<std::size_t>(w_enc.rows()); }
    bool finite() const;
};

struct AutoencoderGradients {
    Eigen::MatrixXd w_enc, w_dec;
    Eigen::VectorXd b_enc, b_dec;
};

/// Glorot-uniform weights, zero biases. Errors unless 1 <= latent_dim < input_dim.
AutoencoderModel initialize_autoencoder(std::size_t input_dim, const AutoencoderConfig& config, std::uint64_t seed);

/// Mean squared reconstruction error over every entry of `batch` (one column per
/// sample). Fills `grads` when given.
double autoencoder_loss(const AutoencoderModel& model, const Eigen::MatrixXd& batch,
                        AutoencoderGradients* grads = nullptr);

struct AutoencoderTraining {
    AutoencoderModel model;
    std::vector<double> epoch_losses;  // full-data loss after each epoch
    double final_loss = 0.0;
};

AutoencoderTraining train_autoencoder(const std::vector<Eigen::VectorXd>& vectors, const AutoencoderConfig& config,
                                      std::uint64_t seed);

/// Continues from `initial`, using its config and seed.
AutoencoderTraining train_autoencoder_from(AutoencoderModel initial, const std::vector<Eigen::VectorXd>& vectors);

Eigen::VectorXd encode_latent(const AutoencoderModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd reconstruct(const AutoencoderModel& model, const Eigen::VectorXd& x);

}  // namespace infodemic
