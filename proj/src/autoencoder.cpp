#include "infodemic/autoencoder.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

void check_input(const AutoencoderModel& model, Eigen::Index rows) {
    if (rows != model.w_enc.cols()) {
        throw Error("autoencoder: expected input dimension " + std::to_string(model.w_enc.cols()) + ", got " +
                    std::to_string(rows));
    }
}

struct AdamState {
    AutoencoderGradients m, v;
    std::size_t t = 0;
};

AutoencoderGradients zeros_like(const AutoencoderModel& model) {
    return {Eigen::MatrixXd::Zero(model.w_enc.rows(), model.w_enc.cols()),
            Eigen::MatrixXd::Zero(model.w_dec.rows(), model.w_dec.cols()), Eigen::VectorXd::Zero(model.b_enc.size()),
            Eigen::VectorXd::Zero(model.b_dec.size())};
}

template <typename P, typename G>
void adam_update(P& param, const G& grad, G& m, G& v, double lr, double c1, double c2) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

bool AutoencoderModel::finite() const {
    return w_enc.allFinite() && b_enc.allFinite() && w_dec.allFinite() && b_dec.allFinite();
}

AutoencoderModel initialize_autoencoder(std::size_t input_dim, const AutoencoderConfig& config, std::uint64_t seed) {
    const std::size_t L = config.latent_dim;
    if (L < 1 || L >= input_dim) {
        throw Error("autoencoder: latent dimension " + std::to_string(L) + " must be in [1, " +
                    std::to_string(input_dim) + ")");
    }
    AutoencoderModel m;
    m.config = config;
    m.seed = seed;
    const auto D = static_cast<Eigen::Index>(input_dim), H = static_cast<Eigen::Index>(L);
    const double r = std::sqrt(6.0 / static_cast<double>(input_dim + L));
    Rng rng(seed);
    m.w_enc.resize(H, D);
    m.w_dec.resize(D, H);
    for (Eigen::Index i = 0; i < m.w_enc.size(); ++i) m.w_enc.data()[i] = rng.uniform(-r, r);
    for (Eigen::Index i = 0; i < m.w_dec.size(); ++i) m.w_dec.data()[i] = rng.uniform(-r, r);
    m.b_enc = Eigen::VectorXd::Zero(H);
    m.b_dec = Eigen::VectorXd::Zero(D);
    return m;
}

double autoencoder_loss(const AutoencoderModel& model, const Eigen::MatrixXd& batch, AutoencoderGradients* grads) {
    check_input(model, batch.rows());
    const Eigen::MatrixXd h = ((model.w_enc * batch).colwise() + model.b_enc).array().tanh().matrix();
    const Eigen::MatrixXd out = (model.w_dec * h).colwise() + model.b_dec;
    const Eigen::MatrixXd r = out - batch;
    const double count = static_cast<double>(batch.size());
    const double loss = r.squaredNorm() / count;
    if (grads) {
        const Eigen::MatrixXd g_out = (2.0 / count) * r;
        grads->w_dec = g_out * h.transpose();
        grads->b_dec = g_out.rowwise().sum();
        const Eigen::MatrixXd g_pre =
            ((model.w_dec.transpose() * g_out).array() * (1.0 - h.array().square())).matrix();
        grads->w_enc = g_pre * batch.transpose();
        grads->b_enc = g_pre.rowwise().sum();
    }
    return loss;
}

AutoencoderTraining train_autoencoder(const std::vector<Eigen::VectorXd>& vectors, const AutoencoderConfig& config,
                                      std::uint64_t seed) {
    if (vectors.empty()) throw Error("autoencoder: no input vectors");
    return train_autoencoder_from(initialize_autoencoder(static_cast<std::size_t>(vectors.front().size()), config, seed),
                                  vectors);
}

AutoencoderTraining train_autoencoder_from(AutoencoderModel model, const std::vector<Eigen::VectorXd>& vectors) {
    if (vectors.size() < 2) throw Error("autoencoder: at least two input vectors are required");
    const auto D = model.w_enc.cols();
    Eigen::MatrixXd data(D, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        check_input(model, vectors[i].size());
        data.col(static_cast<Eigen::Index>(i)) = vectors[i];
    }
    if (!data.allFinite()) throw Error("autoencoder: input vectors contain non-finite values");

    const auto& cfg = model.config;
    const std::size_t batch_size = std::max<std::size_t>(1, cfg.batch_size);
    Rng rng(model.seed ^ 0xA5A5A5A55A5A5A5AULL);
    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    AdamState adam{zeros_like(model), zeros_like(model)};
    AutoencoderGradients grads;
    AutoencoderTraining out;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            Eigen::MatrixXd batch(D, static_cast<Eigen::Index>(end - start));
            for (std::size_t i = start; i < end; ++i) {
                batch.col(static_cast<Eigen::Index>(i - start)) = data.col(static_cast<Eigen::Index>(order[i]));
            }
            autoencoder_loss(model, batch, &grads);
            const double lr = cfg.learning_rate;
            if (cfg.optimizer == Optimizer::Sgd) {
                model.w_enc -= lr * grads.w_enc;
                model.b_enc -= lr * grads.b_enc;
                model.w_dec -= lr * grads.w_dec;
                model.b_dec -= lr * grads.b_dec;
            } else {
                ++adam.t;
                const double c1 = 1.0 - std::pow(0.9, static_cast<double>(adam.t));
                const double c2 = 1.0 - std::pow(0.999, static_cast<double>(adam.t));
                adam_update(model.w_enc, grads.w_enc, adam.m.w_enc, adam.v.w_enc, lr, c1, c2);
                adam_update(model.b_enc, grads.b_enc, adam.m.b_enc, adam.v.b_enc, lr, c1, c2);
                adam_update(model.w_dec, grads.w_dec, adam.m.w_dec, adam.v.w_dec, lr, c1, c2);
                adam_update(model.b_dec, grads.b_dec, adam.m.b_dec, adam.v.b_dec, lr, c1, c2);
            }
        }
        const double loss = autoencoder_loss(model, data);
        if (!std::isfinite(loss) || !model.finite()) {
            throw Error("autoencoder: loss diverged at epoch " + std::to_string(epoch));
        }
        out.epoch_losses.push_back(loss);
    }
    out.final_loss = out.epoch_losses.empty() ? autoencoder_loss(model, data) : out.epoch_losses.back();
    out.model = std::move(model);
    return out;
}

Eigen::VectorXd encode_latent(const AutoencoderModel& model, const Eigen::VectorXd& x) {
    check_input(model, x.size());
    return (model.w_enc * x + model.b_enc).array().tanh().matrix();
}

Eigen::VectorXd reconstruct(const AutoencoderModel& model, const Eigen::VectorXd& x) {
    return model.w_dec * encode_latent(model, x) + model.b_dec;
}

}  // namespace infodemic
