#include "infodemic/encoder_model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

constexpr std::size_t kFeatureRows = static_cast<std::size_t>(kFeatureCount * kFeatureBandWidth);
constexpr char kMagic[8] = {'I', 'F', 'D', 'E', 'N', 'C', '1', '\0'};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

template <typename M>
void fill_uniform(M& m, Rng& rng, double range) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-range, range);
    }
}

struct StepCache {
    std::size_t row;
    Eigen::VectorXd i, f, o, g, c, tanh_c, h;
};

// Runs the recurrence and keeps every step for backpropagation.
std::vector<StepCache> run_forward(const EncoderModel& m, std::span<const int> ids) {
    const auto H = static_cast<Eigen::Index>(m.config.hidden_dim);
    std::vector<StepCache> steps;
    steps.reserve(ids.size());
    Eigen::VectorXd h = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(H);
    for (int id : ids) {
        StepCache s;
        s.row = m.row_of(id);
        const Eigen::VectorXd z = m.w_input * m.embedding.row(static_cast<Eigen::Index>(s.row)).transpose() +
                                  m.w_hidden * h + m.bias;
        s.i = z.segment(0, H).unaryExpr(&sigmoid);
        s.f = z.segment(H, H).unaryExpr(&sigmoid);
        s.o = z.segment(2 * H, H).unaryExpr(&sigmoid);
        s.g = z.segment(3 * H, H).array().tanh();
        c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
        s.c = c;
        s.tanh_c = c.array().tanh();
        h = s.o.cwiseProduct(s.tanh_c);
        s.h = h;
        steps.push_back(std::move(s));
    }
    return steps;
}

Eigen::Vector2d softmax(const Eigen::Vector2d& logits) {
    const double m = logits.maxCoeff();
    Eigen::Vector2d e = (logits.array() - m).exp();
    return e / e.sum();
}

Eigen::Vector2d logits_of(const EncoderModel& m, const std::vector<StepCache>& steps) {
    const Eigen::VectorXd h = steps.empty() ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.config.hidden_dim))
                                            : steps.back().h;
    return m.w_out * h + m.b_out;
}

void write_doubles(std::ostream& out, const double* data, std::size_t n) {
    static_assert(std::endian::native == std::endian::little, "model files are little-endian");
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::istream& in, double* data, std::size_t n) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw Error("encoder model file truncated");
}

}  // namespace

EncoderModel EncoderModel::initialize(Vocabulary vocab, const EncoderConfig& config, const SequenceOptions& options,
                                      std::uint64_t seed) {
    if (config.embed_dim == 0 || config.hidden_dim == 0) throw Error("encoder: dimensions must be positive");
    EncoderModel m;
    m.config = config;
    m.options = options;
    m.vocab = std::move(vocab);
    const auto D = static_cast<Eigen::Index>(config.embed_dim);
    const auto H = static_cast<Eigen::Index>(config.hidden_dim);
    const auto rows = static_cast<Eigen::Index>(m.vocab.id_bound()) + static_cast<Eigen::Index>(kFeatureRows);
    Rng rng(seed);
    m.embedding.resize(rows, D);
    m.w_input.resize(4 * H, D);
    m.w_hidden.resize(4 * H, H);
    m.w_out.resize(2, H);
    fill_uniform(m.embedding, rng, config.init_range);
    fill_uniform(m.w_input, rng, config.init_range);
    fill_uniform(m.w_hidden, rng, config.init_range);
    fill_uniform(m.w_out, rng, config.init_range);
    m.bias = Eigen::VectorXd::Zero(4 * H);
    m.b_out = Eigen::VectorXd::Zero(2);
    return m;
}

std::size_t EncoderModel::row_of(int id) const {
    if (id >= 0 && id < vocab.id_bound()) return static_cast<std::size_t>(id);
    if (id >= kFeatureIdBase && id < kFeatureIdBase + static_cast<int>(kFeatureRows)) {
        return static_cast<std::size_t>(vocab.id_bound()) + static_cast<std::size_t>(id - kFeatureIdBase);
    }
    throw Error("encoder: token id " + std::to_string(id) + " outside the vocabulary and feature ranges");
}

std::size_t EncoderModel::parameter_count() const {
    return static_cast<std::size_t>(embedding.size() + w_input.size() + w_hidden.size() + bias.size() +
                                    w_out.size() + b_out.size());
}

bool EncoderModel::finite() const {
    return embedding.allFinite() && w_input.allFinite() && w_hidden.allFinite() && bias.allFinite() &&
           w_out.allFinite() && b_out.allFinite();
}

void EncoderGradients::reset(const EncoderModel& m) {
    embedding.clear();
    w_input = Eigen::MatrixXd::Zero(m.w_input.rows(), m.w_input.cols());
    w_hidden = Eigen::MatrixXd::Zero(m.w_hidden.rows(), m.w_hidden.cols());
    w_out = Eigen::MatrixXd::Zero(m.w_out.rows(), m.w_out.cols());
    bias = Eigen::VectorXd::Zero(m.bias.size());
    b_out = Eigen::VectorXd::Zero(m.b_out.size());
}

void EncoderGradients::scale(double factor) {
    for (auto& [row, g] : embedding) g *= factor;
    w_input *= factor;
    w_hidden *= factor;
    w_out *= factor;
    bias *= factor;
    b_out *= factor;
}

double EncoderGradients::squared_norm() const {
    double total = w_input.squaredNorm() + w_hidden.squaredNorm() + w_out.squaredNorm() + bias.squaredNorm() +
                   b_out.squaredNorm();
    for (const auto& [row, g] : embedding) total += g.squaredNorm();
    return total;
}

Eigen::Vector2d encoder_probabilities(const EncoderModel& model, std::span<const int> ids) {
    return softmax(logits_of(model, run_forward(model, ids)));
}

double encoder_loss(const EncoderModel& m, std::span<const int> ids, Label target, EncoderGradients* grads) {
    const auto steps = run_forward(m, ids);
    const Eigen::Vector2d p = softmax(logits_of(m, steps));
    const int y = target == Label::Fake ? 0 : 1;
    const double loss = -std::log(std::max(p(y), 1e-300));
    if (!grads) return loss;

    const auto H = static_cast<Eigen::Index>(m.config.hidden_dim);
    const auto D = static_cast<Eigen::Index>(m.config.embed_dim);
    Eigen::Vector2d dlogits = p;
    dlogits(y) -= 1.0;
    const Eigen::VectorXd h_last = steps.empty() ? Eigen::VectorXd::Zero(H) : steps.back().h;
    grads->w_out += dlogits * h_last.transpose();
    grads->b_out += dlogits;

    Eigen::VectorXd dh = m.w_out.transpose() * dlogits;
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(H);
    Eigen::VectorXd dz(4 * H);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(H);
    for (std::size_t t = steps.size(); t-- > 0;) {
        const auto& s = steps[t];
        const Eigen::VectorXd& c_prev = t > 0 ? steps[t - 1].c : zero;
        const Eigen::VectorXd& h_prev = t > 0 ? steps[t - 1].h : zero;

        const Eigen::ArrayXd do_ = dh.array() * s.tanh_c.array();
        dc.array() += dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square());
        const Eigen::ArrayXd di = dc.array() * s.g.array();
        const Eigen::ArrayXd dg = dc.array() * s.i.array();
        const Eigen::ArrayXd df = dc.array() * c_prev.array();
        dz.segment(0, H) = di * s.i.array() * (1.0 - s.i.array());
        dz.segment(H, H) = df * s.f.array() * (1.0 - s.f.array());
        dz.segment(2 * H, H) = do_ * s.o.array() * (1.0 - s.o.array());
        dz.segment(3 * H, H) = dg * (1.0 - s.g.array().square());
        dc = (dc.array() * s.f.array()).matrix();

        const auto x = m.embedding.row(static_cast<Eigen::Index>(s.row)).transpose();
        grads->w_input.noalias() += dz * x.transpose();
        grads->w_hidden.noalias() += dz * h_prev.transpose();
        grads->bias += dz;
        auto [it, inserted] = grads->embedding.try_emplace(s.row, Eigen::VectorXd::Zero(D));
        it->second.noalias() += m.w_input.transpose() * dz;
        dh = m.w_hidden.transpose() * dz;
    }
    return loss;
}

EncoderPrediction predict(const EncoderModel& model, const TokenSequence& seq) {
    const Eigen::Vector2d p = encoder_probabilities(model, seq.ids);
    return {p(0) > p(1) ? Label::Fake : Label::Real, p(0)};
}

EncoderPrediction predict_text(const EncoderModel& model, std::string_view text, SentimentLabel sentiment) {
    return predict(model, prepare_sequence(text, sentiment, model.vocab, model.options));
}

EncoderTraining train_encoder_on(EncoderModel model, std::span<const TokenSequence> sequences,
                                 std::span<const Label> labels, std::uint64_t seed) {
    if (sequences.size() != labels.size()) throw Error("train_encoder: sequences and labels differ in length");
    if (sequences.empty()) throw Error("train_encoder: no training examples");
    const auto& cfg = model.config;
    if (cfg.batch_size == 0) throw Error("train_encoder: batch size must be positive");

    // distinct stream from the initialization draws
    Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<std::size_t> order(sequences.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    EncoderGradients grads;
    EncoderTraining result;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(std::span(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            grads.reset(model);
            for (std::size_t b = start; b < end; ++b) {
                const auto idx = order[b];
                epoch_loss += encoder_loss(model, sequences[idx].ids, labels[idx], &grads);
            }
            grads.scale(1.0 / static_cast<double>(end - start));
            const double norm = std::sqrt(grads.squared_norm());
            double step = cfg.learning_rate;
            if (cfg.clip_norm > 0.0 && norm > cfg.clip_norm) step *= cfg.clip_norm / norm;

            model.w_input -= step * grads.w_input;
            model.w_hidden -= step * grads.w_hidden;
            model.bias -= step * grads.bias;
            model.w_out -= step * grads.w_out;
            model.b_out -= step * grads.b_out;
            for (const auto& [row, g] : grads.embedding) {
                model.embedding.row(static_cast<Eigen::Index>(row)) -= step * g.transpose();
            }
        }
        epoch_loss /= static_cast<double>(order.size());
        if (!std::isfinite(epoch_loss) || !model.finite()) {
            throw Error("train_encoder: loss diverged at epoch " + std::to_string(epoch + 1));
        }
        result.epoch_losses.push_back(epoch_loss);
    }
    result.final_loss = result.epoch_losses.empty() ? 0.0 : result.epoch_losses.back();
    result.model = std::move(model);
    return result;
}

EncoderTraining train_encoder_indices(const Corpus& corpus, std::span<const std::size_t> train,
                                      const EncoderConfig& config, std::uint64_t seed,
                                      const SequenceOptions& options, std::span<const SentimentLabel> sentiment) {
    if (options.inject && sentiment.size() != corpus.size()) {
        throw Error("train_encoder: sentiment labels must be aligned with the corpus when injecting");
    }
    std::vector<std::string> texts;
    texts.reserve(train.size());
    for (auto i : train) texts.push_back(eliminate(corpus.posts.at(i).text, options.elimination));
    auto vocab = build_vocab(texts, config.min_freq);

    std::vector<TokenSequence> seqs;
    std::vector<Label> labels;
    seqs.reserve(train.size());
    for (auto i : train) {
        const auto s = options.inject ? sentiment[i] : SentimentLabel::Neutral;
        seqs.push_back(prepare_sequence(corpus.posts[i].text, s, vocab, options));
        labels.push_back(corpus.posts[i].label);
    }
    auto model = EncoderModel::initialize(std::move(vocab), config, options, seed);
    return train_encoder_on(std::move(model), seqs, labels, seed);
}

EncoderTraining train_encoder(const Corpus& corpus, const FoldPlan& folds, std::size_t held_out,
                              const EncoderConfig& config, std::uint64_t seed, const SequenceOptions& options,
                              std::span<const SentimentLabel> sentiment) {
    if (held_out >= folds.k) throw Error("train_encoder: held-out fold out of range");
    const auto train = folds.train_indices(corpus, held_out);
    return train_encoder_indices(corpus, train, config, seed, options, sentiment);
}

Eigen::VectorXd sentence_embedding(const EncoderModel& model, std::string_view text) {
    const auto seq = tokenize(text, model.vocab);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.config.embed_dim));
    std::size_t n = 0;
    for (int id : seq.ids) {
        if (id == kBosId || id == kEosId || id == kPadId) continue;
        sum += model.embedding.row(static_cast<Eigen::Index>(model.row_of(id))).transpose();
        ++n;
    }
    return n == 0 ? sum : Eigen::VectorXd(sum / static_cast<double>(n));
}

void save_encoder(const EncoderModel& m, const std::filesystem::path& path) {
    nlohmann::json header = {
        {"format", "infodemic-encoder"},
        {"version", 1},
        {"config",
         {{"embed_dim", m.config.embed_dim},
          {"hidden_dim", m.config.hidden_dim},
          {"learning_rate", m.config.learning_rate},
          {"clip_norm", m.config.clip_norm},
          {"batch_size", m.config.batch_size},
          {"epochs", m.config.epochs},
          {"init_range", m.config.init_range},
          {"min_freq", m.config.min_freq}}},
        {"options",
         {{"inject", m.options.inject},
          {"elimination", elimination_name(m.options.elimination)},
          {"max_content", m.options.max_content}}},
        {"vocab", m.vocab.ids()},
        {"embedding_rows", m.embedding.rows()}};
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write encoder model '" + path.string() + "'");
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_doubles(out, m.embedding.data(), static_cast<std::size_t>(m.embedding.size()));
    write_doubles(out, m.w_input.data(), static_cast<std::size_t>(m.w_input.size()));
    write_doubles(out, m.w_hidden.data(), static_cast<std::size_t>(m.w_hidden.size()));
    write_doubles(out, m.bias.data(), static_cast<std::size_t>(m.bias.size()));
    write_doubles(out, m.w_out.data(), static_cast<std::size_t>(m.w_out.size()));
    write_doubles(out, m.b_out.data(), static_cast<std::size_t>(m.b_out.size()));
    if (!out) throw Error("failed writing encoder model '" + path.string() + "'");
}

EncoderModel load_encoder(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read encoder model '" + path.string() + "'");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error("'" + path.string() + "' is not an encoder model");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error("encoder model file truncated");
    const auto header = nlohmann::json::parse(text);
    if (header.at("version").get<int>() != 1) throw Error("unsupported encoder model version");

    EncoderConfig cfg;
    const auto& c = header.at("config");
    cfg.embed_dim = c.at("embed_dim");
    cfg.hidden_dim = c.at("hidden_dim");
    cfg.learning_rate = c.at("learning_rate");
    cfg.clip_norm = c.at("clip_norm");
    cfg.batch_size = c.at("batch_size");
    cfg.epochs = c.at("epochs");
    cfg.init_range = c.at("init_range");
    cfg.min_freq = c.at("min_freq");
    SequenceOptions opts;
    const auto& o = header.at("options");
    opts.inject = o.at("inject");
    opts.elimination = parse_elimination(o.at("elimination").get<std::string>());
    opts.max_content = o.at("max_content");

    EncoderModel m;
    m.config = cfg;
    m.options = opts;
    m.vocab = Vocabulary(header.at("vocab").get<std::map<std::string, int>>());
    const auto D = static_cast<Eigen::Index>(cfg.embed_dim);
    const auto H = static_cast<Eigen::Index>(cfg.hidden_dim);
    m.embedding.resize(header.at("embedding_rows").get<Eigen::Index>(), D);
    m.w_input.resize(4 * H, D);
    m.w_hidden.resize(4 * H, H);
    m.bias.resize(4 * H);
    m.w_out.resize(2, H);
    m.b_out.resize(2);
    read_doubles(in, m.embedding.data(), static_cast<std::size_t>(m.embedding.size()));
    read_doubles(in, m.w_input.data(), static_cast<std::size_t>(m.w_input.size()));
    read_doubles(in, m.w_hidden.data(), static_cast<std::size_t>(m.w_hidden.size()));
    read_doubles(in, m.bias.data(), static_cast<std::size_t>(m.bias.size()));
    read_doubles(in, m.w_out.data(), static_cast<std::size_t>(m.w_out.size()));
    read_doubles(in, m.b_out.data(), static_cast<std::size_t>(m.b_out.size()));
    return m;
}

}  // namespace infodemic
