#include "infodemic/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "infodemic/corpus_stats.hpp"
#include "infodemic/csv.hpp"
#include "infodemic/evaluation.hpp"
#include "infodemic/report.hpp"
#include "infodemic/sentiment.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Outputs {
public:
    Outputs(std::string command, const RunConfig& config) : config_(config) {
        manifest_.command = std::move(command);
        manifest_.config = to_json(config);
        manifest_.version = INFODEMIC_VERSION;
    }

    void write(const std::string& relative, std::string_view content) {
        write_file_atomic(config_.out / relative, content);
        manifest_.outputs.push_back(relative);
    }

    /// `writer` fills a temporary file that is then renamed into place.
    void write_with(const std::string& relative, const std::function<void(const fs::path&)>& writer) {
        const fs::path target = config_.out / relative;
        fs::create_directories(target.parent_path());
        fs::path tmp = target;
        tmp += ".tmp";
        writer(tmp);
        fs::rename(tmp, target);
        manifest_.outputs.push_back(relative);
    }

    void write_json(const std::string& relative, json document) { write(relative, render_json(std::move(document))); }

    /// Runs `body`, recording its wall time; errors gain the stage name.
    template <typename F>
    auto stage(const std::string& name, F&& body) {
        const auto start = std::chrono::steady_clock::now();
        auto record = [&] {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            manifest_.stages.push_back({name, elapsed.count()});
        };
        try {
            if constexpr (std::is_void_v<decltype(body())>) {
                body();
                record();
            } else {
                auto result = body();
                record();
                return result;
            }
        } catch (const std::exception& e) {
            throw Error(name + ": " + e.what());
        }
    }

    RunManifest finish() {
        write_file_atomic(config_.out / "manifest.json", render_json(to_json(manifest_)));
        return manifest_;
    }

private:
    const RunConfig& config_;
    RunManifest manifest_;
};

Corpus load_input(const RunConfig& config) { return load_corpus(config.input, config.format, config.schema); }

std::vector<SentimentLabel> resolve_sentiment(const RunConfig& config, const Corpus& corpus) {
    if (config.sentiment == SentimentSource::External) {
        ExternalLabelBackend backend(load_external_labels(config.sentiment_labels));
        const auto missing = backend.missing_ids(corpus);
        if (!missing.empty()) {
            std::string list;
            for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 20); ++i) {
                list += (i ? ", " : "") + missing[i];
            }
            if (missing.size() > 20) list += ", ...";
            throw Error(config.sentiment_labels.string() + ": " + std::to_string(missing.size()) +
                        " post ids have no sentiment label: " + list);
        }
        return classify_corpus(corpus, backend);
    }
    const auto backend = config.lexicon.empty() ? LexiconBackend::builtin() : LexiconBackend::from_file(config.lexicon);
    return classify_corpus(corpus, backend);
}

std::vector<csv::Row> tag_rows(const TagFrequencyTable& table) {
    std::vector<csv::Row> rows;
    for (const auto& [tag, count] : table.entries) rows.push_back({tag, std::to_string(count)});
    return rows;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void emit_tag_table(Outputs& out, const std::string& stem, const std::string& title, const TagFrequencyTable& table) {
    out.write(stem + ".csv", render_csv({"tag", "count"}, tag_rows(table)));
    out.write(stem + ".svg", render_bar_chart_svg(title, table.entries));
}

std::vector<std::vector<double>> post_embeddings(const EncoderModel& model, const Corpus& corpus) {
    std::vector<std::vector<double>> out;
    out.reserve(corpus.size());
    for (const auto& post : corpus.posts) {
        const Eigen::VectorXd e = sentence_embedding(model, post.text);
        out.emplace_back(e.data(), e.data() + e.size());
    }
    return out;
}

std::vector<std::vector<double>> feature_matrix(const std::vector<BehavioralFeatures>& features) {
    std::vector<std::vector<double>> out;
    out.reserve(features.size());
    for (const auto& f : features) {
        const auto v = f.as_vector();
        out.emplace_back(v.begin(), v.end());
    }
    return out;
}

json cv_json(const CrossValidationResult& cv) {
    json folds = json::array();
    for (const auto& f : cv.folds) folds.push_back(to_json(f));
    return {{"folds", folds}, {"mean_accuracy", cv.mean_accuracy}};
}

std::string sentiment_source_name(SentimentSource s) { return s == SentimentSource::Lexicon ? "lexicon" : "external"; }

}  // namespace

void validate(const RunConfig& config, std::string_view command) {
    auto require_file = [](const fs::path& path, const char* field) {
        if (path.empty()) throw Error(std::string("config: ") + field + " is required");
        if (!fs::is_regular_file(path)) throw Error(std::string("config: ") + field + " '" + path.string() + "' does not exist");
    };
    if (config.out.empty()) throw Error("config: out is required");
    if (command == "ensemble") {
        require_file(config.predictions, "predictions");
        return;
    }
    require_file(config.input, "input");
    if (config.sentiment == SentimentSource::External && (command == "concern" || command == "train-eval")) {
        require_file(config.sentiment_labels, "sentiment-labels");
    }
    if (!config.lexicon.empty()) require_file(config.lexicon, "lexicon");
    if (command == "topics") {
        if (!config.encoder_model.empty()) require_file(config.encoder_model, "encoder-model");
        if (config.k_min < 2 || config.k_max < config.k_min) throw Error("config: need 2 <= k-min <= k-max");
        if (config.topics.top_n < 2) throw Error("config: top-words must be at least 2");
    }
    if (command == "train-eval") {
        if (config.test_fraction < 0.0 || config.test_fraction >= 1.0) throw Error("config: test-fraction must be in [0, 1)");
        if (config.test_fraction == 0.0 && config.folds < 2) throw Error("config: folds must be at least 2");
    }
    if (command == "stats" && config.top_tags == 0) throw Error("config: top-tags must be at least 1");
}

json to_json(const RunConfig& c) {
    const auto& e = c.encoder;
    const auto& t = c.topics;
    return {{"input", c.input.string()},
            {"format", c.format == CorpusFormat::Csv ? "csv" : "jsonl"},
            {"schema",
             {{"text_field", c.schema.text_field},
              {"label_field", c.schema.label_field},
              {"id_field", c.schema.id_field},
              {"source_field", c.schema.source_field}}},
            {"out", c.out.string()},
            {"seed", c.seed},
            {"sentiment", sentiment_source_name(c.sentiment)},
            {"lexicon", c.lexicon.string()},
            {"sentiment_labels", c.sentiment_labels.string()},
            {"elimination", std::string(elimination_name(c.elimination))},
            {"inject", c.inject},
            {"sweep", c.sweep},
            {"folds", c.folds},
            {"test_fraction", c.test_fraction},
            {"encoder",
             {{"embed_dim", e.embed_dim},
              {"hidden_dim", e.hidden_dim},
              {"learning_rate", e.learning_rate},
              {"clip_norm", e.clip_norm},
              {"batch_size", e.batch_size},
              {"epochs", e.epochs},
              {"init_range", e.init_range},
              {"min_freq", e.min_freq}}},
            {"svm",
             {{"C", c.svm.c},
              {"gamma", c.svm.gamma ? json(*c.svm.gamma) : json(nullptr)},
              {"tol", c.svm.tol},
              {"max_passes", c.svm.max_passes}}},
            {"top_tags", c.top_tags},
            {"preprocess",
             {{"min_length", c.preprocess.min_length},
              {"stemmer", c.preprocess.stemmer == Stemmer::RuleBasedSuffix ? "suffix" : "none"},
              {"drop_urls", c.preprocess.drop_urls}}},
            {"topics",
             {{"alpha", t.alpha},
              {"beta", t.beta},
              {"lda_iterations", t.lda_iterations},
              {"latent_dim", t.autoencoder.latent_dim},
              {"autoencoder_epochs", t.autoencoder.epochs},
              {"autoencoder_learning_rate", t.autoencoder.learning_rate},
              {"autoencoder_batch_size", t.autoencoder.batch_size},
              {"autoencoder_optimizer", t.autoencoder.optimizer == Optimizer::Adam ? "adam" : "sgd"},
              {"kmeans_restarts", t.kmeans_restarts},
              {"kmeans_max_iters", t.kmeans_max_iters},
              {"top_words", t.top_n},
              {"k_min", c.k_min},
              {"k_max", c.k_max},
              {"overlap_threshold", c.overlap_threshold},
              {"encoder_model", c.encoder_model.string()},
              {"embedding_epochs", c.embedding_epochs}}},
            {"predictions", c.predictions.string()}};
}

json to_json(const RunManifest& m) {
    json stages = json::array();
    for (const auto& s : m.stages) stages.push_back({{"stage", s.name}, {"seconds", s.seconds}});
    return {{"command", m.command}, {"version", m.version}, {"config", m.config}, {"outputs", m.outputs},
            {"stages", stages}};
}

RunManifest cmd_stats(const RunConfig& config) {
    validate(config, "stats");
    Outputs out("stats", config);
    const Corpus corpus = out.stage("load", [&] { return load_input(config); });
    out.stage("stats", [&] {
        // counts do not depend on sentiment
        const std::vector<SentimentLabel> neutral(corpus.size(), SentimentLabel::Neutral);
        const auto features = corpus_features(corpus, neutral, config.elimination);
        json doc = to_json(corpus_stats(corpus, features));
        doc["corpus"] = corpus.name;
        doc["elimination"] = std::string(elimination_name(config.elimination));
        out.write_json("stats.json", doc);
    });
    out.stage("tags", [&] {
        const std::size_t n = config.top_tags;
        const std::string top = "top" + std::to_string(n);
        for (auto kind : {TagKind::Hashtag, TagKind::Mention}) {
            const std::string kind_name = kind == TagKind::Hashtag ? "hashtags" : "mentions";
            for (auto label : {Label::Fake, Label::Real}) {
                const std::string label_str(label_name(label));
                emit_tag_table(out, kind_name + "_" + label_str + "_" + top,
                               "Top " + std::to_string(n) + " " + kind_name + " in " + label_str + " posts",
                               tag_frequency(corpus, kind, label, n));
            }
        }
        const auto fake = tag_frequency(corpus, TagKind::Hashtag, Label::Fake);
        const auto real = tag_frequency(corpus, TagKind::Hashtag, Label::Real);
        emit_tag_table(out, "hashtags_fake_exclusive_" + top,
                       "Top " + std::to_string(n) + " hashtags only in fake posts", exclusive_tags(fake, real, n));
        emit_tag_table(out, "hashtags_real_exclusive_" + top,
                       "Top " + std::to_string(n) + " hashtags only in real posts", exclusive_tags(real, fake, n));
    });
    return out.finish();
}

RunManifest cmd_concern(const RunConfig& config) {
    validate(config, "concern");
    Outputs out("concern", config);
    const Corpus corpus = out.stage("load", [&] { return load_input(config); });
    const auto sentiment = out.stage("sentiment", [&] { return resolve_sentiment(config, corpus); });
    out.stage("concern", [&] {
        std::vector<SentimentLabel> fake_labels, real_labels;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            (corpus.posts[i].label == Label::Fake ? fake_labels : real_labels).push_back(sentiment[i]);
        }
        const auto fake = sentiment_distribution(fake_labels);
        const auto real = sentiment_distribution(real_labels);
        json doc;
        doc["corpus"] = corpus.name;
        doc["sentiment"] = sentiment_source_name(config.sentiment);
        doc["fake"] = {{"distribution", to_json(fake)}, {"concern", to_json(concern_index(fake))}};
        doc["real"] = {{"distribution", to_json(real)}, {"concern", to_json(concern_index(real))}};
        for (auto [key, mode] : {std::pair{"full_precision", Rounding::FullPrecision},
                                 std::pair{"two_decimal", Rounding::TwoDecimal}}) {
            try {
                doc["significance"][key] = to_json(concern_significance(fake, real, mode));
            } catch (const Error& e) {
                doc["significance"][key] = {{"error", e.what()}};
            }
        }
        out.write_json("concern.json", doc);

        std::vector<csv::Row> rows;
        for (auto label : kSentimentLabels) {
            rows.push_back({std::string(sentiment_name(label)), std::to_string(fake[label]), std::to_string(real[label])});
        }
        out.write("sentiment_distribution.csv", render_csv({"sentiment", "fake", "real"}, rows));
    });
    return out.finish();
}

RunManifest cmd_topics(const RunConfig& config) {
    validate(config, "topics");
    Outputs out("topics", config);
    const Corpus corpus = out.stage("load", [&] { return load_input(config); });
    const auto embeddings = out.stage("embeddings", [&] {
        if (!config.encoder_model.empty()) return post_embeddings(load_encoder(config.encoder_model), corpus);
        EncoderConfig enc = config.encoder;
        enc.epochs = config.embedding_epochs;
        std::vector<std::size_t> all(corpus.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const std::vector<SentimentLabel> neutral(corpus.size(), SentimentLabel::Neutral);
        const auto trained = train_encoder_indices(corpus, all, enc, config.seed, SequenceOptions{}, neutral);
        return post_embeddings(trained.model, corpus);
    });

    std::vector<TopicReport> reports;
    for (auto label : {Label::Fake, Label::Real}) {
        const std::string name(label_name(label));
        TokenDocs docs;
        std::vector<std::vector<double>> emb;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus.posts[i].label != label) continue;
            docs.push_back(preprocess_topic_text(corpus.posts[i].text, config.preprocess));
            emb.push_back(embeddings[i]);
        }
        if (docs.empty()) continue;
        auto report = out.stage("topics-" + name, [&] {
            return select_k(docs, emb, config.k_min, config.k_max, config.topics, config.seed);
        });
        report.name = name;
        out.write_json("topics_" + name + ".json", to_json(report));
        for (const auto& cluster : report.clusters) {
            std::vector<csv::Row> rows;
            for (const auto& w : cluster.words) {
                rows.push_back({w.word, std::to_string(w.count), format_double(w.weight)});
            }
            out.write("topics_" + name + "_cluster" + std::to_string(cluster.index) + ".csv",
                      render_csv({"word", "count", "weight"}, rows));
        }
        reports.push_back(std::move(report));
    }
    if (reports.empty()) throw Error("topics: corpus has no posts");

    if (reports.size() == 2) {
        const auto sim = topic_similarity(reports[0], reports[1], config.topics.top_n);
        json overlapping = json::array();
        for (const auto& row : sim) {
            json flags = json::array();
            for (double s : row) flags.push_back(s >= config.overlap_threshold);
            overlapping.push_back(flags);
        }
        out.write_json("similarity.json", {{"rows", reports[0].name},
                                           {"columns", reports[1].name},
                                           {"top_n", config.topics.top_n},
                                           {"threshold", config.overlap_threshold},
                                           {"similarity", sim},
                                           {"overlapping", overlapping},
                                           {"overlapping_topics", overlapping_topics(sim, config.overlap_threshold)}});
    }
    return out.finish();
}

RunManifest cmd_train_eval(const RunConfig& config) {
    validate(config, "train-eval");
    Outputs out("train-eval", config);
    const Corpus corpus = out.stage("load", [&] { return load_input(config); });
    const auto sentiment = out.stage("sentiment", [&] { return resolve_sentiment(config, corpus); });

    const auto splits = out.stage("split", [&] {
        if (config.test_fraction > 0.0) {
            auto [train, test] = train_test_split(corpus, config.test_fraction, config.seed);
            out.write_json("split.json", {{"seed", config.seed},
                                          {"test_fraction", config.test_fraction},
                                          {"train", train.size()},
                                          {"test", test.size()}});
            return std::vector<Split>{{std::move(train), std::move(test)}};
        }
        const auto plan = make_folds(corpus, config.folds, config.seed);
        json doc;
        to_json(doc, plan);
        out.write_json("folds.json", doc);
        return splits_from_folds(corpus, plan);
    });

    std::vector<EliminationMode> modes;
    if (config.sweep) {
        modes.assign(kEliminationModes.begin(), kEliminationModes.end());
    } else {
        modes.push_back(config.elimination);
    }

    json runs = json::array();
    std::vector<csv::Row> sweep_rows;
    for (auto mode : modes) {
        const std::string mode_name(elimination_name(mode));
        const SequenceOptions options{config.inject, mode, kMaxContentTokens};

        const auto encoder_cv = out.stage("encoder-" + mode_name, [&] {
            Trainer trainer = [&](const Corpus& c, std::span<const std::size_t> train, std::size_t fold) -> Predictor {
                auto trained = train_encoder_indices(c, train, config.encoder, config.seed + fold, options, sentiment);
                const std::string path = "models/encoder_" + mode_name + "_fold" + std::to_string(fold) + ".bin";
                out.write_with(path, [&](const fs::path& p) { save_encoder(trained.model, p); });
                out.write(path + ".loss.json", render_json({{"epoch_losses", trained.epoch_losses},
                                                            {"final_loss", trained.final_loss}}));
                auto model = std::make_shared<EncoderModel>(std::move(trained.model));
                return [model, &sentiment](const Corpus& cc, std::size_t i) {
                    return predict_text(*model, cc.posts[i].text, sentiment[i]).label;
                };
            };
            return cross_validate(trainer, corpus, splits);
        });

        const auto svm_cv = out.stage("svm-" + mode_name, [&] {
            const auto features = feature_matrix(corpus_features(corpus, sentiment, mode));
            Trainer trainer = [&](const Corpus& c, std::span<const std::size_t> train, std::size_t fold) -> Predictor {
                std::vector<std::vector<double>> x;
                std::vector<int> y;
                for (auto i : train) {
                    x.push_back(features[i]);
                    y.push_back(c.posts[i].label == Label::Fake ? 1 : -1);
                }
                SvmConfig cfg = config.svm;
                cfg.seed = config.seed + fold;
                auto model = std::make_shared<SvmModel>(train_svm(x, y, cfg));
                out.write("models/svm_" + mode_name + "_fold" + std::to_string(fold) + ".json",
                          render_json(to_json(*model)));
                return [model, &features](const Corpus&, std::size_t i) {
                    return svm_predict(*model, features[i]) > 0 ? Label::Fake : Label::Real;
                };
            };
            return cross_validate(trainer, corpus, splits);
        });

        std::vector<Label> enc_preds, svm_preds, gold;
        std::vector<csv::Row> pred_rows;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (!encoder_cv.scored[i]) continue;
            enc_preds.push_back(encoder_cv.out_of_fold[i]);
            svm_preds.push_back(svm_cv.out_of_fold[i]);
            gold.push_back(corpus.posts[i].label);
            pred_rows.push_back({corpus.posts[i].id, std::string(label_name(gold.back())),
                                 std::string(label_name(enc_preds.back())), std::string(label_name(svm_preds.back()))});
        }
        out.write("predictions_" + mode_name + ".csv", render_csv({"id", "gold", "encoder", "svm"}, pred_rows));
        const auto ensemble = agreement_ensemble(enc_preds, svm_preds, gold);

        runs.push_back({{"elimination", mode_name},
                        {"inject", config.inject},
                        {"encoder", cv_json(encoder_cv)},
                        {"svm", cv_json(svm_cv)},
                        {"ensemble", to_json(ensemble)}});
        sweep_rows.push_back({mode_name, format_double(encoder_cv.mean_accuracy), format_double(svm_cv.mean_accuracy),
                              format_double(ensemble.agreed_accuracy), format_double(ensemble.coverage)});
    }

    out.write_json("eval.json", {{"corpus", corpus.name},
                                 {"protocol", config.test_fraction > 0.0 ? "split" : "cross-validation"},
                                 {"splits", splits.size()},
                                 {"seed", config.seed},
                                 {"runs", runs}});
    if (config.sweep) {
        out.write("sweep.csv", render_csv({"elimination", "encoder_accuracy", "svm_accuracy", "ensemble_agreed_accuracy",
                                           "ensemble_coverage"},
                                          sweep_rows));
    }
    return out.finish();
}

RunManifest cmd_ensemble(const RunConfig& config) {
    validate(config, "ensemble");
    Outputs out("ensemble", config);
    out.stage("ensemble", [&] {
        std::ifstream in(config.predictions, std::ios::binary);
        if (!in) throw Error("cannot read " + config.predictions.string());
        const auto rows = csv::read(in);
        if (rows.empty() || rows.front().size() != 4) {
            throw Error(config.predictions.string() + ": expected a header with four columns id,gold,<a>,<b>");
        }
        const auto& header = rows.front();
        std::vector<Label> a, b, gold;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() != 4) {
                throw Error(config.predictions.string() + ": row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " fields");
            }
            try {
                gold.push_back(parse_label_name(row[1]));
                a.push_back(parse_label_name(row[2]));
                b.push_back(parse_label_name(row[3]));
            } catch (const std::exception& e) {
                throw Error(config.predictions.string() + ": row " + std::to_string(r) + ": " + e.what());
            }
        }
        json doc = to_json(agreement_ensemble(a, b, gold));
        doc["classifiers"] = {header[2], header[3]};
        out.write_json("ensemble.json", doc);
    });
    return out.finish();
}

RunManifest run_command(std::string_view command, const RunConfig& config) {
    if (command == "stats") return cmd_stats(config);
    if (command == "concern") return cmd_concern(config);
    if (command == "topics") return cmd_topics(config);
    if (command == "train-eval") return cmd_train_eval(config);
    if (command == "ensemble") return cmd_ensemble(config);
    throw Error("unknown command '" + std::string(command) + "'");
}

}  // namespace infodemic
