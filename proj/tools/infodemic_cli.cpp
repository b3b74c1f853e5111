#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "infodemic/pipeline.hpp"
#include "infodemic/text.hpp"

namespace {

using infodemic::RunConfig;

void add_options(CLI::App& app, RunConfig& c, std::string& format, std::string& sentiment, std::string& elimination,
                 std::string& stemmer, std::string& optimizer, double& gamma) {
    app.set_config("--config", "", "Flat INI/TOML file of option values; flags given on the command line win");

    app.add_option("--input", c.input, "Corpus file");
    app.add_option("--format", format, "Corpus format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--out", c.out, "Output directory")->capture_default_str();
    app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app.add_option("--text-field", c.schema.text_field, "Column holding the post text")->capture_default_str();
    app.add_option("--label-field", c.schema.label_field, "Column holding the fake/real label")->capture_default_str();
    app.add_option("--id-field", c.schema.id_field, "Column holding the post id")->capture_default_str();
    app.add_option("--source-field", c.schema.source_field, "Optional column naming the post source");

    app.add_option("--sentiment", sentiment, "Sentiment backend")->check(CLI::IsMember({"lexicon", "external"}));
    app.add_option("--lexicon", c.lexicon, "word<TAB>weight lexicon replacing the bundled one");
    app.add_option("--sentiment-labels", c.sentiment_labels, "id,label file for the external backend");

    app.add_option("--elimination", elimination, "Tag elimination mode")
        ->check(CLI::IsMember({"none", "drop-hashtags", "drop-mentions", "drop-both"}));
    app.add_flag("--inject", c.inject, "Inject behavioral feature tokens");
    app.add_flag("--sweep", c.sweep, "train-eval over all four elimination modes");
    app.add_option("--folds", c.folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--test-fraction", c.test_fraction, "Use one stratified split with this test share");
    app.add_option("--embed-dim", c.encoder.embed_dim)->capture_default_str();
    app.add_option("--hidden-dim", c.encoder.hidden_dim)->capture_default_str();
    app.add_option("--learning-rate", c.encoder.learning_rate)->capture_default_str();
    app.add_option("--clip-norm", c.encoder.clip_norm)->capture_default_str();
    app.add_option("--batch-size", c.encoder.batch_size)->capture_default_str();
    app.add_option("--epochs", c.encoder.epochs)->capture_default_str();
    app.add_option("--init-range", c.encoder.init_range)->capture_default_str();
    app.add_option("--min-freq", c.encoder.min_freq)->capture_default_str();
    app.add_option("--svm-c", c.svm.c)->capture_default_str();
    app.add_option("--svm-gamma", gamma, "RBF gamma (default 1 / feature count)");
    app.add_option("--svm-tol", c.svm.tol)->capture_default_str();
    app.add_option("--svm-max-passes", c.svm.max_passes)->capture_default_str();

    app.add_option("--top-tags", c.top_tags)->capture_default_str();

    app.add_option("--min-token-length", c.preprocess.min_length)->capture_default_str();
    app.add_option("--stemmer", stemmer)->check(CLI::IsMember({"suffix", "none"}));
    app.add_option("--k-min", c.k_min)->capture_default_str();
    app.add_option("--k-max", c.k_max)->capture_default_str();
    app.add_option("--alpha", c.topics.alpha, "LDA document-topic prior (default 50 / k)");
    app.add_option("--beta", c.topics.beta)->capture_default_str();
    app.add_option("--lda-iterations", c.topics.lda_iterations)->capture_default_str();
    app.add_option("--latent-dim", c.topics.autoencoder.latent_dim)->capture_default_str();
    app.add_option("--ae-epochs", c.topics.autoencoder.epochs)->capture_default_str();
    app.add_option("--ae-learning-rate", c.topics.autoencoder.learning_rate)->capture_default_str();
    app.add_option("--ae-batch-size", c.topics.autoencoder.batch_size)->capture_default_str();
    app.add_option("--ae-optimizer", optimizer)->check(CLI::IsMember({"adam", "sgd"}));
    app.add_option("--kmeans-restarts", c.topics.kmeans_restarts)->capture_default_str();
    app.add_option("--kmeans-max-iters", c.topics.kmeans_max_iters)->capture_default_str();
    app.add_option("--top-words", c.topics.top_n)->capture_default_str();
    app.add_option("--overlap-threshold", c.overlap_threshold)->capture_default_str();
    app.add_option("--encoder-model", c.encoder_model, "Trained encoder used for sentence embeddings");
    app.add_option("--embedding-epochs", c.embedding_epochs)->capture_default_str();

    app.add_option("--predictions", c.predictions, "ensemble input: id,gold,<a>,<b>");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;
    std::string format = "csv", sentiment = "lexicon", elimination = "none", stemmer = "suffix", optimizer = "adam";
    double gamma = 0.0;

    CLI::App app{"Fake-news infodemic analysis toolkit"};
    app.set_version_flag("--version", INFODEMIC_VERSION);
    app.fallthrough();
    app.require_subcommand(1);
    add_options(app, config, format, sentiment, elimination, stemmer, optimizer, gamma);

    const std::map<std::string, std::string> commands = {
        {"stats", "Corpus statistics, tag frequency tables and bar charts"},
        {"concern", "Sentiment distributions, concern indices and significance"},
        {"topics", "Hybrid topic clusters per class and their cross-class similarity"},
        {"train-eval", "Cross-validated encoder and SVM with the agreement ensemble"},
        {"ensemble", "Agreement ensemble from a predictions file"}};
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        config.format = infodemic::parse_format(format);
        config.sentiment = sentiment == "external" ? infodemic::SentimentSource::External
                                                   : infodemic::SentimentSource::Lexicon;
        config.elimination = infodemic::parse_elimination(elimination);
        config.preprocess.stemmer = stemmer == "none" ? infodemic::Stemmer::None : infodemic::Stemmer::RuleBasedSuffix;
        config.topics.autoencoder.optimizer = optimizer == "sgd" ? infodemic::Optimizer::Sgd : infodemic::Optimizer::Adam;
        if (app.count("--svm-gamma") > 0) config.svm.gamma = gamma;

        const auto manifest = infodemic::run_command(command, config);
        std::cout << "wrote " << manifest.outputs.size() + 1 << " files to " << config.out.string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        std::cerr << "error: " << command << ": " << message << "\n";
        return 1;
    }
}
