#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "infodemic/corpus.hpp"
#include "infodemic/encoder_model.hpp"
#include "infodemic/features.hpp"
#include "infodemic/preprocess.hpp"
#include "infodemic/svm.hpp"
#include "infodemic/topics.hpp"

namespace infodemic {

enum class SentimentSource { Lexicon, External };

struct RunConfig {
    std::filesystem::path input;
    CorpusFormat format = CorpusFormat::Csv;
    CorpusSchema schema;
    std::filesystem::path out = "out";
    std::uint64_t seed = 0;

    SentimentSource sentiment = SentimentSource::Lexicon;
    std::filesystem::path lexicon;           // empty: bundled lexicon
    std::filesystem::path sentiment_labels;  // id,label file for External

    EliminationMode elimination = EliminationMode::None;
    bool inject = false;
    bool sweep = false;  // train-eval over all four elimination modes
    std::size_t folds = 5;
    double test_fraction = 0.0;  // > 0: one stratified split instead of folds
    EncoderConfig encoder;
    SvmConfig svm;

    std::size_t top_tags = 30;

    PreprocessConfig preprocess;
    TopicPipelineConfig topics;
    std::size_t k_min = 3;
    std::size_t k_max = 10;
    double overlap_threshold = 0.2;
    std::filesystem::path encoder_model;  // empty: train a short-lived encoder for embeddings
    std::size_t embedding_epochs = 2;

    std::filesystem::path predictions;  // ensemble: id,gold,<a>,<b>
};

/// Errors name the first invalid field; paths must exist when the command reads them.
void validate(const RunConfig& config, std::string_view command);

nlohmann::json to_json(const RunConfig& config);

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::string version;
    std::vector<std::string> outputs;  // relative to the output directory
    std::vector<StageTiming> stages;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Each command writes its outputs and a manifest.json under `config.out`.
RunManifest cmd_stats(const RunConfig& config);
RunManifest cmd_concern(const RunConfig& config);
RunManifest cmd_topics(const RunConfig& config);
RunManifest cmd_train_eval(const RunConfig& config);
RunManifest cmd_ensemble(const RunConfig& config);

RunManifest run_command(std::string_view command, const RunConfig& config);

}  // namespace infodemic
