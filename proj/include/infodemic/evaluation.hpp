#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "infodemic/corpus.hpp"

namespace infodemic {

/// Confusion counts with Fake as the positive class.
struct EvalReport {
    double accuracy = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t n = 0;
};

EvalReport evaluate(std::span<const Label> predictions, std::span<const Label> gold);

/// Classifies post `index` of `corpus`.
using Predictor = std::function<Label(const Corpus& corpus, std::size_t index)>;
/// Fits on the listed posts; `fold` is the held-out fold (or 0 for a single fit).
using Trainer = std::function<Predictor(const Corpus& corpus, std::span<const std::size_t> train, std::size_t fold)>;

struct CrossValidationResult {
    std::vector<EvalReport> folds;
    double mean_accuracy = 0.0;
    std::vector<Label> out_of_fold;  // aligned with the corpus
    std::vector<bool> scored;
};

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

std::vector<Split> splits_from_folds(const Corpus& corpus, const FoldPlan& folds);

/// Trains on every fold but i and scores fold i, for each i.
CrossValidationResult cross_validate(const Trainer& trainer, const Corpus& corpus, const FoldPlan& folds);
/// Same over explicit splits; `out_of_fold` holds Real for posts in no test set
/// and `scored` marks the posts that were predicted.
CrossValidationResult cross_validate(const Trainer& trainer, const Corpus& corpus, const std::vector<Split>& splits);

/// Fits on all of `train` and scores every post of `test`.
EvalReport cross_corpus_evaluate(const Trainer& trainer, const Corpus& train, const Corpus& test);

/// Accuracy restricted to the items where two classifiers agree. This is not a
/// vote: disagreements are left out of both numerator and denominator.
struct EnsembleReport {
    std::size_t n_total = 0;
    std::size_t n_agreed = 0;
    std::size_t n_agreed_correct = 0;
    double agreed_accuracy = 0.0;  // 0 with `empty` set when nothing agrees
    double coverage = 0.0;
    bool empty = true;
};

EnsembleReport agreement_ensemble(std::span<const Label> preds_a, std::span<const Label> preds_b,
                                  std::span<const Label> gold);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const EnsembleReport& report);

}  // namespace infodemic
