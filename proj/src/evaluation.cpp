#include "infodemic/evaluation.hpp"

#include <numeric>

#include "infodemic/text.hpp"

namespace infodemic {

EvalReport evaluate(std::span<const Label> predictions, std::span<const Label> gold) {
    if (predictions.size() != gold.size()) throw Error("evaluate: predictions and gold differ in length");
    if (gold.empty()) throw Error("evaluate: no items");
    EvalReport r;
    r.n = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool pred_fake = predictions[i] == Label::Fake;
        const bool gold_fake = gold[i] == Label::Fake;
        if (pred_fake && gold_fake) ++r.tp;
        else if (pred_fake) ++r.fp;
        else if (gold_fake) ++r.fn;
        else ++r.tn;
    }
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(r.n);
    return r;
}

std::vector<Split> splits_from_folds(const Corpus& corpus, const FoldPlan& folds) {
    std::vector<Split> out;
    for (std::size_t fold = 0; fold < folds.k; ++fold) {
        out.push_back({folds.train_indices(corpus, fold), folds.test_indices(corpus, fold)});
    }
    return out;
}

CrossValidationResult cross_validate(const Trainer& trainer, const Corpus& corpus, const FoldPlan& folds) {
    return cross_validate(trainer, corpus, splits_from_folds(corpus, folds));
}

CrossValidationResult cross_validate(const Trainer& trainer, const Corpus& corpus, const std::vector<Split>& splits) {
    CrossValidationResult result;
    result.out_of_fold.assign(corpus.size(), Label::Real);
    result.scored.assign(corpus.size(), false);
    for (std::size_t fold = 0; fold < splits.size(); ++fold) {
        std::vector<Label> preds, gold;
        try {
            const Predictor predictor = trainer(corpus, splits[fold].train, fold);
            for (auto i : splits[fold].test) {
                preds.push_back(predictor(corpus, i));
                gold.push_back(corpus.posts[i].label);
                result.out_of_fold[i] = preds.back();
                result.scored[i] = true;
            }
            result.folds.push_back(evaluate(preds, gold));
        } catch (const std::exception& e) {
            throw Error("fold " + std::to_string(fold) + ": " + e.what());
        }
    }
    double sum = 0.0;
    for (const auto& r : result.folds) sum += r.accuracy;
    result.mean_accuracy = result.folds.empty() ? 0.0 : sum / static_cast<double>(result.folds.size());
    return result;
}

EvalReport cross_corpus_evaluate(const Trainer& trainer, const Corpus& train, const Corpus& test) {
    std::vector<std::size_t> all(train.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Predictor predictor = trainer(train, all, 0);
    std::vector<Label> preds, gold;
    for (std::size_t i = 0; i < test.size(); ++i) {
        preds.push_back(predictor(test, i));
        gold.push_back(test.posts[i].label);
    }
    return evaluate(preds, gold);
}

EnsembleReport agreement_ensemble(std::span<const Label> preds_a, std::span<const Label> preds_b,
                                  std::span<const Label> gold) {
    if (preds_a.size() != preds_b.size() || preds_a.size() != gold.size()) {
        throw Error("agreement_ensemble: prediction and gold sequences differ in length");
    }
    EnsembleReport r;
    r.n_total = gold.size();
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (preds_a[i] != preds_b[i]) continue;
        ++r.n_agreed;
        if (preds_a[i] == gold[i]) ++r.n_agreed_correct;
    }
    r.empty = r.n_agreed == 0;
    if (!r.empty) r.agreed_accuracy = static_cast<double>(r.n_agreed_correct) / static_cast<double>(r.n_agreed);
    if (r.n_total > 0) r.coverage = static_cast<double>(r.n_agreed) / static_cast<double>(r.n_total);
    return r;
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"accuracy", r.accuracy}, {"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}, {"n", r.n}};
}

nlohmann::json to_json(const EnsembleReport& r) {
    return {{"n_total", r.n_total},       {"n_agreed", r.n_agreed}, {"n_agreed_correct", r.n_agreed_correct},
            {"agreed_accuracy", r.agreed_accuracy}, {"coverage", r.coverage}, {"empty", r.empty}};
}

}  // namespace infodemic
