#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>
#include <vector>

#include "infodemic/corpus.hpp"
#include "infodemic/encoder.hpp"
#include "infodemic/evaluation.hpp"
#include "infodemic/features.hpp"
#include "infodemic/kmeans.hpp"
#include "infodemic/pipeline.hpp"
#include "infodemic/preprocess.hpp"
#include "infodemic/sentiment.hpp"
#include "infodemic/text.hpp"
#include "infodemic/topics.hpp"

namespace py = pybind11;
using namespace infodemic;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SentimentDistribution distribution(const std::vector<std::size_t>& counts) {
    if (counts.size() != 5) throw Error("expected five counts ordered very negative to very positive");
    return SentimentDistribution::from_counts(counts[0], counts[1], counts[2], counts[3], counts[4]);
}

std::vector<Label> labels(const std::vector<std::string>& names) {
    std::vector<Label> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(parse_label_name(n));
    return out;
}

Rounding parse_rounding(const std::string& name) {
    if (name == "full_precision") return Rounding::FullPrecision;
    if (name == "two_decimal") return Rounding::TwoDecimal;
    throw Error("unknown rounding '" + name + "' (full_precision, two_decimal)");
}

py::dict features_dict(const BehavioralFeatures& f) {
    py::dict d;
    d["word_count"] = f.word_count;
    d["char_count"] = f.char_count;
    d["hashtag_count"] = f.hashtag_count;
    d["mention_count"] = f.mention_count;
    d["sentiment_code"] = f.sentiment_code;
    return d;
}

// Keys mirror the command-line option names with '-' replaced by '_'.
RunConfig run_config(const py::dict& options) {
    RunConfig c;
    for (const auto& [key_obj, value] : options) {
        const auto key = py::cast<std::string>(key_obj);
        if (key == "input") c.input = py::cast<std::string>(value);
        else if (key == "out") c.out = py::cast<std::string>(value);
        else if (key == "format") c.format = parse_format(py::cast<std::string>(value));
        else if (key == "seed") c.seed = py::cast<std::uint64_t>(value);
        else if (key == "text_field") c.schema.text_field = py::cast<std::string>(value);
        else if (key == "label_field") c.schema.label_field = py::cast<std::string>(value);
        else if (key == "id_field") c.schema.id_field = py::cast<std::string>(value);
        else if (key == "sentiment") {
            const auto s = py::cast<std::string>(value);
            if (s != "lexicon" && s != "external") throw Error("sentiment must be lexicon or external");
            c.sentiment = s == "external" ? SentimentSource::External : SentimentSource::Lexicon;
        } else if (key == "lexicon") c.lexicon = py::cast<std::string>(value);
        else if (key == "sentiment_labels") c.sentiment_labels = py::cast<std::string>(value);
        else if (key == "elimination") c.elimination = parse_elimination(py::cast<std::string>(value));
        else if (key == "inject") c.inject = py::cast<bool>(value);
        else if (key == "sweep") c.sweep = py::cast<bool>(value);
        else if (key == "folds") c.folds = py::cast<std::size_t>(value);
        else if (key == "test_fraction") c.test_fraction = py::cast<double>(value);
        else if (key == "embed_dim") c.encoder.embed_dim = py::cast<std::size_t>(value);
        else if (key == "hidden_dim") c.encoder.hidden_dim = py::cast<std::size_t>(value);
        else if (key == "learning_rate") c.encoder.learning_rate = py::cast<double>(value);
        else if (key == "batch_size") c.encoder.batch_size = py::cast<std::size_t>(value);
        else if (key == "epochs") c.encoder.epochs = py::cast<std::size_t>(value);
        else if (key == "svm_c") c.svm.c = py::cast<double>(value);
        else if (key == "top_tags") c.top_tags = py::cast<std::size_t>(value);
        else if (key == "k_min") c.k_min = py::cast<std::size_t>(value);
        else if (key == "k_max") c.k_max = py::cast<std::size_t>(value);
        else if (key == "lda_iterations") c.topics.lda_iterations = py::cast<std::size_t>(value);
        else if (key == "latent_dim") c.topics.autoencoder.latent_dim = py::cast<std::size_t>(value);
        else if (key == "ae_epochs") c.topics.autoencoder.epochs = py::cast<std::size_t>(value);
        else if (key == "kmeans_restarts") c.topics.kmeans_restarts = py::cast<std::size_t>(value);
        else if (key == "top_words") c.topics.top_n = py::cast<std::size_t>(value);
        else if (key == "overlap_threshold") c.overlap_threshold = py::cast<double>(value);
        else if (key == "encoder_model") c.encoder_model = py::cast<std::string>(value);
        else if (key == "embedding_epochs") c.embedding_epochs = py::cast<std::size_t>(value);
        else if (key == "predictions") c.predictions = py::cast<std::string>(value);
        else throw Error("unknown option '" + key + "'");
    }
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fake-news infodemic analysis core";
    m.attr("__version__") = INFODEMIC_VERSION;
    static py::exception<Error> error(m, "InfodemicError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            error(e.what());
        }
    });

    m.def("normalize_tag", [](const std::string& tag) { return normalize_tag(tag); });
    m.def("extract_tags", [](const std::string& text) {
        const auto t = extract_tags(text);
        py::dict d;
        d["hashtags"] = t.hashtags;
        d["mentions"] = t.mentions;
        return d;
    });
    m.def(
        "eliminate",
        [](const std::string& text, const std::string& mode) { return eliminate(text, parse_elimination(mode)); },
        py::arg("text"), py::arg("mode") = "drop-both");
    m.def(
        "extract_features",
        [](const std::string& text, const std::string& sentiment) {
            return features_dict(extract_features(text, parse_sentiment(sentiment)));
        },
        py::arg("text"), py::arg("sentiment") = "Neutral");
    m.def(
        "classify_sentiment", [](const std::string& text) {
            static const LexiconBackend lexicon = LexiconBackend::builtin();
            return std::string(sentiment_name(lexicon.classify_text(text)));
        },
        "Five-class label from the bundled lexicon");

    m.def(
        "concern_index", [](const std::vector<std::size_t>& counts) { return to_python(to_json(concern_index(distribution(counts)))); },
        py::arg("counts"));
    m.def(
        "concern_significance",
        [](const std::vector<std::size_t>& fake, const std::vector<std::size_t>& real, const std::string& rounding) {
            return to_python(to_json(concern_significance(distribution(fake), distribution(real), parse_rounding(rounding))));
        },
        py::arg("fake"), py::arg("real"), py::arg("rounding") = "full_precision");
    m.def(
        "agreement_ensemble",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b, const std::vector<std::string>& gold) {
            return to_python(to_json(agreement_ensemble(labels(a), labels(b), labels(gold))));
        },
        py::arg("a"), py::arg("b"), py::arg("gold"));

    m.def(
        "make_folds",
        [](const std::vector<std::string>& label_names, std::size_t k, std::uint64_t seed) {
            Corpus c;
            for (std::size_t i = 0; i < label_names.size(); ++i) {
                c.posts.push_back(Post{std::to_string(i), "", parse_label_name(label_names[i]), std::nullopt});
            }
            const auto plan = make_folds(c, k, seed);
            std::vector<std::size_t> fold_of(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) fold_of[i] = plan.fold_of(c.posts[i]);
            return fold_of;
        },
        py::arg("labels"), py::arg("k"), py::arg("seed") = 0, "Fold index per item, stratified by label");
    m.def(
        "inject_features",
        [](const std::vector<int>& ids, const py::dict& f) {
            BehavioralFeatures features;
            features.word_count = py::cast<std::size_t>(f["word_count"]);
            features.char_count = py::cast<std::size_t>(f["char_count"]);
            features.hashtag_count = py::cast<std::size_t>(f["hashtag_count"]);
            features.mention_count = py::cast<std::size_t>(f["mention_count"]);
            features.sentiment_code = py::cast<int>(f["sentiment_code"]);
            return inject_features(TokenSequence{ids}, features).ids;
        },
        py::arg("ids"), py::arg("features"));

    m.def(
        "preprocess",
        [](const std::string& text) { return preprocess_topic_text(text); }, py::arg("text"));
    m.def("stem", [](const std::string& word) { return stem(word); });
    m.def(
        "coherence",
        [](const std::vector<std::vector<std::string>>& top_words, const TokenDocs& docs, std::size_t top_n) {
            const auto r = coherence(top_words, docs, top_n);
            py::dict d;
            d["per_topic"] = r.per_topic;
            d["mean"] = r.mean;
            return d;
        },
        py::arg("top_words"), py::arg("docs"), py::arg("top_n") = 10);
    m.def(
        "kmeans",
        [](const std::vector<std::vector<double>>& points, std::size_t k, std::uint64_t seed) {
            std::vector<Eigen::VectorXd> pts;
            pts.reserve(points.size());
            for (const auto& p : points) pts.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
            const auto model = kmeans(pts, k, seed);
            py::dict d;
            d["assignments"] = model.assignments;
            d["inertia"] = model.inertia;
            d["inertia_trace"] = model.inertia_trace;
            d["converged"] = model.converged;
            std::vector<std::vector<double>> centroids;
            for (const auto& c : model.centroids) centroids.emplace_back(c.data(), c.data() + c.size());
            d["centroids"] = centroids;
            return d;
        },
        py::arg("points"), py::arg("k"), py::arg("seed") = 0);

    m.def(
        "run_command",
        [](const std::string& command, const py::dict& options) {
            const RunConfig config = run_config(options);
            RunManifest manifest;
            {
                py::gil_scoped_release release;
                manifest = run_command(command, config);
            }
            return to_python(to_json(manifest));
        },
        py::arg("command"), py::arg("options"),
        "Runs stats, concern, topics, train-eval or ensemble; returns the manifest");
}
