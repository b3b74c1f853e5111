// Acceptance suite: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.
// The corpus-statistics criterion needs the DS3 release (CSV with id,tweet,label);
// pass its path as the first argument or in INFODEMIC_DS3.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "infodemic/autoencoder.hpp"
#include "infodemic/corpus.hpp"
#include "infodemic/corpus_stats.hpp"
#include "infodemic/encoder.hpp"
#include "infodemic/encoder_model.hpp"
#include "infodemic/evaluation.hpp"
#include "infodemic/features.hpp"
#include "infodemic/kmeans.hpp"
#include "infodemic/lda.hpp"
#include "infodemic/pipeline.hpp"
#include "infodemic/random.hpp"
#include "infodemic/sentiment.hpp"
#include "infodemic/svm.hpp"
#include "infodemic/text.hpp"
#include "infodemic/topics.hpp"

using namespace infodemic;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass(std::string d) { return {Verdict::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Verdict::Fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(d)}; }

std::string fmt(double v, int precision = 6) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

const SentimentDistribution kFake = SentimentDistribution::from_counts(2512, 247, 240, 503, 578);
const SentimentDistribution kReal = SentimentDistribution::from_counts(1794, 553, 677, 716, 740);

Outcome concern_index_criterion() {
    const auto f = concern_index(kFake).concern_index;
    const auto r = concern_index(kReal).concern_index;
    const bool exact = f == 2759.0 / 3841.0 && r == 2347.0 / 3804.0;
    const bool rounded = std::round(f * 100) == 72 && std::round(r * 100) == 62;
    const bool four = std::abs(f - 0.7183) < 5e-5 && std::abs(r - 0.6170) < 5e-5;
    return check(exact && rounded && four, "fake " + fmt(f) + " real " + fmt(r));
}

Outcome significance_criterion() {
    const auto rounded = concern_significance(kFake, kReal, Rounding::TwoDecimal);
    const auto full = concern_significance(kFake, kReal, Rounding::FullPrecision);
    const double ct = 5106.0 / 7643.0;
    const double oracle_sd = std::sqrt(ct * (1 - ct) / 3840.0 + ct * (1 - ct) / 3803.0);
    const double oracle_z = (2759.0 / 3840.0 - 2347.0 / 3803.0) / oracle_sd;
    const bool ok_rounded = std::round(rounded.z_score * 10) == 93 && rounded.p_value < 1e-5;
    const bool ok_full = full.z_score >= 9.40 && full.z_score <= 9.42 && std::abs(full.z_score - oracle_z) < 1e-9;
    return check(ok_rounded && ok_full, "rounded z " + fmt(rounded.z_score) + " p " + fmt(rounded.p_value, 3) +
                                            ", full z " + fmt(full.z_score) + " (oracle " + fmt(oracle_z) + ")");
}

Outcome injection_criterion() {
    const std::vector<int> before = {101,  2899, 19684, 3559, 12386, 2132,  2039,  2010,  4632,  1001,
                                     2899, 1001, 3312,  17062, 2368, 1001, 2522, 17258, 16147, 102};
    std::vector<int> expected(before.begin(), before.end() - 1);
    for (int id : {31000, 32011, 33082, 34003, 35000, 102}) expected.push_back(id);
    const auto after = inject_features(TokenSequence{before}, BehavioralFeatures{11, 82, 3, 0, 0});
    return check(after.ids == expected, std::to_string(after.ids.size()) + " ids");
}

Outcome normalization_criterion() {
    const bool pairs = normalize_tag("Covid_19") == "covid19" && normalize_tag("CoronaVirusFacts") == "coronavirusfacts" &&
                       normalize_tag("NYCLockdown") == "nyclockdown";
    static const std::u32string alphabet = U"aZ09_#@ \t.,!-éÉßÑ€😀 Łż";
    Rng rng(2024);
    std::size_t broken = 0;
    for (int i = 0; i < 10000; ++i) {
        std::u32string s;
        const std::size_t n = rng.index(25);
        for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[rng.index(alphabet.size())]);
        const auto once = normalize_tag(text::encode_utf8(s));
        broken += normalize_tag(once) != once;
    }
    return check(pairs && broken == 0, "pairs " + std::string(pairs ? "exact" : "wrong") + ", idempotence failures " +
                                           std::to_string(broken) + "/10000");
}

Outcome ensemble_criterion() {
    std::vector<Label> a(8560), b(8560), gold(8560);
    auto flip = [](Label l) { return l == Label::Fake ? Label::Real : Label::Fake; };
    for (std::size_t i = 0; i < gold.size(); ++i) {
        gold[i] = i % 3 ? Label::Real : Label::Fake;
        if (i < 6514) {
            a[i] = b[i] = gold[i];
        } else if (i < 6705) {
            a[i] = b[i] = flip(gold[i]);
        } else {
            a[i] = gold[i];
            b[i] = flip(gold[i]);
        }
    }
    const auto r = agreement_ensemble(a, b, gold);
    const bool ok = r.n_agreed == 6705 && r.n_agreed_correct == 6514 && std::abs(r.agreed_accuracy - 0.9715) < 1e-4 &&
                    std::abs(r.coverage - 0.7833) < 1e-4;
    return check(ok, "agreed_accuracy " + fmt(r.agreed_accuracy) + " coverage " + fmt(r.coverage));
}

Outcome ds3_criterion(const std::string& path) {
    if (path.empty()) return {Verdict::Skip, "DS3 not provided (argument 1 or INFODEMIC_DS3)"};
    CorpusSchema schema;
    schema.text_field = "tweet";
    const Corpus c = load_corpus(path, CorpusFormat::Csv, schema);
    const std::vector<SentimentLabel> neutral(c.size(), SentimentLabel::Neutral);
    const auto s = corpus_stats(c, corpus_features(c, neutral));
    std::vector<std::string> misses;
    auto within = [&](const std::string& name, double got, double want, double rel) {
        const bool ok = want == 0.0 ? got == 0.0 : std::abs(got - want) <= rel * want;
        if (!ok) misses.push_back(name + "=" + fmt(got) + " want " + fmt(want));
    };
    within("fake posts", static_cast<double>(s.fake.posts), 4080, 0.0);
    within("real posts", static_cast<double>(s.real.posts), 4480, 0.0);
    within("fake hashtags", static_cast<double>(s.fake.hashtag_total), 2021, 0.02);
    within("fake unique hashtags", static_cast<double>(s.fake.hashtag_unique), 794, 0.02);
    within("real hashtags", static_cast<double>(s.real.hashtag_total), 4743, 0.02);
    within("real unique hashtags", static_cast<double>(s.real.hashtag_unique), 386, 0.02);
    within("fake mentions", static_cast<double>(s.fake.mention_total), 669, 0.02);
    within("fake unique mentions", static_cast<double>(s.fake.mention_unique), 486, 0.02);
    within("real mentions", static_cast<double>(s.real.mention_total), 2090, 0.02);
    within("real unique mentions", static_cast<double>(s.real.mention_unique), 568, 0.02);
    within("fake words", s.fake.mean_words, 20.7, 0.05);
    within("fake chars", s.fake.mean_chars, 125, 0.05);
    within("real words", s.real.mean_words, 29.89, 0.05);
    within("real chars", s.real.mean_chars, 175, 0.05);
    within("rows with hashtags", static_cast<double>(s.rows_with_hashtags), 648, 0.02);
    within("rows with mentions", static_cast<double>(s.rows_with_mentions), 286, 0.02);
    within("rows with both", static_cast<double>(s.rows_with_both), 0, 0.02);
    if (misses.empty()) return pass("all corpus statistics within tolerance");
    std::string d;
    for (const auto& m : misses) d += (d.empty() ? "" : "; ") + m;
    return fail(d);
}

// Topic t draws from its own ten words w<t>_<j>.
TokenDocs disjoint_corpus(std::size_t topics, std::size_t docs_per_topic, std::size_t tokens, std::uint64_t seed) {
    Rng rng(seed);
    TokenDocs docs;
    for (std::size_t t = 0; t < topics; ++t) {
        for (std::size_t d = 0; d < docs_per_topic; ++d) {
            std::vector<std::string> doc;
            for (std::size_t i = 0; i < tokens; ++i) doc.push_back("w" + std::to_string(t) + "_" + std::to_string(rng.index(10)));
            docs.push_back(std::move(doc));
        }
    }
    return docs;
}

Outcome lda_criterion() {
    const auto docs = disjoint_corpus(3, 20, 40, 7);
    LdaConfig cfg;
    cfg.topics = 3;
    cfg.iterations = 1000;
    cfg.seed = 11;
    std::size_t violations = 0;
    const auto model = train_lda(docs, cfg, [&](const LdaModel& m, std::size_t) {
        std::size_t total = 0;
        for (std::size_t d = 0; d < m.docs.size(); ++d) {
            long sum = 0;
            for (int v : m.doc_topic[d]) {
                violations += v < 0;
                sum += v;
            }
            violations += static_cast<std::size_t>(sum) != m.docs[d].size();
            total += m.docs[d].size();
        }
        long words = 0;
        for (std::size_t k = 0; k < m.topics; ++k) {
            long row = 0;
            for (int v : m.topic_word[k]) row += v;
            violations += row != m.topic_totals[k];
            words += row;
        }
        violations += static_cast<std::size_t>(words) != total;
    });
    double worst = 1.0;
    for (std::size_t k = 0; k < 3; ++k) {
        std::map<std::string, int> source;
        for (const auto& w : model.top_words(k, 10)) ++source[w.substr(0, w.find('_'))];
        int best = 0;
        for (const auto& [_, n] : source) best = std::max(best, n);
        worst = std::min(worst, best / 10.0);
    }
    return check(worst >= 0.8 && violations == 0,
                 "worst topic purity " + fmt(worst) + ", conservation violations " + std::to_string(violations));
}

// Six generators over pseudo-words that survive preprocessing untouched. Every
// document holds each word of its generator once plus twenty uniform extras.
TokenDocs six_topic_corpus(std::uint64_t seed) {
    static const std::vector<std::string> stems = {"zorb", "quil", "vamp", "jurk", "plox", "grav"};
    static const std::string tails = "abcdfghjkm";
    Rng rng(seed);
    TokenDocs docs;
    for (const auto& stem : stems) {
        for (int d = 0; d < 20; ++d) {
            std::vector<std::string> doc;
            for (char c : tails) doc.push_back(stem + c);
            for (int i = 0; i < 20; ++i) doc.push_back(stem + tails[rng.index(tails.size())]);
            rng.shuffle(std::span<std::string>(doc));
            docs.push_back(std::move(doc));
        }
    }
    return docs;
}

Outcome select_k_criterion() {
    std::size_t hits = 0;
    std::string ks;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const auto docs = six_topic_corpus(100 + rep);
        Rng rng(200 + rep);
        std::vector<std::vector<double>> emb;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            emb.push_back({rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)});
        }
        TopicPipelineConfig cfg;
        cfg.lda_iterations = 300;
        cfg.autoencoder.epochs = 100;
        cfg.autoencoder.learning_rate = 0.01;
        const auto best = select_k(docs, emb, 3, 10, cfg, 1000 * rep + 1);
        hits += best.k == 6;
        ks += (ks.empty() ? "" : ",") + std::to_string(best.k);
    }
    return check(hits >= 4, "best k per repetition: " + ks);
}

Outcome gradient_criterion() {
    double worst = 0.0;
    auto track = [&](double numeric, double analytic) {
        const double scale = std::max(std::abs(numeric), std::abs(analytic));
        if (scale > 1e-9) worst = std::max(worst, std::abs(numeric - analytic) / scale);
    };
    constexpr double h = 1e-4;

    EncoderConfig ecfg;
    ecfg.embed_dim = 4;
    ecfg.hidden_dim = 4;
    ecfg.init_range = 0.5;
    auto lstm = EncoderModel::initialize(Vocabulary({{"a", 103}, {"b", 104}}), ecfg, SequenceOptions{}, 5);
    Rng rng(6);
    for (Eigen::Index i = 0; i < lstm.bias.size(); ++i) lstm.bias[i] = rng.uniform(-0.5, 0.5);
    for (Eigen::Index i = 0; i < lstm.b_out.size(); ++i) lstm.b_out[i] = rng.uniform(-0.5, 0.5);
    const std::vector<int> ids = {101, 103, 104, 31004, 102};
    for (Label y : {Label::Fake, Label::Real}) {
        EncoderGradients g;
        g.reset(lstm);
        encoder_loss(lstm, ids, y, &g);
        auto block_check = [&](auto& block, const auto& grad) {
            for (Eigen::Index k = 0; k < block.size(); ++k) {
                const double saved = block.data()[k];
                block.data()[k] = saved + h;
                const double up = encoder_loss(lstm, ids, y);
                block.data()[k] = saved - h;
                const double down = encoder_loss(lstm, ids, y);
                block.data()[k] = saved;
                track((up - down) / (2 * h), grad.data()[k]);
            }
        };
        block_check(lstm.w_input, g.w_input);
        block_check(lstm.w_hidden, g.w_hidden);
        block_check(lstm.bias, g.bias);
        block_check(lstm.w_out, g.w_out);
        block_check(lstm.b_out, g.b_out);
    }
    const double lstm_worst = worst;

    worst = 0.0;
    AutoencoderConfig acfg;
    acfg.latent_dim = 2;
    auto ae = initialize_autoencoder(4, acfg, 8);
    for (Eigen::Index i = 0; i < ae.b_enc.size(); ++i) ae.b_enc[i] = rng.uniform(-0.3, 0.3);
    for (Eigen::Index i = 0; i < ae.b_dec.size(); ++i) ae.b_dec[i] = rng.uniform(-0.3, 0.3);
    Eigen::MatrixXd batch(4, 3);
    for (Eigen::Index i = 0; i < batch.size(); ++i) batch.data()[i] = rng.uniform(-1, 1);
    AutoencoderGradients ag;
    autoencoder_loss(ae, batch, &ag);
    auto ae_check = [&](auto& block, const auto& grad) {
        for (Eigen::Index k = 0; k < block.size(); ++k) {
            const double saved = block.data()[k];
            block.data()[k] = saved + h;
            const double up = autoencoder_loss(ae, batch);
            block.data()[k] = saved - h;
            const double down = autoencoder_loss(ae, batch);
            block.data()[k] = saved;
            track((up - down) / (2 * h), grad.data()[k]);
        }
    };
    ae_check(ae.w_enc, ag.w_enc);
    ae_check(ae.b_enc, ag.b_enc);
    ae_check(ae.w_dec, ag.w_dec);
    ae_check(ae.b_dec, ag.b_dec);
    return check(lstm_worst < 1e-4 && worst < 1e-4,
                 "max relative error lstm " + fmt(lstm_worst, 3) + ", autoencoder " + fmt(worst, 3));
}

Outcome svm_criterion() {
    const std::vector<std::vector<double>> x = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const std::vector<int> y = {1, 1, -1, -1};
    const auto t = train_svm_full(x, y);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) correct += svm_predict(t.model, x[i]) == y[i];
    const auto kkt = check_kkt(t, x, y, 1e-3);
    return check(correct == 4 && kkt.satisfied && std::abs(kkt.dual_residual) < 1e-6,
                 "accuracy " + fmt(correct / 4.0) + ", max KKT violation " + fmt(kkt.max_violation, 3) +
                     ", |sum alpha y| " + fmt(std::abs(kkt.dual_residual), 3));
}

Outcome kmeans_criterion() {
    Rng rng(31);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(Eigen::Vector2d(rng.uniform(), rng.uniform()));
    std::size_t increases = 0;
    for (std::size_t k : {3, 8, 20}) {
        const auto m = kmeans(pts, k, k);
        for (std::size_t i = 1; i < m.inertia_trace.size(); ++i) increases += m.inertia_trace[i] > m.inertia_trace[i - 1];
    }
    std::vector<Eigen::VectorXd> small(pts.begin(), pts.begin() + 40);
    const auto full = kmeans(small, small.size(), 1);
    return check(increases == 0 && full.inertia == 0.0,
                 "trace increases " + std::to_string(increases) + ", k=n inertia " + fmt(full.inertia));
}

std::map<std::string, std::string> json_outputs(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json" || e.path().filename() == "manifest.json") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        files[fs::relative(e.path(), dir).string()] = s.str();
    }
    return files;
}

Outcome determinism_criterion() {
    const fs::path root = fs::temp_directory_path() / ("infodemic_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream out(root / "corpus.csv");
        out << "id,text,label\n";
        for (int i = 0; i < 16; ++i) {
            out << "f" << i << ",\"5G towers spread the virus #5g #hoax @insider" << i % 3 << " garlic cure\",fake\n";
            out << "r" << i << ",\"ministry confirms vaccine trial results #covid19 @WHO clinic" << i % 4 << "\",real\n";
        }
    }
    auto config_for = [&](const std::string& name) {
        RunConfig c;
        c.input = root / "corpus.csv";
        c.out = root / name;
        c.seed = 17;
        c.folds = 2;
        c.sweep = true;
        c.inject = true;
        c.encoder.embed_dim = 8;
        c.encoder.hidden_dim = 8;
        c.encoder.epochs = 3;
        c.topics.lda_iterations = 50;
        c.topics.autoencoder.epochs = 10;
        c.topics.kmeans_restarts = 3;
        c.k_min = 2;
        c.k_max = 4;
        c.embedding_epochs = 1;
        return c;
    };
    std::size_t compared = 0;
    std::string differing;
    for (const std::string command : {"train-eval", "topics"}) {
        run_command(command, config_for(command + "_a"));
        run_command(command, config_for(command + "_b"));
        const auto a = json_outputs(root / (command + "_a"));
        const auto b = json_outputs(root / (command + "_b"));
        if (a.size() != b.size()) differing += command + ": file sets differ; ";
        for (const auto& [name, content] : a) {
            ++compared;
            const auto it = b.find(name);
            if (it == b.end() || it->second != content) differing += command + "/" + name + "; ";
        }
    }
    fs::remove_all(root);
    return check(differing.empty() && compared > 0,
                 differing.empty() ? std::to_string(compared) + " JSON files byte-identical" : "differs: " + differing);
}

Outcome folds_criterion() {
    Rng rng(77);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        // every label needs at least k posts
        const std::size_t k = 2 + rng.index(9);
        const std::size_t n_fake = k + rng.index(120), n_real = k + rng.index(120);
        std::vector<Label> labels(n_fake, Label::Fake);
        labels.insert(labels.end(), n_real, Label::Real);
        rng.shuffle(std::span<Label>(labels));
        Corpus c;
        const std::size_t n = labels.size();
        for (std::size_t i = 0; i < n; ++i) c.posts.push_back(Post{std::to_string(i), "t", labels[i], std::nullopt});
        const auto plan = make_folds(c, k, rng.index(1u << 30));
        std::vector<std::size_t> seen(n, 0);
        std::vector<std::map<Label, std::size_t>> per_fold(k);
        for (std::size_t f = 0; f < k; ++f) {
            for (std::size_t i : plan.test_indices(c, f)) {
                ++seen[i];
                ++per_fold[f][c.posts[i].label];
            }
        }
        bool ok = std::all_of(seen.begin(), seen.end(), [](std::size_t s) { return s == 1; });
        for (Label l : {Label::Fake, Label::Real}) {
            std::size_t lo = n, hi = 0;
            for (auto& f : per_fold) {
                lo = std::min(lo, f[l]);
                hi = std::max(hi, f[l]);
            }
            ok = ok && hi - lo <= 1;
        }
        bad += !ok;
    }
    return check(bad == 0, std::to_string(bad) + " of 1000 corpora violate partition or stratification");
}

}  // namespace

int main(int argc, char** argv) {
    std::string ds3 = argc > 1 ? argv[1] : "";
    if (ds3.empty()) {
        if (const char* env = std::getenv("INFODEMIC_DS3")) ds3 = env;
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"concern index", concern_index_criterion},
        {"significance", significance_criterion},
        {"feature injection", injection_criterion},
        {"hashtag normalization", normalization_criterion},
        {"ensemble arithmetic", ensemble_criterion},
        {"DS3 corpus statistics", [&] { return ds3_criterion(ds3); }},
        {"LDA recovery", lda_criterion},
        {"select_k", select_k_criterion},
        {"gradient checks", gradient_criterion},
        {"SVM", svm_criterion},
        {"k-means", kmeans_criterion},
        {"determinism", determinism_criterion},
        {"fold properties", folds_criterion},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        failures += o.verdict == Verdict::Fail;
        std::cout << tag << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail << " (" << fmt(secs, 3)
                  << "s)" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
