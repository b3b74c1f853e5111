#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "infodemic/pipeline.hpp"
#include "infodemic/report.hpp"
#include "infodemic/text.hpp"

using namespace infodemic;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh directory under the system temp root, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("infodemic_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// Topic-separable fake/real posts with tags on both sides and varied wording.
std::string small_corpus_csv(std::size_t per_class) {
    static const std::vector<std::string> fake_words = {"garlic", "cures", "miracle", "remedy", "overnight",
                                                        "toxic", "towers", "secret", "banned", "doctor"};
    static const std::vector<std::string> real_words = {"ministry", "reports", "cases", "testing", "hospital",
                                                        "clinic", "vaccine", "trial", "results", "district"};
    auto pick = [](const std::vector<std::string>& pool, std::size_t i) {
        std::string t;
        for (std::size_t k = 0; k < 4; ++k) t += pool[(i * 7 + k * 3 + i / 3) % pool.size()] + " ";
        return t;
    };
    std::string s = "id,text,label\n";
    for (std::size_t i = 0; i < per_class; ++i) {
        s += "f" + std::to_string(i) + ",\"" + pick(fake_words, i) + "#hoax #cure" + std::to_string(i % 3) +
             " @truther\",fake\n";
        s += "r" + std::to_string(i) + ",\"" + pick(real_words, i) + "#covid19 @WHO update\",real\n";
    }
    return s;
}

RunConfig quick_config(const fs::path& input, const fs::path& out) {
    RunConfig c;
    c.input = input;
    c.out = out;
    c.seed = 3;
    c.folds = 2;
    c.encoder.embed_dim = 8;
    c.encoder.hidden_dim = 8;
    c.encoder.epochs = 3;
    c.encoder.learning_rate = 0.05;
    c.topics.lda_iterations = 30;
    c.topics.autoencoder.epochs = 5;
    c.topics.kmeans_restarts = 2;
    c.k_min = 2;
    c.k_max = 3;
    c.embedding_epochs = 1;
    return c;
}

struct CliResult {
    int status = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const char* cli = std::getenv("INFODEMIC_CLI");
    REQUIRE_MESSAGE(cli != nullptr, "INFODEMIC_CLI is not set");
    const std::string cmd = std::string("\"") + cli + "\" " + args + " 2>&1";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 512> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

TEST_CASE("render_json puts schema_version first") {
    const auto s = render_json(json{{"a", 1}, {"b", {1, 2}}});
    CHECK(s.rfind("{\n  \"schema_version\": 1,", 0) == 0);
    CHECK(s.back() == '\n');
    CHECK(json::parse(s)["b"][1] == 2);
}

TEST_CASE("render_csv quotes fields that need it") {
    CHECK(render_csv({"a", "b"}, {{"x,y", "q\"t"}}) == "a,b\n\"x,y\",\"q\"\"t\"\n");
}

TEST_CASE("bar chart svg is deterministic and handles empty input") {
    const BarEntries entries{{"covid19", 12}, {"<hoax>", 3}};
    const auto a = render_bar_chart_svg("Top & tags", entries);
    CHECK(a == render_bar_chart_svg("Top & tags", entries));
    CHECK(a.find("<svg") != std::string::npos);
    CHECK(a.find("&lt;hoax&gt;") != std::string::npos);
    CHECK(a.find("Top &amp; tags") != std::string::npos);
    CHECK(a.find(">12<") != std::string::npos);
    const auto empty = render_bar_chart_svg("nothing", {});
    CHECK(empty.find("no data") != std::string::npos);
    CHECK(xml_escape("a\"b'c") == "a&quot;b&apos;c");
}

TEST_CASE("atomic write replaces content and leaves no temporary") {
    TempDir dir("atomic");
    const auto p = dir.path / "f.txt";
    write_file_atomic(p, "one");
    write_file_atomic(p, "two");
    CHECK(slurp(p) == "two");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
    CHECK(files == 1);  // no leftover temporary
    write_file_atomic(dir.path / "nested" / "g.txt", "x");
    CHECK(slurp(dir.path / "nested" / "g.txt") == "x");
    CHECK_THROWS_AS(write_file_atomic(p / "under_a_file.txt", "x"), Error);
}

TEST_CASE("stats command writes tables, charts and a manifest") {
    TempDir dir("stats");
    spit(dir.path / "c.csv", small_corpus_csv(6));
    const auto m = cmd_stats(quick_config(dir.path / "c.csv", dir.path / "out"));
    const auto stats = read_json(dir.path / "out" / "stats.json");
    CHECK(stats["schema_version"] == 1);
    for (const auto& f : m.outputs) CHECK(fs::exists(dir.path / "out" / f));
    CHECK(fs::exists(dir.path / "out" / "manifest.json"));
    const auto manifest = read_json(dir.path / "out" / "manifest.json");
    CHECK(manifest["command"] == "stats");
    CHECK(manifest["outputs"].size() == m.outputs.size());
    const auto table = slurp(dir.path / "out" / "hashtags_fake_top30.csv");
    CHECK(table.rfind("tag,count\n", 0) == 0);
    CHECK(table.find("hoax,6") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "hashtags_real_exclusive_top30.svg"));
}

TEST_CASE("stats on a header-only corpus succeeds with zero counts") {
    TempDir dir("stats_empty");
    spit(dir.path / "c.csv", "id,text,label\n");
    cmd_stats(quick_config(dir.path / "c.csv", dir.path / "out"));
    CHECK(fs::exists(dir.path / "out" / "stats.json"));
    const auto svg = slurp(dir.path / "out" / "hashtags_fake_top30.svg");
    CHECK(svg.find("no data") != std::string::npos);
}

TEST_CASE("stats tables are capped at the top-tag count") {
    TempDir dir("stats_cap");
    std::string s = "id,text,label\n";
    for (int i = 0; i < 50; ++i) s += std::to_string(i) + ",#t" + std::to_string(i) + ",fake\n";
    spit(dir.path / "c.csv", s);
    cmd_stats(quick_config(dir.path / "c.csv", dir.path / "out"));
    const auto table = slurp(dir.path / "out" / "hashtags_fake_top30.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 31);
}

TEST_CASE("concern command with external labels on the reference counts") {
    TempDir dir("concern");
    const std::array<std::size_t, 5> fake{2512, 247, 240, 503, 578}, real{1794, 553, 677, 716, 740};
    const std::array<const char*, 5> names{"Very Negative", "Negative", "Neutral", "Positive", "Very Positive"};
    std::string corpus = "id,text,label\n", labels = "id,label\n";
    std::size_t id = 0;
    for (auto [counts, label] : {std::pair{fake, "fake"}, std::pair{real, "real"}}) {
        for (std::size_t s = 0; s < 5; ++s) {
            for (std::size_t i = 0; i < counts[s]; ++i, ++id) {
                corpus += std::to_string(id) + ",post," + label + "\n";
                labels += std::to_string(id) + "," + names[s] + "\n";
            }
        }
    }
    spit(dir.path / "c.csv", corpus);
    spit(dir.path / "l.csv", labels);
    auto cfg = quick_config(dir.path / "c.csv", dir.path / "out");
    cfg.sentiment = SentimentSource::External;
    cfg.sentiment_labels = dir.path / "l.csv";
    cmd_concern(cfg);
    const auto doc = read_json(dir.path / "out" / "concern.json");
    CHECK(doc["fake"]["concern"]["concern_index"].get<double>() == doctest::Approx(0.7183).epsilon(1e-4));
    CHECK(doc["real"]["concern"]["concern_index"].get<double>() == doctest::Approx(0.6170).epsilon(1e-4));
    const double z = doc["significance"]["two_decimal"]["z"].get<double>();
    CHECK(std::round(z * 10) / 10 == doctest::Approx(9.3));
    CHECK(doc["significance"]["two_decimal"]["p"].get<double>() < 1e-5);
    CHECK(fs::exists(dir.path / "out" / "sentiment_distribution.csv"));

    spit(dir.path / "l.csv", "id,label\n0,Neutral\n");
    CHECK_THROWS_WITH_AS(cmd_concern(cfg), doctest::Contains("1"), Error);
}

TEST_CASE("concern on identical class distributions gives z = 0") {
    TempDir dir("concern_same");
    std::string corpus = "id,text,label\n", labels = "id,label\n";
    for (int i = 0; i < 8; ++i) {
        corpus += std::to_string(i) + ",x," + (i % 2 ? "fake" : "real") + "\n";
        labels += std::to_string(i) + "," + (i / 2 % 2 ? "Negative" : "Positive") + "\n";
    }
    spit(dir.path / "c.csv", corpus);
    spit(dir.path / "l.csv", labels);
    auto cfg = quick_config(dir.path / "c.csv", dir.path / "out");
    cfg.sentiment = SentimentSource::External;
    cfg.sentiment_labels = dir.path / "l.csv";
    cmd_concern(cfg);
    const auto doc = read_json(dir.path / "out" / "concern.json");
    CHECK(doc["significance"]["full_precision"]["z"].get<double>() == 0.0);
    CHECK(doc["significance"]["full_precision"]["p"].get<double>() == 1.0);
}

TEST_CASE("topics command on one class skips the similarity matrix") {
    TempDir dir("topics_single");
    std::string s = "id,text,label\n";
    const std::vector<std::string> words = {"garlic", "remedy", "virus", "masks", "protect", "droplets", "towers", "signal"};
    for (std::size_t i = 0; i < 16; ++i) {
        s += std::to_string(i) + "," + words[i % 8] + " " + words[(i * 3 + 1) % 8] + " " + words[(i * 5 + 2) % 8] + ",fake\n";
    }
    spit(dir.path / "c.csv", s);
    cmd_topics(quick_config(dir.path / "c.csv", dir.path / "out"));
    CHECK(fs::exists(dir.path / "out" / "topics_fake.json"));
    CHECK_FALSE(fs::exists(dir.path / "out" / "topics_real.json"));
    CHECK_FALSE(fs::exists(dir.path / "out" / "similarity.json"));
    const auto report = read_json(dir.path / "out" / "topics_fake.json");
    CHECK(report["k_table"].size() == 2);
    CHECK(report["clusters"].size() == report["k"].get<std::size_t>());
}

TEST_CASE("topics command reports k beyond the distinct documents") {
    TempDir dir("topics_degenerate");
    std::string s = "id,text,label\n";
    for (int i = 0; i < 12; ++i) s += std::to_string(i) + ",garlic remedy cures virus,fake\n";
    spit(dir.path / "c.csv", s);
    CHECK_THROWS_WITH_AS(cmd_topics(quick_config(dir.path / "c.csv", dir.path / "out")),
                         doctest::Contains("k = 2: kmeans"), Error);
}

TEST_CASE("topics command on both classes writes the similarity matrix") {
    TempDir dir("topics_both");
    spit(dir.path / "c.csv", small_corpus_csv(10));
    cmd_topics(quick_config(dir.path / "c.csv", dir.path / "out"));
    const auto sim = read_json(dir.path / "out" / "similarity.json");
    const auto fake = read_json(dir.path / "out" / "topics_fake.json");
    const auto real = read_json(dir.path / "out" / "topics_real.json");
    CHECK(sim["similarity"].size() == fake["clusters"].size());
    CHECK(sim["similarity"][0].size() == real["clusters"].size());
    CHECK(fs::exists(dir.path / "out" / "topics_fake_cluster0.csv"));
}

TEST_CASE("train-eval sweep covers all elimination modes") {
    TempDir dir("train_eval");
    spit(dir.path / "c.csv", small_corpus_csv(10));
    auto cfg = quick_config(dir.path / "c.csv", dir.path / "out");
    cfg.sweep = true;
    cfg.inject = true;
    cmd_train_eval(cfg);
    const auto sweep = slurp(dir.path / "out" / "sweep.csv");
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 5);
    const auto eval = read_json(dir.path / "out" / "eval.json");
    CHECK(eval["runs"].size() == 4);
    CHECK(fs::exists(dir.path / "out" / "folds.json"));
    CHECK(fs::exists(dir.path / "out" / "models" / "encoder_none_fold0.bin"));
    CHECK(fs::exists(dir.path / "out" / "models" / "svm_drop-both_fold1.json"));
    CHECK(fs::exists(dir.path / "out" / "predictions_drop-hashtags.csv"));
    for (const auto& run : eval["runs"]) {
        const double svm = run["svm"]["mean_accuracy"].get<double>();
        CHECK(svm >= 0.0);
        CHECK(svm <= 1.0);
    }
}

TEST_CASE("train-eval with a hold-out split") {
    TempDir dir("split");
    spit(dir.path / "c.csv", small_corpus_csv(10));
    auto cfg = quick_config(dir.path / "c.csv", dir.path / "out");
    cfg.test_fraction = 0.2;
    cmd_train_eval(cfg);
    CHECK(fs::exists(dir.path / "out" / "split.json"));
    CHECK_FALSE(fs::exists(dir.path / "out" / "folds.json"));
    const auto eval = read_json(dir.path / "out" / "eval.json");
    CHECK(eval["runs"][0]["svm"]["mean_accuracy"].get<double>() == 1.0);
}

TEST_CASE("ensemble command") {
    TempDir dir("ensemble");
    spit(dir.path / "p.csv", "id,gold,lstm,svm\n1,fake,fake,fake\n2,real,real,real\n3,fake,real,fake\n4,real,fake,fake\n");
    auto cfg = quick_config("", dir.path / "out");
    cfg.predictions = dir.path / "p.csv";
    cmd_ensemble(cfg);
    const auto doc = read_json(dir.path / "out" / "ensemble.json");
    CHECK(doc["classifiers"] == json{"lstm", "svm"});
    spit(dir.path / "p.csv", "id,gold,a\n");
    CHECK_THROWS_AS(cmd_ensemble(cfg), Error);
    CHECK_THROWS_AS(run_command("bogus", cfg), Error);
}

TEST_CASE("validation names the offending field") {
    RunConfig c;
    CHECK_THROWS_WITH_AS(validate(c, "stats"), doctest::Contains("input"), Error);
    c.input = "/nonexistent.csv";
    CHECK_THROWS_AS(validate(c, "stats"), Error);
}

TEST_CASE("cli exit codes and messages") {
    TempDir dir("cli");
    spit(dir.path / "c.csv", small_corpus_csv(4));
    const auto ok = run_cli("stats --input " + (dir.path / "c.csv").string() + " --out " + (dir.path / "o").string());
    CHECK(ok.status == 0);
    CHECK(fs::exists(dir.path / "o" / "stats.json"));

    const auto missing = run_cli("stats --input " + (dir.path / "nope.csv").string() + " --out " + (dir.path / "o2").string());
    CHECK(missing.status == 1);
    CHECK(missing.output.rfind("error: stats: ", 0) == 0);
    CHECK(std::count(missing.output.begin(), missing.output.end(), '\n') == 1);

    CHECK(run_cli("").status != 0);
    CHECK(run_cli("stats --elimination bogus").status != 0);
    CHECK(run_cli("--version").output.find('.') != std::string::npos);
}

TEST_CASE("cli config file with command-line override") {
    TempDir dir("cli_config");
    spit(dir.path / "c.csv", small_corpus_csv(4));
    spit(dir.path / "run.toml", "input = \"" + (dir.path / "c.csv").string() + "\"\nout = \"" +
                                    (dir.path / "from_config").string() + "\"\ntop-tags = 1\n");
    auto r = run_cli("stats --config " + (dir.path / "run.toml").string());
    CHECK(r.status == 0);
    const auto table = slurp(dir.path / "from_config" / "hashtags_fake_top1.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);
    r = run_cli("stats --config " + (dir.path / "run.toml").string() + " --out " + (dir.path / "flag").string());
    CHECK(r.status == 0);
    CHECK(fs::exists(dir.path / "flag" / "stats.json"));
    const auto manifest = read_json(dir.path / "flag" / "manifest.json");
    CHECK(manifest["config"]["top_tags"] == 1);
}
