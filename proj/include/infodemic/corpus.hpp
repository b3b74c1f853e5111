#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace infodemic {

enum class Label { Fake, Real };

std::string_view label_name(Label label);  // "fake" / "real"
Label parse_label_name(std::string_view name);

struct Post {
    std::string id;
    std::string text;
    Label label = Label::Real;
    std::optional<std::string> source;
};

struct Corpus {
    std::string name;
    std::vector<Post> posts;

    std::size_t size() const { return posts.size(); }
    bool empty() const { return posts.empty(); }
    std::size_t count(Label label) const;
    /// Posts at the given indices, in index order.
    Corpus subset(const std::vector<std::size_t>& indices) const;
};

enum class CorpusFormat { Csv, Jsonl };

CorpusFormat parse_format(std::string_view name);

/// Field names and label vocabulary of an input file.
struct CorpusSchema {
    std::string text_field = "text";
    std::string label_field = "label";
    std::string id_field = "id";  // missing or empty ids become the zero-based row index
    std::string source_field;     // empty: no source column
    /// Keys are matched case-insensitively.
    std::map<std::string, Label> label_map = {
        {"fake", Label::Fake}, {"real", Label::Real}, {"1", Label::Fake}, {"0", Label::Real}};
};

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const CorpusSchema& schema = {});
Corpus parse_corpus(std::istream& in, CorpusFormat format, const CorpusSchema& schema = {},
                    std::string name = "corpus");

/// Stratified k-fold assignment.
struct FoldPlan {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::map<std::string, std::size_t> assignments;  // post id -> fold

    std::vector<std::size_t> test_indices(const Corpus& corpus, std::size_t fold) const;
    std::vector<std::size_t> train_indices(const Corpus& corpus, std::size_t fold) const;
    std::size_t fold_of(const Post& post) const;
};

/// Within each label the posts are shuffled with a seeded generator and dealt
/// round-robin; the deal for Real continues where Fake stopped so fold sizes
/// differ by at most one overall as well as per label.
FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed);

/// Stratified hold-out split (the 80/20 protocol). Returns (train, test) indices.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(
    const Corpus& corpus, double test_fraction, std::uint64_t seed);

void to_json(nlohmann::json& j, const FoldPlan& plan);
void from_json(const nlohmann::json& j, FoldPlan& plan);

}  // namespace infodemic
