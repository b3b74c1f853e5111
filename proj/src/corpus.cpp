#include "infodemic/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "infodemic/csv.hpp"
#include "infodemic/random.hpp"
#include "infodemic/text.hpp"

namespace infodemic {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

Label normalize_label(const std::string& raw, const CorpusSchema& schema, std::size_t row) {
    const std::string key = ascii_lower(trim(raw));
    for (const auto& [name, label] : schema.label_map) {
        if (ascii_lower(name) == key) return label;
    }
    throw Error("row " + std::to_string(row) + ": unknown label value '" + raw + "'");
}

struct RawRecord {
    std::optional<std::string> id;
    std::optional<std::string> text;
    std::optional<std::string> label;
    std::optional<std::string> source;
};

Corpus build_corpus(std::vector<RawRecord> records, const CorpusSchema& schema, std::string name) {
    Corpus corpus;
    corpus.name = std::move(name);
    corpus.posts.reserve(records.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& rec = records[i];
        const std::size_t row = i + 1;
        if (!rec.text) throw Error("row " + std::to_string(row) + ": missing text field '" + schema.text_field + "'");
        if (!rec.label) throw Error("row " + std::to_string(row) + ": missing label field '" + schema.label_field + "'");
        Post post;
        post.text = std::move(*rec.text);
        post.label = normalize_label(*rec.label, schema, row);
        post.id = (rec.id && !rec.id->empty()) ? std::move(*rec.id) : std::to_string(i);
        post.source = std::move(rec.source);
        if (!seen.insert(post.id).second) {
            throw Error("row " + std::to_string(row) + ": duplicate id '" + post.id + "'");
        }
        corpus.posts.push_back(std::move(post));
    }
    return corpus;
}

std::vector<RawRecord> read_csv_records(std::istream& in, const CorpusSchema& schema) {
    auto rows = csv::read(in);
    if (rows.empty()) throw Error("csv: header row required");
    const auto& header = rows.front();
    auto column = [&](const std::string& field) -> std::optional<std::size_t> {
        if (field.empty()) return std::nullopt;
        auto it = std::find(header.begin(), header.end(), field);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto text_col = column(schema.text_field);
    const auto label_col = column(schema.label_field);
    if (!text_col) throw Error("csv: no column named '" + schema.text_field + "'");
    if (!label_col) throw Error("csv: no column named '" + schema.label_field + "'");
    const auto id_col = column(schema.id_field);
    const auto source_col = column(schema.source_field);

    std::vector<RawRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto get = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
            if (!col || *col >= row.size()) return std::nullopt;
            return row[*col];
        };
        RawRecord rec{get(id_col), get(text_col), get(label_col), get(source_col)};
        // short rows still carry an (empty) text value
        if (!rec.text && text_col) rec.text = std::string{};
        records.push_back(std::move(rec));
    }
    return records;
}

std::optional<std::string> json_field(const nlohmann::json& obj, const std::string& field) {
    if (field.empty()) return std::nullopt;
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    return it->dump();  // numeric labels and ids
}

std::vector<RawRecord> read_jsonl_records(std::istream& in, const CorpusSchema& schema) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object()) throw Error("jsonl line " + std::to_string(line_no) + ": expected an object");
        records.push_back({json_field(obj, schema.id_field), json_field(obj, schema.text_field),
                           json_field(obj, schema.label_field), json_field(obj, schema.source_field)});
    }
    return records;
}

}  // namespace

std::string_view label_name(Label label) { return label == Label::Fake ? "fake" : "real"; }

Label parse_label_name(std::string_view name) {
    const auto key = ascii_lower(name);
    if (key == "fake") return Label::Fake;
    if (key == "real") return Label::Real;
    throw Error("unknown label '" + std::string(name) + "'");
}

std::size_t Corpus::count(Label label) const {
    return static_cast<std::size_t>(
        std::count_if(posts.begin(), posts.end(), [&](const Post& p) { return p.label == label; }));
}

Corpus Corpus::subset(const std::vector<std::size_t>& indices) const {
    Corpus out;
    out.name = name;
    out.posts.reserve(indices.size());
    for (auto i : indices) out.posts.push_back(posts.at(i));
    return out;
}

CorpusFormat parse_format(std::string_view name) {
    const auto key = ascii_lower(name);
    if (key == "csv") return CorpusFormat::Csv;
    if (key == "jsonl") return CorpusFormat::Jsonl;
    throw Error("unknown corpus format '" + std::string(name) + "'");
}

Corpus parse_corpus(std::istream& in, CorpusFormat format, const CorpusSchema& schema, std::string name) {
    auto records = format == CorpusFormat::Csv ? read_csv_records(in, schema) : read_jsonl_records(in, schema);
    return build_corpus(std::move(records), schema, std::move(name));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, const CorpusSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read corpus file '" + path.string() + "'");
    try {
        return parse_corpus(in, format, schema, path.stem().string());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::size_t FoldPlan::fold_of(const Post& post) const {
    auto it = assignments.find(post.id);
    if (it == assignments.end()) throw Error("fold plan has no assignment for post '" + post.id + "'");
    return it->second;
}

std::vector<std::size_t> FoldPlan::test_indices(const Corpus& corpus, std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (fold_of(corpus.posts[i]) == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(const Corpus& corpus, std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (fold_of(corpus.posts[i]) != fold) out.push_back(i);
    }
    return out;
}

FoldPlan make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error("make_folds: k must be at least 2");
    const std::size_t smallest = std::min(corpus.count(Label::Fake), corpus.count(Label::Real));
    if (k > smallest) {
        throw Error("make_folds: k=" + std::to_string(k) + " exceeds the smallest per-label count " +
                    std::to_string(smallest));
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    Rng rng(seed);
    std::size_t next_fold = 0;
    for (Label label : {Label::Fake, Label::Real}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus.posts[i].label == label) members.push_back(i);
        }
        rng.shuffle(std::span(members));
        for (auto idx : members) {
            plan.assignments[corpus.posts[idx].id] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> train_test_split(const Corpus& corpus,
                                                                             double test_fraction,
                                                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("train_test_split: fraction must be in (0, 1)");
    Rng rng(seed);
    std::vector<std::size_t> train, test;
    for (Label label : {Label::Fake, Label::Real}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (corpus.posts[i].label == label) members.push_back(i);
        }
        rng.shuffle(std::span(members));
        const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * members.size()));
        test.insert(test.end(), members.begin(), members.begin() + n_test);
        train.insert(train.end(), members.begin() + n_test, members.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

void to_json(nlohmann::json& j, const FoldPlan& plan) {
    j = nlohmann::json{{"k", plan.k}, {"seed", plan.seed}, {"assignments", plan.assignments}};
}

void from_json(const nlohmann::json& j, FoldPlan& plan) {
    plan.k = j.at("k").get<std::size_t>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.assignments = j.at("assignments").get<std::map<std::string, std::size_t>>();
    for (const auto& [id, fold] : plan.assignments) {
        if (fold >= plan.k) throw Error("fold plan: post '" + id + "' assigned to fold out of range");
    }
}

}  // namespace infodemic
