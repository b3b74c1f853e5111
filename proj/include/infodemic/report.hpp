#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "infodemic/csv.hpp"

namespace infodemic {

inline constexpr int kSchemaVersion = 1;

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Two-space indented JSON with a trailing newline and `schema_version` first.
std::string render_json(nlohmann::json document);

std::string render_csv(const csv::Row& header, const std::vector<csv::Row>& rows);

using BarEntries = std::vector<std::pair<std::string, std::size_t>>;

/// Fixed-width horizontal bar chart, one bar per entry in the given order, each
/// labelled with its count. An empty entry list renders an empty plot.
std::string render_bar_chart_svg(std::string_view title, const BarEntries& entries);

std::string xml_escape(std::string_view text);

}  // namespace infodemic
