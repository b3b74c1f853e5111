#include "infodemic/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "infodemic/text.hpp"

namespace infodemic {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string render_json(nlohmann::json document) {
    nlohmann::ordered_json out;
    out["schema_version"] = kSchemaVersion;
    for (auto& [key, value] : document.items()) {
        if (key != "schema_version") out[key] = value;
    }
    return out.dump(2) + "\n";
}

std::string render_csv(const csv::Row& header, const std::vector<csv::Row>& rows) {
    std::string out = csv::format_row(header);
    for (const auto& row : rows) out += csv::format_row(row);
    return out;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string render_bar_chart_svg(std::string_view title, const BarEntries& entries) {
    constexpr int kWidth = 800, kLabelWidth = 200, kBarArea = 500, kRow = 22, kBar = 16, kTop = 50, kBottom = 40;
    const int rows = static_cast<int>(entries.size());
    const int height = kTop + std::max(rows, 1) * kRow + kBottom;
    std::size_t max_count = 0;
    for (const auto& [_, c] : entries) max_count = std::max(max_count, c);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
        << "</text>\n";
    const int axis_bottom = kTop + std::max(rows, 1) * kRow;
    svg << "<line x1=\"" << kLabelWidth << "\" y1=\"" << kTop - 4 << "\" x2=\"" << kLabelWidth << "\" y2=\""
        << axis_bottom << "\" stroke=\"#000000\"/>\n";
    if (entries.empty()) {
        svg << "<text x=\"" << kLabelWidth + 10 << "\" y=\"" << kTop + 15 << "\">no data</text>\n";
    }
    for (int i = 0; i < rows; ++i) {
        const auto& [label, count] = entries[static_cast<std::size_t>(i)];
        const int y = kTop + i * kRow;
        const auto width = static_cast<long long>(max_count == 0 ? 0 : count * kBarArea / max_count);
        svg << "<text x=\"" << kLabelWidth - 6 << "\" y=\"" << y + 13 << "\" text-anchor=\"end\">" << xml_escape(label)
            << "</text>\n";
        svg << "<rect x=\"" << kLabelWidth << "\" y=\"" << y << "\" width=\"" << width << "\" height=\"" << kBar
            << "\" fill=\"#4878a8\"/>\n";
        svg << "<text x=\"" << kLabelWidth + width + 4 << "\" y=\"" << y + 13 << "\">" << count << "</text>\n";
    }
    svg << "<text x=\"" << kLabelWidth + kBarArea / 2 << "\" y=\"" << axis_bottom + 26
        << "\" text-anchor=\"middle\">count (max " << max_count << ")</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace infodemic
