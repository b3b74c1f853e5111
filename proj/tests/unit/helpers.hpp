#pragma once

#include <string>
#include <utility>
#include <vector>

#include "infodemic/corpus.hpp"

namespace testing {

inline infodemic::Corpus make_corpus(const std::vector<std::pair<std::string, infodemic::Label>>& rows) {
    infodemic::Corpus c;
    c.name = "test";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.posts.push_back({std::to_string(i), rows[i].first, rows[i].second, std::nullopt});
    }
    return c;
}

}  // namespace testing
