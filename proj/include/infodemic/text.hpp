#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace text {

/// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD, one per byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

/// ASCII letters plus the Latin-1 and Latin Extended-A/B letter blocks.
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
char32_t to_lower(char32_t cp);

/// Number of maximal runs of non-whitespace code points.
std::size_t word_count(std::string_view s);
/// Number of Unicode scalar values in the raw text, spaces included.
std::size_t char_count(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace text
}  // namespace infodemic
