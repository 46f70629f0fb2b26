#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace palm::text {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Decodes UTF-8 into code points. Invalid bytes decode as U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace palm::text
