#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace redsynth {

std::string_view trim_ws(std::string_view s);

// Splits on `sep` at nesting depth zero; <>, [], {}, () nest and double-quoted
// runs (with backslash escapes) are opaque.
std::vector<std::string_view> split_top_level(std::string_view s, char sep);

std::string quote(std::string_view s);
// Inverse of quote; nullopt unless the text is one well-formed quoted string.
std::optional<std::string> unquote(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace redsynth
