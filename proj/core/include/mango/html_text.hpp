// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mango
{

inline constexpr std::size_t kMaxExtractedChars = 50'000;

/// HTML -> plain text: script/style/noscript bodies and comments dropped, tags
/// removed, common entities decoded, whitespace collapsed, truncated to
/// `maxChars` bytes on a UTF-8 boundary.
std::string html_to_text(std::string_view html, std::size_t maxChars = kMaxExtractedChars);

struct Anchor
{
    std::string text;
    std::string href;
};

/// <a href> targets in document order, with their visible text.
std::vector<Anchor> extract_anchors(std::string_view html);

/// Cuts `text` to at most `maxBytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view text, std::size_t maxBytes);

} // namespace mango
