// SPDX-License-Identifier: Apache-2.0
#include <mango/html_text.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace mango
{

namespace
{

    bool iequalsPrefix(std::string_view text, std::size_t pos, std::string_view prefix)
    {
        if (text.size() - pos < prefix.size())
            return false;
        for (std::size_t i = 0; i < prefix.size(); ++i)
            if (std::tolower(static_cast<unsigned char>(text[pos + i])) != prefix[i])
                return false;
        return true;
    }

    std::size_t findCaseInsensitive(std::string_view text, std::string_view needle, std::size_t from)
    {
        for (auto i = from; i + needle.size() <= text.size(); ++i)
            if (iequalsPrefix(text, i, needle))
                return i;
        return std::string_view::npos;
    }

    void appendUtf8(std::string& out, unsigned long cp)
    {
        if (cp < 0x80)
            out += static_cast<char>(cp);
        else if (cp < 0x800)
        {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        else if (cp < 0x10000)
        {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        else if (cp < 0x110000)
        {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kEntities { {
        { "amp", "&" },
        { "lt", "<" },
        { "gt", ">" },
        { "quot", "\"" },
        { "apos", "'" },
        { "nbsp", " " },
        { "mdash", "\xE2\x80\x94" },
        { "ndash", "\xE2\x80\x93" },
        { "hellip", "\xE2\x80\xA6" },
    } };

    std::string decodeEntities(std::string_view text)
    {
        std::string out;
        out.reserve(text.size());
        for (std::size_t i = 0; i < text.size(); ++i)
        {
            if (text[i] != '&')
            {
                out += text[i];
                continue;
            }
            auto const semi = text.find(';', i);
            if (semi == std::string_view::npos || semi - i > 10)
            {
                out += '&';
                continue;
            }
            auto const name = text.substr(i + 1, semi - i - 1);
            bool decoded = false;
            if (name.size() > 1 && name[0] == '#')
            {
                unsigned long cp = 0;
                bool const hex = name[1] == 'x' || name[1] == 'X';
                auto digits = name.substr(hex ? 2 : 1);
                bool ok = !digits.empty();
                for (char c: digits)
                {
                    auto const uc = static_cast<unsigned char>(c);
                    if (hex && std::isxdigit(uc))
                        cp = cp * 16 + static_cast<unsigned long>(std::isdigit(uc) ? c - '0' : std::tolower(uc) - 'a' + 10);
                    else if (!hex && std::isdigit(uc))
                        cp = cp * 10 + static_cast<unsigned long>(c - '0');
                    else
                        ok = false;
                }
                if (ok)
                {
                    appendUtf8(out, cp);
                    decoded = true;
                }
            }
            else
            {
                for (auto const& [entity, value]: kEntities)
                    if (name == entity)
                    {
                        out += value;
                        decoded = true;
                        break;
                    }
            }
            if (decoded)
                i = semi;
            else
                out += '&';
        }
        return out;
    }

    std::string collapseWhitespace(std::string_view text)
    {
        std::string out;
        out.reserve(text.size());
        bool pendingSpace = false;
        for (char c: text)
        {
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v')
            {
                pendingSpace = !out.empty();
                continue;
            }
            if (pendingSpace)
                out += ' ';
            pendingSpace = false;
            out += c;
        }
        return out;
    }

    // Strips markup; every tag becomes a separator so adjacent blocks don't glue together.
    std::string stripTags(std::string_view html)
    {
        std::string out;
        out.reserve(html.size());
        std::size_t i = 0;
        while (i < html.size())
        {
            if (html[i] != '<')
            {
                out += html[i++];
                continue;
            }
            if (html.compare(i, 4, "<!--") == 0)
            {
                auto const end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                out += ' ';
                continue;
            }
            bool skipped = false;
            for (std::string_view raw: { std::string_view("script"), std::string_view("style"), std::string_view("noscript") })
            {
                if (iequalsPrefix(html, i + 1, raw))
                {
                    auto const after = i + 1 + raw.size();
                    if (after < html.size() && (html[after] == '>' || std::isspace(static_cast<unsigned char>(html[after]))))
                    {
                        auto const close = findCaseInsensitive(html, std::string("</") + std::string(raw), after);
                        if (close == std::string_view::npos)
                            i = html.size();
                        else
                        {
                            auto const gt = html.find('>', close);
                            i = gt == std::string_view::npos ? html.size() : gt + 1;
                        }
                        skipped = true;
                        break;
                    }
                }
            }
            if (skipped)
            {
                out += ' ';
                continue;
            }
            auto const gt = html.find('>', i);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
            out += ' ';
        }
        return out;
    }

    std::string attributeValue(std::string_view tag, std::string_view name)
    {
        std::size_t pos = 0;
        while ((pos = findCaseInsensitive(tag, name, pos)) != std::string_view::npos)
        {
            bool const boundary = pos == 0 || std::isspace(static_cast<unsigned char>(tag[pos - 1]));
            auto j = pos + name.size();
            while (j < tag.size() && std::isspace(static_cast<unsigned char>(tag[j])))
                ++j;
            if (!boundary || j >= tag.size() || tag[j] != '=')
            {
                pos += name.size();
                continue;
            }
            ++j;
            while (j < tag.size() && std::isspace(static_cast<unsigned char>(tag[j])))
                ++j;
            if (j >= tag.size())
                return {};
            if (tag[j] == '"' || tag[j] == '\'')
            {
                auto const quote = tag[j];
                auto const end = tag.find(quote, j + 1);
                return std::string(tag.substr(j + 1, end == std::string_view::npos ? std::string_view::npos : end - j - 1));
            }
            auto end = j;
            while (end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[end])) && tag[end] != '>')
                ++end;
            return std::string(tag.substr(j, end - j));
        }
        return {};
    }

} // namespace

std::string truncate_utf8(std::string_view text, std::size_t maxBytes)
{
    if (text.size() <= maxBytes)
        return std::string(text);
    auto cut = maxBytes;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80)
        --cut;
    return std::string(text.substr(0, cut));
}

std::string html_to_text(std::string_view html, std::size_t maxChars)
{
    return truncate_utf8(collapseWhitespace(decodeEntities(stripTags(html))), maxChars);
}

std::vector<Anchor> extract_anchors(std::string_view html)
{
    std::vector<Anchor> anchors;
    std::size_t pos = 0;
    while ((pos = findCaseInsensitive(html, "<a", pos)) != std::string_view::npos)
    {
        auto const after = pos + 2;
        if (after >= html.size() || !(std::isspace(static_cast<unsigned char>(html[after])) || html[after] == '>'))
        {
            pos = after;
            continue;
        }
        auto const gt = html.find('>', after);
        if (gt == std::string_view::npos)
            break;
        auto href = attributeValue(html.substr(after, gt - after), "href");
        auto const close = findCaseInsensitive(html, "</a", gt + 1);
        auto const inner = html.substr(gt + 1, close == std::string_view::npos ? std::string_view::npos : close - gt - 1);
        if (!href.empty())
            anchors.push_back(Anchor { .text = html_to_text(inner), .href = decodeEntities(href) });
        pos = close == std::string_view::npos ? html.size() : close;
    }
    return anchors;
}

} // namespace mango
