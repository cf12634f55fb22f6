// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace mango
{

/// An absolute http(s) URL in canonical form. Only produced by canonicalize_url,
/// so holding one means the string is already normalized.
class CanonicalUrl
{
  public:
    CanonicalUrl() = default;

    /// Canonicalizes an absolute URL string. Throws InvalidUrl.
    static CanonicalUrl parse(std::string_view absolute);

    [[nodiscard]] const std::string& str() const noexcept { return _value; }
    [[nodiscard]] bool empty() const noexcept { return _value.empty(); }

    [[nodiscard]] std::string_view scheme() const;
    [[nodiscard]] std::string_view host() const;
    /// Path component; empty for the site root.
    [[nodiscard]] std::string_view path() const;
    [[nodiscard]] std::optional<std::string_view> query() const;

    auto operator<=>(const CanonicalUrl&) const = default;
    bool operator==(const CanonicalUrl&) const = default;

  private:
    friend CanonicalUrl canonicalize_url(std::string_view, const CanonicalUrl&);
    friend CanonicalUrl canonicalize_absolute(std::string_view);

    explicit CanonicalUrl(std::string value): _value(std::move(value)) {}

    std::string _value;
};

/// Resolves `raw` against `base` (RFC 3986 reference resolution) and normalizes:
/// lowercase scheme/host, no fragment, no default port, no userinfo, dot
/// segments removed, a bare "/" path collapsed to empty, query preserved.
/// Throws InvalidUrl when the result is not http(s) or has no host.
CanonicalUrl canonicalize_url(std::string_view raw, const CanonicalUrl& base);

/// Same as canonicalize_url but `raw` must already be absolute.
CanonicalUrl canonicalize_absolute(std::string_view raw);

/// Registrable domain ("eTLD+1") of a host, e.g. docs.python.org -> python.org,
/// www.bbc.co.uk -> bbc.co.uk. IP literals and single-label hosts map to themselves.
std::string registrable_domain(std::string_view host);

} // namespace mango

template <>
struct std::hash<mango::CanonicalUrl>
{
    std::size_t operator()(const mango::CanonicalUrl& url) const noexcept
    {
        return std::hash<std::string> {}(url.str());
    }
};
