// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/url.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <vector>

namespace mango
{

namespace
{

    // RFC 3986 appendix B split. Components absent from the reference stay nullopt.
    struct UriRef
    {
        std::optional<std::string> scheme;
        std::optional<std::string> authority;
        std::string path;
        std::optional<std::string> query;
    };

    bool isSchemeChar(char c, bool first)
    {
        auto const uc = static_cast<unsigned char>(c);
        if (std::isalpha(uc))
            return true;
        return !first && (std::isdigit(uc) || c == '+' || c == '-' || c == '.');
    }

    UriRef splitReference(std::string_view ref)
    {
        UriRef out;

        if (auto hash = ref.find('#'); hash != std::string_view::npos)
            ref = ref.substr(0, hash);

        // scheme: only if a ':' appears before any of "/?#" and the prefix is a valid scheme
        auto const colon = ref.find(':');
        auto const delim = ref.find_first_of("/?");
        if (colon != std::string_view::npos && colon > 0 && (delim == std::string_view::npos || colon < delim))
        {
            auto const candidate = ref.substr(0, colon);
            bool valid = true;
            for (std::size_t i = 0; i < candidate.size(); ++i)
                valid = valid && isSchemeChar(candidate[i], i == 0);
            if (valid)
            {
                out.scheme = std::string(candidate);
                ref.remove_prefix(colon + 1);
            }
        }

        if (ref.starts_with("//"))
        {
            ref.remove_prefix(2);
            auto const end = ref.find_first_of("/?");
            out.authority = std::string(ref.substr(0, end));
            ref = end == std::string_view::npos ? std::string_view {} : ref.substr(end);
        }

        if (auto q = ref.find('?'); q != std::string_view::npos)
        {
            out.query = std::string(ref.substr(q + 1));
            ref = ref.substr(0, q);
        }
        out.path = std::string(ref);
        return out;
    }

    std::string removeDotSegments(std::string_view input)
    {
        std::string in(input);
        std::string out;
        while (!in.empty())
        {
            if (in.starts_with("../"))
                in.erase(0, 3);
            else if (in.starts_with("./"))
                in.erase(0, 2);
            else if (in.starts_with("/./"))
                in.erase(0, 2);
            else if (in == "/.")
                in = "/";
            else if (in.starts_with("/../") || in == "/..")
            {
                in = in.size() == 3 ? std::string("/") : in.substr(3);
                auto const slash = out.rfind('/');
                out.erase(slash == std::string::npos ? 0 : slash);
            }
            else if (in == "." || in == "..")
                in.clear();
            else
            {
                auto const next = in.find('/', in.front() == '/' ? 1 : 0);
                out += in.substr(0, next);
                in.erase(0, next == std::string::npos ? in.size() : next);
            }
        }
        return out;
    }

    std::string mergePaths(const UriRef& base, std::string_view refPath)
    {
        if (base.authority && base.path.empty())
            return "/" + std::string(refPath);
        auto const slash = base.path.rfind('/');
        if (slash == std::string::npos)
            return std::string(refPath);
        return base.path.substr(0, slash + 1) + std::string(refPath);
    }

    std::string toLower(std::string_view s)
    {
        std::string out(s);
        std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    UriRef resolve(const UriRef& base, const UriRef& ref)
    {
        UriRef target;
        if (ref.scheme)
        {
            target.scheme = ref.scheme;
            target.authority = ref.authority;
            target.path = removeDotSegments(ref.path);
            target.query = ref.query;
            return target;
        }
        target.scheme = base.scheme;
        if (ref.authority)
        {
            target.authority = ref.authority;
            target.path = removeDotSegments(ref.path);
            target.query = ref.query;
            return target;
        }
        target.authority = base.authority;
        if (ref.path.empty())
        {
            target.path = base.path;
            target.query = ref.query ? ref.query : base.query;
            return target;
        }
        target.path = ref.path.front() == '/' ? removeDotSegments(ref.path) : removeDotSegments(mergePaths(base, ref.path));
        target.query = ref.query;
        return target;
    }

    std::string render(const UriRef& uri, std::string_view original)
    {
        if (!uri.scheme)
            throw InvalidUrl("not an absolute URL: " + std::string(original));
        auto const scheme = toLower(*uri.scheme);
        if (scheme != "http" && scheme != "https")
            throw InvalidUrl("unsupported scheme '" + scheme + "': " + std::string(original));
        if (!uri.authority)
            throw InvalidUrl("missing host: " + std::string(original));

        std::string_view authority = *uri.authority;
        if (auto at = authority.rfind('@'); at != std::string_view::npos)
            authority.remove_prefix(at + 1);

        std::string_view hostPart = authority;
        std::string_view port;
        if (authority.starts_with('['))
        {
            auto const close = authority.find(']');
            if (close == std::string_view::npos)
                throw InvalidUrl("malformed IPv6 host: " + std::string(original));
            hostPart = authority.substr(0, close + 1);
            auto rest = authority.substr(close + 1);
            if (rest.starts_with(':'))
                port = rest.substr(1);
            else if (!rest.empty())
                throw InvalidUrl("malformed authority: " + std::string(original));
        }
        else if (auto c = authority.rfind(':'); c != std::string_view::npos)
        {
            hostPart = authority.substr(0, c);
            port = authority.substr(c + 1);
        }

        auto host = toLower(hostPart);
        while (!host.empty() && host.back() == '.')
            host.pop_back();
        if (host.empty())
            throw InvalidUrl("missing host: " + std::string(original));
        if (!std::ranges::all_of(port, [](unsigned char c) { return std::isdigit(c) != 0; }))
            throw InvalidUrl("invalid port: " + std::string(original));
        while (port.size() > 1 && port.front() == '0')
            port.remove_prefix(1);

        std::string out = scheme + "://" + host;
        bool const defaultPort = port.empty() || (scheme == "http" && port == "80") || (scheme == "https" && port == "443");
        if (!defaultPort)
            out += ":" + std::string(port);
        if (uri.path != "/")
            out += uri.path;
        if (uri.query && !uri.query->empty())
            out += "?" + *uri.query;
        return out;
    }

    std::string_view trimmed(std::string_view s)
    {
        auto const isSpace = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; };
        while (!s.empty() && isSpace(s.front()))
            s.remove_prefix(1);
        while (!s.empty() && isSpace(s.back()))
            s.remove_suffix(1);
        return s;
    }

    // Multi-label public suffixes that matter for the sites we crawl. Anything not
    // listed falls back to "last label is the suffix".
    constexpr std::array kMultiLabelSuffixes {
        "co.uk",  "org.uk", "ac.uk",  "gov.uk", "ltd.uk", "plc.uk", "me.uk",  "net.uk", "sch.uk",
        "com.au", "net.au", "org.au", "edu.au", "gov.au", "asn.au", "id.au",  "co.nz",  "org.nz",
        "net.nz", "ac.nz",  "govt.nz", "co.jp", "ne.jp",  "or.jp",  "ac.jp",  "go.jp",  "co.kr",
        "or.kr",  "ac.kr",  "com.cn", "net.cn", "org.cn", "edu.cn", "gov.cn", "ac.cn",  "com.br",
        "net.br", "org.br", "gov.br", "edu.br", "co.in",  "net.in", "org.in", "ac.in",  "edu.in",
        "gov.in", "co.za",  "org.za", "ac.za",  "gov.za", "com.mx", "org.mx", "edu.mx", "gob.mx",
        "com.ar", "org.ar", "com.tr", "org.tr", "edu.tr", "gov.tr", "com.tw", "org.tw", "edu.tw",
        "com.hk", "org.hk", "edu.hk", "com.sg", "edu.sg", "gov.sg", "co.il",  "ac.il",  "org.il",
        "co.id",  "ac.id",  "or.id",  "com.my", "edu.my", "com.ph", "edu.ph", "co.th",  "ac.th",
        "com.vn", "edu.vn", "com.pk", "edu.pk", "com.ng", "edu.ng", "co.ke",  "ac.ke",  "com.eg",
        "edu.eg", "com.sa", "edu.sa", "com.ua", "org.ua", "edu.ua", "co.at",  "or.at",  "ac.at",
        "com.pl", "org.pl", "edu.pl", "github.io", "gitlab.io", "herokuapp.com", "appspot.com",
        "blogspot.com", "netlify.app", "vercel.app", "pages.dev", "readthedocs.io", "azurewebsites.net",
        "cloudfront.net", "s3.amazonaws.com",
    };

    bool isIpLiteral(std::string_view host)
    {
        if (host.starts_with('['))
            return true;
        return !host.empty() && std::ranges::all_of(host, [](unsigned char c) { return std::isdigit(c) || c == '.'; });
    }

} // namespace

CanonicalUrl canonicalize_url(std::string_view raw, const CanonicalUrl& base)
{
    auto const text = trimmed(raw);
    auto ref = splitReference(text);
    if (base.empty())
    {
        ref.path = removeDotSegments(ref.path);
        return CanonicalUrl(render(ref, text));
    }
    return CanonicalUrl(render(resolve(splitReference(base.str()), ref), text));
}

CanonicalUrl canonicalize_absolute(std::string_view raw)
{
    auto const text = trimmed(raw);
    auto ref = splitReference(text);
    ref.path = removeDotSegments(ref.path);
    return CanonicalUrl(render(ref, text));
}

CanonicalUrl CanonicalUrl::parse(std::string_view absolute)
{
    return canonicalize_absolute(absolute);
}

std::string_view CanonicalUrl::scheme() const
{
    std::string_view v = _value;
    return v.substr(0, v.find(':'));
}

std::string_view CanonicalUrl::host() const
{
    std::string_view v = _value;
    auto const start = v.find("://");
    if (start == std::string_view::npos)
        return {};
    v.remove_prefix(start + 3);
    auto end = v.find_first_of("/?");
    auto authority = v.substr(0, end);
    if (authority.starts_with('['))
        return authority.substr(0, authority.find(']') + 1);
    return authority.substr(0, authority.find(':'));
}

std::string_view CanonicalUrl::path() const
{
    std::string_view v = _value;
    auto const start = v.find("://");
    if (start == std::string_view::npos)
        return {};
    v.remove_prefix(start + 3);
    auto const slash = v.find_first_of("/?");
    if (slash == std::string_view::npos || v[slash] == '?')
        return {};
    v.remove_prefix(slash);
    return v.substr(0, v.find('?'));
}

std::optional<std::string_view> CanonicalUrl::query() const
{
    std::string_view v = _value;
    auto const q = v.find('?');
    if (q == std::string_view::npos)
        return std::nullopt;
    return v.substr(q + 1);
}

std::string registrable_domain(std::string_view host)
{
    auto const lowered = toLower(host);
    std::string_view h = lowered;
    if (isIpLiteral(h))
        return lowered;

    std::vector<std::string_view> labels;
    std::size_t pos = 0;
    while (pos <= h.size())
    {
        auto const dot = h.find('.', pos);
        labels.push_back(h.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
        if (dot == std::string_view::npos)
            break;
        pos = dot + 1;
    }
    if (labels.size() <= 2)
        return lowered;

    std::size_t suffixLabels = 1;
    for (std::string_view suffix: kMultiLabelSuffixes)
    {
        if (h.size() > suffix.size() && h.ends_with(suffix) && h[h.size() - suffix.size() - 1] == '.')
        {
            auto const n = static_cast<std::size_t>(std::ranges::count(suffix, '.')) + 1;
            suffixLabels = std::max(suffixLabels, n);
        }
    }
    if (labels.size() <= suffixLabels)
        return lowered;

    std::string out;
    for (auto i = labels.size() - suffixLabels - 1; i < labels.size(); ++i)
    {
        if (!out.empty())
            out += '.';
        out += labels[i];
    }
    return out;
}

} // namespace mango
