// SPDX-License-Identifier: Apache-2.0
#include <mango/crawler.hpp>
#include <mango/errors.hpp>
#include <mango/html_text.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace mango
{

namespace
{

    constexpr std::array<std::string_view, 18> kNonHtmlExtensions {
        "png", "jpg", "jpeg", "gif", "svg", "webp", "ico", "css", "js",
        "pdf", "zip", "gz",   "tar", "mp4", "mp3", "woff", "woff2", "ttf",
    };

    std::string lowerAscii(std::string_view s)
    {
        std::string out(s);
        std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    struct FrontierEntry
    {
        CanonicalUrl url;
        std::size_t depth;
    };

} // namespace

void CrawlConfig::validate() const
{
    if (max_pages < 1)
        throw std::invalid_argument("crawl max_pages must be >= 1");
    if (root_url.empty())
        throw std::invalid_argument("crawl root_url is required");
    if (max_depth && *max_depth < 1)
        throw std::invalid_argument("crawl max_depth must be >= 1 when set");
}

std::string_view to_string(SkipReason reason)
{
    switch (reason)
    {
        case SkipReason::ExternalDomain: return "external-domain";
        case SkipReason::NonHtml: return "non-html";
        case SkipReason::FetchError: return "fetch-error";
        case SkipReason::OverLimit: return "over-limit";
    }
    return "unknown";
}

SkipReason skip_reason_from_string(std::string_view text)
{
    for (auto r: { SkipReason::ExternalDomain, SkipReason::NonHtml, SkipReason::FetchError, SkipReason::OverLimit })
        if (to_string(r) == text)
            return r;
    throw FixtureError("unknown skip reason: " + std::string(text));
}

std::vector<const CrawledPage*> CrawlResult::in_fetch_order() const
{
    std::vector<const CrawledPage*> out;
    out.reserve(pages.size());
    for (auto const& [_, page]: pages)
        out.push_back(&page);
    std::ranges::sort(out, {}, &CrawledPage::fetch_order);
    return out;
}

bool is_html_content_type(std::string_view contentType)
{
    auto const lowered = lowerAscii(contentType);
    return lowered.starts_with("text/html") || lowered.starts_with("application/xhtml+xml");
}

bool has_non_html_extension(const CanonicalUrl& url)
{
    auto const path = url.path();
    auto const slash = path.rfind('/');
    auto const last = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto const dot = last.rfind('.');
    if (dot == std::string_view::npos)
        return false;
    auto const ext = lowerAscii(last.substr(dot + 1));
    return std::ranges::find(kNonHtmlExtensions, std::string_view(ext)) != kNonHtmlExtensions.end();
}

VisitDecision should_visit(const CanonicalUrl& url,
                           std::string_view rootDomain,
                           const CrawlConfig& config,
                           const std::set<CanonicalUrl>& knownNonHtml)
{
    if (config.same_domain_only && registrable_domain(url.host()) != rootDomain)
        return { false, SkipReason::ExternalDomain };
    if (config.exclude_non_html && (has_non_html_extension(url) || knownNonHtml.contains(url)))
        return { false, SkipReason::NonHtml };
    return { true, std::nullopt };
}

CrawlResult crawl(const CrawlConfig& config, PageFetcher& fetcher)
{
    config.validate();

    CrawlResult result;
    result.root_domain = registrable_domain(config.root_url.host());

    std::set<CanonicalUrl> knownNonHtml;
    std::unordered_set<CanonicalUrl> discovered { config.root_url };
    std::deque<FrontierEntry> frontier { { config.root_url, 0 } };

    while (!frontier.empty())
    {
        if (result.pages.size() >= config.max_pages)
        {
            for (auto const& entry: frontier)
                result.skipped.emplace(entry.url, SkipReason::OverLimit);
            break;
        }

        auto const [url, depth] = frontier.front();
        frontier.pop_front();
        bool const isRoot = result.pages.empty() && url == config.root_url;

        FetchResponse response;
        try
        {
            response = fetcher.fetch(url);
        }
        catch (const FetchError& e)
        {
            if (isRoot)
                throw RootUnreachable("root fetch failed: " + std::string(e.what()));
            result.skipped.emplace(url, SkipReason::FetchError);
            continue;
        }

        if (config.exclude_non_html && !is_html_content_type(response.content_type))
        {
            if (isRoot)
                throw RootUnreachable("root is not an HTML page: " + url.str());
            knownNonHtml.insert(url);
            result.skipped.emplace(url, SkipReason::NonHtml);
            continue;
        }

        CrawledPage page;
        page.url = url;
        page.depth = depth;
        page.fetch_order = result.pages.size();
        page.content = html_to_text(response.body);

        std::unordered_set<CanonicalUrl> seenOnPage;
        for (auto const& href: response.outlinks)
        {
            CanonicalUrl link;
            try
            {
                link = canonicalize_url(href, url);
            }
            catch (const InvalidUrl&)
            {
                continue;
            }
            if (seenOnPage.insert(link).second)
                page.outlinks.push_back(link);

            if (!discovered.insert(link).second)
                continue;
            auto const decision = should_visit(link, result.root_domain, config, knownNonHtml);
            if (!decision.visit)
                result.skipped.emplace(link, *decision.reason);
            else if (config.max_depth && depth + 1 > *config.max_depth)
                result.skipped.emplace(link, SkipReason::OverLimit);
            else
                frontier.push_back({ link, depth + 1 });
        }

        result.pages.emplace(url, std::move(page));
    }

    return result;
}

void to_json(nlohmann::json& j, const CrawlResult& result)
{
    auto pages = nlohmann::json::array();
    for (auto const* page: result.in_fetch_order())
    {
        auto outlinks = nlohmann::json::array();
        for (auto const& link: page->outlinks)
            outlinks.push_back(link.str());
        pages.push_back({
            { "url", page->url.str() },
            { "depth", page->depth },
            { "fetch_order", page->fetch_order },
            { "content", page->content },
            { "outlinks", std::move(outlinks) },
        });
    }
    auto skipped = nlohmann::json::array();
    for (auto const& [url, reason]: result.skipped)
        skipped.push_back({ { "url", url.str() }, { "reason", std::string(to_string(reason)) } });

    j = nlohmann::json { { "root_domain", result.root_domain }, { "pages", std::move(pages) }, { "skipped", std::move(skipped) } };
}

void from_json(const nlohmann::json& j, CrawlResult& result)
{
    result = {};
    result.root_domain = j.at("root_domain").get<std::string>();
    for (auto const& p: j.at("pages"))
    {
        CrawledPage page;
        page.url = CanonicalUrl::parse(p.at("url").get<std::string>());
        page.depth = p.at("depth").get<std::size_t>();
        page.fetch_order = p.at("fetch_order").get<std::size_t>();
        page.content = p.at("content").get<std::string>();
        for (auto const& link: p.at("outlinks"))
            page.outlinks.push_back(CanonicalUrl::parse(link.get<std::string>()));
        auto key = page.url;
        result.pages.emplace(std::move(key), std::move(page));
    }
    for (auto const& s: j.at("skipped"))
        result.skipped.emplace(CanonicalUrl::parse(s.at("url").get<std::string>()),
                               skip_reason_from_string(s.at("reason").get<std::string>()));
}

} // namespace mango
