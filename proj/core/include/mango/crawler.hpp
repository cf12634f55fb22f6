// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mango
{

struct CrawlConfig
{
    CanonicalUrl root_url;
    std::size_t max_pages = 1000;
    bool same_domain_only = true;
    bool exclude_non_html = true;
    std::chrono::milliseconds per_page_fetch_timeout { 10'000 };
    std::optional<std::size_t> max_depth;

    /// Throws std::invalid_argument on a broken invariant.
    void validate() const;
};

struct CrawledPage
{
    CanonicalUrl url;
    std::size_t depth = 0;
    std::string content;
    std::vector<CanonicalUrl> outlinks;
    std::size_t fetch_order = 0;

    bool operator==(const CrawledPage&) const = default;
};

enum class SkipReason
{
    ExternalDomain,
    NonHtml,
    FetchError,
    OverLimit,
};

std::string_view to_string(SkipReason reason);
SkipReason skip_reason_from_string(std::string_view text);

struct CrawlResult
{
    std::map<CanonicalUrl, CrawledPage> pages;
    std::map<CanonicalUrl, SkipReason> skipped;
    std::string root_domain;

    /// Pages sorted by fetch_order.
    [[nodiscard]] std::vector<const CrawledPage*> in_fetch_order() const;

    bool operator==(const CrawlResult&) const = default;
};

struct FetchResponse
{
    std::string content_type;
    std::string body;
    std::vector<std::string> outlinks;
};

/// Source of pages for the crawler. Implementations throw FetchError on failure.
class PageFetcher
{
  public:
    virtual ~PageFetcher() = default;
    virtual FetchResponse fetch(const CanonicalUrl& url) = 0;
};

struct VisitDecision
{
    bool visit = true;
    std::optional<SkipReason> reason;

    bool operator==(const VisitDecision&) const = default;
};

bool is_html_content_type(std::string_view contentType);

/// True when the URL path ends in one of the binary/media extensions that never
/// lead to navigable pages.
bool has_non_html_extension(const CanonicalUrl& url);

VisitDecision should_visit(const CanonicalUrl& url,
                           std::string_view rootDomain,
                           const CrawlConfig& config,
                           const std::set<CanonicalUrl>& knownNonHtml = {});

/// Bounded breadth-first crawl from config.root_url. Only a root fetch failure
/// is fatal (RootUnreachable); everything else lands in CrawlResult::skipped.
CrawlResult crawl(const CrawlConfig& config, PageFetcher& fetcher);

void to_json(nlohmann::json& j, const CrawlResult& result);
void from_json(const nlohmann::json& j, CrawlResult& result);

} // namespace mango
