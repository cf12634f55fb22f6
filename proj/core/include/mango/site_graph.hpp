// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/crawler.hpp>
#include <mango/navigation.hpp>
#include <mango/url.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mango
{

struct SiteLink
{
    std::string text;
    std::string href;

    bool operator==(const SiteLink&) const = default;
};

struct SitePage
{
    CanonicalUrl url;
    std::string content;
    std::vector<SiteLink> links;
    nlohmann::json forms = nlohmann::json::array();
    std::string content_type = "text/html";
    /// Present in the graph but unreachable (fetch and reset fail).
    bool dead = false;

    bool operator==(const SitePage&) const = default;
};

/// Offline website: {pages: [{url, content, links: [{text, href}], forms}]} plus
/// optional task metadata used by scripted runs.
struct SiteGraph
{
    std::vector<SitePage> pages;
    std::optional<CanonicalUrl> root_url;
    std::optional<std::string> query;
    std::optional<std::string> golden_answer;
    std::vector<CanonicalUrl> target_urls;
    std::vector<std::string> search_results;

    /// Throws FixtureError on duplicate URLs or malformed entries.
    static SiteGraph from_json(const nlohmann::json& j);
    static SiteGraph from_file(const std::filesystem::path& path);

    [[nodiscard]] nlohmann::json to_json() const;

    [[nodiscard]] const SitePage* find(const CanonicalUrl& url) const;

    /// Canonical link targets of a page in document order, invalid hrefs dropped,
    /// duplicates keep their first anchor text.
    [[nodiscard]] std::vector<std::pair<CanonicalUrl, std::string>> resolved_links(const SitePage& page) const;

    /// Rebuilds the URL index; call after editing `pages` directly.
    void reindex();

  private:
    std::map<CanonicalUrl, std::size_t> _index;
};

/// Minimal HTML rendering of a fixture page (content paragraph plus an anchor list).
std::string render_html(const SitePage& page);

/// PageFetcher over a SiteGraph. Missing and dead pages raise FetchError.
class SiteFetcher final: public PageFetcher
{
  public:
    explicit SiteFetcher(const SiteGraph& site): _site(site) {}

    FetchResponse fetch(const CanonicalUrl& url) override;

    [[nodiscard]] std::size_t fetch_count() const noexcept { return _fetches; }

  private:
    const SiteGraph& _site;
    std::size_t _fetches = 0;
};

/// In-memory browser over a SiteGraph. Link interactables use the canonical
/// target URL as their reference, so click(ref) and visit(url) land on the same page.
class SimulatedBrowserEnv final: public BrowserEnv
{
  public:
    explicit SimulatedBrowserEnv(const SiteGraph& site): _site(site) {}

    Observation reset(const CanonicalUrl& url) override;
    Observation apply(const Action& action) override;

    [[nodiscard]] const CanonicalUrl& current() const noexcept { return _current; }

  private:
    Observation observe(const SitePage& page) const;
    Observation moveTo(std::string_view target);

    const SiteGraph& _site;
    CanonicalUrl _current;
    std::vector<CanonicalUrl> _history;
};

} // namespace mango
