// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/crawler.hpp>
#include <mango/ranking.hpp>
#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mango
{

inline constexpr std::size_t kDefaultSearchK = 10;

/// Site-restricted web search. Implementations throw SearchUnavailable.
class SearchClient
{
  public:
    virtual ~SearchClient() = default;
    virtual std::vector<std::string> search(std::string_view keywords, std::string_view siteDomain, std::size_t k) = 0;
};

/// Replays a fixed, rank-ordered JSON array of URLs regardless of the keywords.
class ScriptedSearchClient final: public SearchClient
{
  public:
    explicit ScriptedSearchClient(std::vector<std::string> results);
    static ScriptedSearchClient from_json(const nlohmann::json& j);
    static ScriptedSearchClient from_file(const std::filesystem::path& path);

    std::vector<std::string> search(std::string_view keywords, std::string_view siteDomain, std::size_t k) override;

  private:
    std::vector<std::string> _results;
};

/// Always throws SearchUnavailable; stands in for a search backend that is down.
class UnavailableSearchClient final: public SearchClient
{
  public:
    std::vector<std::string> search(std::string_view keywords, std::string_view siteDomain, std::size_t k) override;
};

struct CandidateSet
{
    std::vector<ScoredUrl> arms;
    Query query;
    CanonicalUrl root_url;
};

/// Canonical, deduplicated (first occurrence wins), HTML-looking hits, at most k.
std::vector<CanonicalUrl> site_search(std::string_view keywords, std::string_view domain, SearchClient& client, std::size_t k = kDefaultSearchK);

/// Merges crawl-ranked and search-found URLs into one jointly normalized set.
/// Throws EmptyCandidates when both inputs are empty.
CandidateSet build_candidate_set(const std::vector<ScoredUrl>& crawlTop,
                                 const std::vector<CanonicalUrl>& searchUrls,
                                 const CrawlResult& crawl,
                                 const Query& query,
                                 PageFetcher& fetcher,
                                 const RankingConfig& config);

void to_json(nlohmann::json& j, const CandidateSet& set);

} // namespace mango
