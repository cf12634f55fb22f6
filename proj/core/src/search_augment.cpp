// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/html_text.hpp>
#include <mango/search_augment.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace mango
{

namespace
{

    double median(std::vector<double> values)
    {
        if (values.empty())
            return 0.0;
        std::ranges::sort(values);
        auto const mid = values.size() / 2;
        return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    }

} // namespace

ScriptedSearchClient::ScriptedSearchClient(std::vector<std::string> results): _results(std::move(results))
{
}

ScriptedSearchClient ScriptedSearchClient::from_json(const nlohmann::json& j)
{
    if (!j.is_array())
        throw FixtureError("search fixture must be a JSON array of URLs");
    return ScriptedSearchClient(j.get<std::vector<std::string>>());
}

ScriptedSearchClient ScriptedSearchClient::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FixtureError("cannot open search fixture: " + path.string());
    return from_json(nlohmann::json::parse(in));
}

std::vector<std::string> ScriptedSearchClient::search(std::string_view /*keywords*/, std::string_view /*siteDomain*/, std::size_t k)
{
    auto const n = std::min(k, _results.size());
    return { _results.begin(), _results.begin() + static_cast<std::ptrdiff_t>(n) };
}

std::vector<std::string> UnavailableSearchClient::search(std::string_view, std::string_view, std::size_t)
{
    throw SearchUnavailable("search disabled");
}

std::vector<CanonicalUrl> site_search(std::string_view keywords, std::string_view domain, SearchClient& client, std::size_t k)
{
    if (keywords.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw std::invalid_argument("site_search needs non-empty keywords");

    std::vector<CanonicalUrl> out;
    std::set<CanonicalUrl> seen;
    for (auto const& raw: client.search(keywords, domain, k))
    {
        if (out.size() >= k)
            break;
        CanonicalUrl url;
        try
        {
            url = canonicalize_absolute(raw);
        }
        catch (const InvalidUrl&)
        {
            continue;
        }
        if (has_non_html_extension(url) || !seen.insert(url).second)
            continue;
        out.push_back(std::move(url));
    }
    return out;
}

CandidateSet build_candidate_set(const std::vector<ScoredUrl>& crawlTop,
                                 const std::vector<CanonicalUrl>& searchUrls,
                                 const CrawlResult& crawl,
                                 const Query& query,
                                 PageFetcher& fetcher,
                                 const RankingConfig& config)
{
    config.validate();
    if (crawlTop.empty() && searchUrls.empty())
        throw EmptyCandidates("no crawl or search candidates");

    std::vector<ScoredUrl> arms;
    std::set<CanonicalUrl> present;
    for (auto const& scored: crawlTop)
        if (present.insert(scored.url).second)
            arms.push_back(ScoredUrl { .url = scored.url, .lambda = scored.lambda, .provenance = Provenance::Crawl });

    if (!searchUrls.empty())
    {
        auto const stats = build_corpus_stats(crawl);
        std::vector<double> crawlLambdas;
        for (auto const& scored: crawlTop)
            crawlLambdas.push_back(scored.lambda);
        auto const fallbackLambda = median(crawlLambdas);

        for (auto const& url: searchUrls)
        {
            if (!present.insert(url).second)
                continue;
            ScoredUrl arm { .url = url, .provenance = Provenance::Search };
            if (auto const it = crawl.pages.find(url); it != crawl.pages.end())
            {
                arm.lambda = bm25_score(query, document_tokens(url, it->second.content), stats, config);
            }
            else
            {
                try
                {
                    auto const response = fetcher.fetch(url);
                    if (!is_html_content_type(response.content_type))
                        throw FetchError("non-HTML content type " + response.content_type);
                    arm.lambda = bm25_score(query, document_tokens(url, html_to_text(response.body)), stats, config);
                }
                catch (const FetchError& e)
                {
                    arm.lambda = fallbackLambda;
                    arm.note = "lambda=median of crawl candidates (fetch failed: " + std::string(e.what()) + ")";
                }
            }
            arms.push_back(std::move(arm));
        }
    }

    std::vector<double> lambdas;
    lambdas.reserve(arms.size());
    for (auto const& arm: arms)
        lambdas.push_back(arm.lambda);
    auto const rho = normalize_scores(lambdas, config.epsilon);
    for (std::size_t i = 0; i < arms.size(); ++i)
        arms[i].rho = rho[i];

    std::ranges::sort(arms, [](const ScoredUrl& a, const ScoredUrl& b) {
        if (a.lambda != b.lambda)
            return a.lambda > b.lambda;
        if (a.provenance != b.provenance)
            return a.provenance == Provenance::Crawl;
        return a.url < b.url;
    });

    return CandidateSet { .arms = std::move(arms), .query = query, .root_url = crawl.pages.empty() ? CanonicalUrl {} : crawl.in_fetch_order().front()->url };
}

void to_json(nlohmann::json& j, const CandidateSet& set)
{
    j = nlohmann::json::array();
    for (auto const& arm: set.arms)
        j.push_back(arm);
}

} // namespace mango
