// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/crawler.hpp>
#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mango
{

/// Non-empty (after trimming) user query.
class Query
{
  public:
    explicit Query(std::string text);

    [[nodiscard]] const std::string& text() const noexcept { return _text; }

    bool operator==(const Query&) const = default;

  private:
    std::string _text;
};

struct RankingConfig
{
    double k1 = 1.2;
    double b = 0.75;
    double epsilon = 1e-9;
    std::size_t top_k = 10;

    void validate() const;
};

enum class Provenance
{
    Crawl,
    Search,
};

std::string_view to_string(Provenance provenance);
Provenance provenance_from_string(std::string_view text);

struct ScoredUrl
{
    CanonicalUrl url;
    double lambda = 0.0;
    double rho = 0.0;
    Provenance provenance = Provenance::Crawl;
    /// Set when lambda did not come from scoring the page itself.
    std::optional<std::string> note;

    bool operator==(const ScoredUrl&) const = default;
};

struct CorpusStats
{
    std::size_t doc_count = 0;
    double avg_doc_len = 0.0;
    std::unordered_map<std::string, std::size_t> doc_freq;
};

/// Lowercases and splits on every non-alphanumeric code point. Non-ASCII letters
/// (any script) count as alphanumeric; Unicode punctuation/symbol blocks split.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens of a page's BM25 document: its extracted content followed by its URL.
std::vector<std::string> document_tokens(const CanonicalUrl& url, std::string_view content);

CorpusStats build_corpus_stats(std::span<const std::vector<std::string>> documents);
CorpusStats build_corpus_stats(const CrawlResult& crawl);

/// Okapi BM25 with the non-negative IDF ln((N - df + 0.5)/(df + 0.5) + 1).
/// Each distinct query token contributes once. Throws EmptyCorpus.
double bm25_score(const Query& query, std::span<const std::string> doc, const CorpusStats& stats, const RankingConfig& config);

/// rho = (lambda - min) / (max - min + epsilon), in input order.
std::vector<double> normalize_scores(std::span<const double> lambdas, double epsilon);
std::map<CanonicalUrl, double> normalize_scores(const std::map<CanonicalUrl, double>& lambdas, double epsilon);

/// Every crawled page scored and normalized over the full corpus, sorted by
/// lambda descending (ties: lower fetch_order first). Throws EmptyCorpus.
std::vector<ScoredUrl> score_corpus(const CrawlResult& crawl, const Query& query, const RankingConfig& config);

/// score_corpus truncated to config.top_k.
std::vector<ScoredUrl> rank_candidates(const CrawlResult& crawl, const Query& query, const RankingConfig& config);

/// Turns a query into search keywords. Implementations may throw AdapterFailure.
class KeywordAdapter
{
  public:
    virtual ~KeywordAdapter() = default;
    virtual std::string generate(std::string_view systemPrompt, const Query& query) = 0;
};

/// Query tokens minus the built-in English stopword list, space-joined.
class FallbackKeywordAdapter final: public KeywordAdapter
{
  public:
    std::string generate(std::string_view systemPrompt, const Query& query) override;
};

/// Canned query -> keywords table; unknown queries raise AdapterFailure.
class ScriptedKeywordAdapter final: public KeywordAdapter
{
  public:
    explicit ScriptedKeywordAdapter(std::map<std::string, std::string> table);
    static ScriptedKeywordAdapter from_json(const nlohmann::json& j);

    std::string generate(std::string_view systemPrompt, const Query& query) override;

  private:
    std::map<std::string, std::string> _table;
};

std::span<const std::string_view> english_stopwords();

std::string generate_search_keywords(const Query& query, KeywordAdapter& keyworder);

void to_json(nlohmann::json& j, const ScoredUrl& scored);
void from_json(const nlohmann::json& j, ScoredUrl& scored);

} // namespace mango
