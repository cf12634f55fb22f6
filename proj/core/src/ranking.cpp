// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/prompts.hpp>
#include <mango/ranking.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace mango
{

namespace
{

    // Decodes one UTF-8 sequence at text[i]. Malformed input yields -1 and advances one byte.
    long decodeUtf8(std::string_view text, std::size_t& i)
    {
        auto const lead = static_cast<unsigned char>(text[i]);
        int extra = 0;
        long cp = 0;
        if (lead < 0x80)
        {
            ++i;
            return lead;
        }
        if ((lead & 0xE0) == 0xC0)
        {
            extra = 1;
            cp = lead & 0x1F;
        }
        else if ((lead & 0xF0) == 0xE0)
        {
            extra = 2;
            cp = lead & 0x0F;
        }
        else if ((lead & 0xF8) == 0xF0)
        {
            extra = 3;
            cp = lead & 0x07;
        }
        else
        {
            ++i;
            return -1;
        }
        if (i + static_cast<std::size_t>(extra) >= text.size())
        {
            ++i;
            return -1;
        }
        for (int k = 1; k <= extra; ++k)
        {
            auto const c = static_cast<unsigned char>(text[i + static_cast<std::size_t>(k)]);
            if ((c & 0xC0) != 0x80)
            {
                ++i;
                return -1;
            }
            cp = (cp << 6) | (c & 0x3F);
        }
        i += static_cast<std::size_t>(extra) + 1;
        return cp;
    }

    bool isWordCodePoint(long cp)
    {
        if (cp < 0)
            return false;
        if (cp < 0x80)
            return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
        if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7)
            return false;
        if ((cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE4F))
            return false;
        if ((cp >= 0xFF00 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40)
            || (cp >= 0xFF5B && cp <= 0xFF65))
            return false;
        if (cp >= 0x1F000 && cp <= 0x1FAFF)
            return false;
        return true;
    }

    long toLowerCodePoint(long cp)
    {
        if (cp >= 'A' && cp <= 'Z')
            return cp + 32;
        if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
            return cp + 0x20;
        if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2)
            return cp + 0x20;
        if (cp >= 0x410 && cp <= 0x42F)
            return cp + 0x20;
        if (cp >= 0x400 && cp <= 0x40F)
            return cp + 0x50;
        if (((cp >= 0x100 && cp <= 0x12F) || (cp >= 0x132 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) && cp % 2 == 0)
            return cp + 1;
        if (((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) && cp % 2 == 1)
            return cp + 1;
        return cp;
    }

    void appendUtf8(std::string& out, long cp)
    {
        auto const u = static_cast<unsigned long>(cp);
        if (u < 0x80)
            out += static_cast<char>(u);
        else if (u < 0x800)
        {
            out += static_cast<char>(0xC0 | (u >> 6));
            out += static_cast<char>(0x80 | (u & 0x3F));
        }
        else if (u < 0x10000)
        {
            out += static_cast<char>(0xE0 | (u >> 12));
            out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (u & 0x3F));
        }
        else
        {
            out += static_cast<char>(0xF0 | (u >> 18));
            out += static_cast<char>(0x80 | ((u >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((u >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (u & 0x3F));
        }
    }

    constexpr std::array<std::string_view, 120> kStopwords {
        "a",       "about",   "above",   "after",   "again",   "against", "all",    "am",     "an",      "and",
        "any",     "are",     "as",      "at",      "be",      "because", "been",   "before", "being",   "below",
        "between", "both",    "but",     "by",      "can",     "could",   "did",    "do",     "does",    "doing",
        "down",    "during",  "each",    "few",     "for",     "from",    "further", "had",   "has",     "have",
        "having",  "he",      "her",     "here",    "hers",    "him",     "his",    "how",    "i",       "if",
        "in",      "into",    "is",      "it",      "its",     "just",    "me",     "more",   "most",    "my",
        "no",      "nor",     "not",     "now",     "of",      "off",     "on",     "once",   "only",    "or",
        "other",   "our",     "ours",    "out",     "over",    "own",     "same",   "she",    "should",  "so",
        "some",    "such",    "than",    "that",    "the",     "their",   "theirs", "them",   "themselves", "then",
        "there",   "these",   "they",    "this",    "those",   "through", "to",     "too",    "under",   "until",
        "up",      "very",    "was",     "we",      "were",    "what",    "when",   "where",  "which",   "while",
        "who",     "whom",    "why",     "will",    "with",    "would",   "you",    "your",   "yours",   "yourself",
    };

} // namespace

Query::Query(std::string text): _text(std::move(text))
{
    if (std::ranges::all_of(_text, [](unsigned char c) { return std::isspace(c) != 0; }))
        throw std::invalid_argument("query must be non-empty");
}

void RankingConfig::validate() const
{
    if (!(k1 > 0.0))
        throw std::invalid_argument("BM25 k1 must be positive");
    if (b < 0.0 || b > 1.0)
        throw std::invalid_argument("BM25 b must be in [0, 1]");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (top_k < 1)
        throw std::invalid_argument("top_k must be >= 1");
}

std::string_view to_string(Provenance provenance)
{
    switch (provenance)
    {
        case Provenance::Crawl: return "crawl";
        case Provenance::Search: return "search";
    }
    return "crawl";
}

Provenance provenance_from_string(std::string_view text)
{
    if (text == "crawl")
        return Provenance::Crawl;
    if (text == "search")
        return Provenance::Search;
    throw FixtureError("unknown provenance: " + std::string(text));
}

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size())
    {
        auto const cp = decodeUtf8(text, i);
        if (isWordCodePoint(cp))
        {
            appendUtf8(current, toLowerCodePoint(cp));
            continue;
        }
        if (!current.empty())
            tokens.push_back(std::move(current));
        current.clear();
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> document_tokens(const CanonicalUrl& url, std::string_view content)
{
    auto tokens = tokenize(content);
    auto urlTokens = tokenize(url.str());
    tokens.insert(tokens.end(), std::make_move_iterator(urlTokens.begin()), std::make_move_iterator(urlTokens.end()));
    return tokens;
}

CorpusStats build_corpus_stats(std::span<const std::vector<std::string>> documents)
{
    CorpusStats stats;
    stats.doc_count = documents.size();
    std::size_t totalLen = 0;
    for (auto const& doc: documents)
    {
        totalLen += doc.size();
        std::unordered_set<std::string_view> unique(doc.begin(), doc.end());
        for (auto term: unique)
            ++stats.doc_freq[std::string(term)];
    }
    stats.avg_doc_len = stats.doc_count == 0 ? 0.0 : static_cast<double>(totalLen) / static_cast<double>(stats.doc_count);
    return stats;
}

CorpusStats build_corpus_stats(const CrawlResult& crawl)
{
    std::vector<std::vector<std::string>> docs;
    docs.reserve(crawl.pages.size());
    for (auto const* page: crawl.in_fetch_order())
        docs.push_back(document_tokens(page->url, page->content));
    return build_corpus_stats(docs);
}

double bm25_score(const Query& query, std::span<const std::string> doc, const CorpusStats& stats, const RankingConfig& config)
{
    if (stats.doc_count == 0)
        throw EmptyCorpus("BM25 over an empty corpus");

    auto queryTerms = tokenize(query.text());
    std::vector<std::string> distinct;
    for (auto& term: queryTerms)
        if (std::ranges::find(distinct, term) == distinct.end())
            distinct.push_back(std::move(term));

    auto const n = static_cast<double>(stats.doc_count);
    auto const docLen = static_cast<double>(doc.size());
    auto const avgLen = stats.avg_doc_len > 0.0 ? stats.avg_doc_len : 1.0;

    double score = 0.0;
    for (auto const& term: distinct)
    {
        auto const it = stats.doc_freq.find(term);
        if (it == stats.doc_freq.end())
            continue;
        auto const tf = static_cast<double>(std::ranges::count(doc, term));
        if (tf == 0.0)
            continue;
        auto const df = static_cast<double>(it->second);
        auto const idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
        auto const norm = config.k1 * (1.0 - config.b + config.b * docLen / avgLen);
        score += idf * tf * (config.k1 + 1.0) / (tf + norm);
    }
    return score;
}

std::vector<double> normalize_scores(std::span<const double> lambdas, double epsilon)
{
    if (lambdas.empty())
        throw std::invalid_argument("normalize_scores needs at least one score");
    auto const [lo, hi] = std::ranges::minmax_element(lambdas);
    auto const minValue = *lo;
    auto const denom = *hi - minValue + epsilon;
    std::vector<double> out;
    out.reserve(lambdas.size());
    for (double lambda: lambdas)
        out.push_back((lambda - minValue) / denom);
    return out;
}

std::map<CanonicalUrl, double> normalize_scores(const std::map<CanonicalUrl, double>& lambdas, double epsilon)
{
    std::vector<double> values;
    values.reserve(lambdas.size());
    for (auto const& [_, lambda]: lambdas)
        values.push_back(lambda);
    auto const rho = normalize_scores(values, epsilon);
    std::map<CanonicalUrl, double> out;
    std::size_t i = 0;
    for (auto const& [url, _]: lambdas)
        out.emplace(url, rho[i++]);
    return out;
}

std::vector<ScoredUrl> score_corpus(const CrawlResult& crawl, const Query& query, const RankingConfig& config)
{
    config.validate();
    if (crawl.pages.empty())
        throw EmptyCorpus("no crawled pages to rank");

    auto const ordered = crawl.in_fetch_order();
    std::vector<std::vector<std::string>> docs;
    docs.reserve(ordered.size());
    for (auto const* page: ordered)
        docs.push_back(document_tokens(page->url, page->content));
    auto const stats = build_corpus_stats(docs);

    std::vector<double> lambdas;
    lambdas.reserve(docs.size());
    for (auto const& doc: docs)
        lambdas.push_back(bm25_score(query, doc, stats, config));
    auto const rho = normalize_scores(lambdas, config.epsilon);

    std::vector<ScoredUrl> scored;
    scored.reserve(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i)
        scored.push_back(ScoredUrl { .url = ordered[i]->url, .lambda = lambdas[i], .rho = rho[i], .provenance = Provenance::Crawl });

    // `ordered` is already by fetch_order, so a stable sort keeps the tie-break.
    std::ranges::stable_sort(scored, [](const ScoredUrl& a, const ScoredUrl& b) { return a.lambda > b.lambda; });
    return scored;
}

std::vector<ScoredUrl> rank_candidates(const CrawlResult& crawl, const Query& query, const RankingConfig& config)
{
    auto scored = score_corpus(crawl, query, config);
    if (scored.size() > config.top_k)
        scored.resize(config.top_k);
    return scored;
}

std::span<const std::string_view> english_stopwords()
{
    return kStopwords;
}

std::string FallbackKeywordAdapter::generate(std::string_view /*systemPrompt*/, const Query& query)
{
    std::string out;
    for (auto const& token: tokenize(query.text()))
    {
        if (std::ranges::find(kStopwords, std::string_view(token)) != kStopwords.end())
            continue;
        if (!out.empty())
            out += ' ';
        out += token;
    }
    return out;
}

ScriptedKeywordAdapter::ScriptedKeywordAdapter(std::map<std::string, std::string> table): _table(std::move(table))
{
}

ScriptedKeywordAdapter ScriptedKeywordAdapter::from_json(const nlohmann::json& j)
{
    return ScriptedKeywordAdapter(j.get<std::map<std::string, std::string>>());
}

std::string ScriptedKeywordAdapter::generate(std::string_view /*systemPrompt*/, const Query& query)
{
    auto const it = _table.find(query.text());
    if (it == _table.end())
        throw AdapterFailure("no scripted keywords for query: " + query.text());
    return it->second;
}

std::string generate_search_keywords(const Query& query, KeywordAdapter& keyworder)
{
    return keyworder.generate(prompts::kSearchQueryGenerator, query);
}

void to_json(nlohmann::json& j, const ScoredUrl& scored)
{
    j = nlohmann::json {
        { "url", scored.url.str() },
        { "lambda", scored.lambda },
        { "rho", scored.rho },
        { "provenance", std::string(to_string(scored.provenance)) },
    };
    if (scored.note)
        j["note"] = *scored.note;
}

void from_json(const nlohmann::json& j, ScoredUrl& scored)
{
    scored.url = CanonicalUrl::parse(j.at("url").get<std::string>());
    scored.lambda = j.at("lambda").get<double>();
    scored.rho = j.at("rho").get<double>();
    scored.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    scored.note = j.contains("note") ? std::optional(j.at("note").get<std::string>()) : std::nullopt;
}

} // namespace mango
