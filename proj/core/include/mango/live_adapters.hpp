// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/crawler.hpp>
#include <mango/navigation.hpp>
#include <mango/ranking.hpp>
#include <mango/reflection.hpp>
#include <mango/search_augment.hpp>

#include <chrono>
#include <string>
#include <vector>

// Network-backed adapters. Only selected by explicit CLI flags.
namespace mango::live
{

struct HttpOptions
{
    std::chrono::milliseconds timeout { 10'000 };
    std::string user_agent = "mango-nav/0.1";
};

/// Plain GET over http(s); outlinks come from the page's <a href> anchors.
class LiveFetcher final: public PageFetcher
{
  public:
    explicit LiveFetcher(HttpOptions options = {});
    FetchResponse fetch(const CanonicalUrl& url) override;

  private:
    HttpOptions _options;
};

/// GET {endpoint}?q=<keywords>&site=<domain>&k=<k>, expecting a JSON array of URLs.
class LiveSearchClient final: public SearchClient
{
  public:
    explicit LiveSearchClient(std::string endpoint, HttpOptions options = {});
    std::vector<std::string> search(std::string_view keywords, std::string_view siteDomain, std::size_t k) override;

  private:
    std::string _endpoint;
    HttpOptions _options;
};

struct ChatOptions
{
    /// Base URL of an OpenAI-compatible API, e.g. "https://api.openai.com/v1".
    std::string base_url;
    std::string api_key;
    std::string model;
    HttpOptions http { std::chrono::milliseconds { 60'000 } };
};

/// Minimal chat-completions client. Throws AdapterFailure.
class ChatClient
{
  public:
    explicit ChatClient(ChatOptions options);
    std::string complete(std::string_view system, std::string_view user);

  private:
    ChatOptions _options;
};

class LlmKeywordAdapter final: public KeywordAdapter
{
  public:
    explicit LlmKeywordAdapter(ChatClient& chat): _chat(chat) {}
    std::string generate(std::string_view systemPrompt, const Query& query) override;

  private:
    ChatClient& _chat;
};

/// Asks the model for one JSON action {kind, target?, argument?, result?, source?}.
class LlmAgent final: public AgentAdapter
{
  public:
    explicit LlmAgent(ChatClient& chat): _chat(chat) {}
    Action decide(const Query& query,
                  const CanonicalUrl& startUrl,
                  std::span<const EpisodeRecord> memoryContext,
                  const Trajectory& trajectorySoFar,
                  const Observation& latest) override;

  private:
    ChatClient& _chat;
};

class LlmReflector final: public ReflectorAdapter
{
  public:
    explicit LlmReflector(ChatClient& chat): _chat(chat) {}
    std::string judge_completed(const Query& query, const Trajectory& trajectory, std::string_view output, const CanonicalUrl& source) override;
    std::string judge_exhausted(const Query& query, const Trajectory& trajectory) override;

  private:
    ChatClient& _chat;
};

/// Text-mode browser over LiveFetcher: page text plus links as interactables.
class HttpBrowserEnv final: public BrowserEnv
{
  public:
    explicit HttpBrowserEnv(HttpOptions options = {});
    Observation reset(const CanonicalUrl& url) override;
    Observation apply(const Action& action) override;

  private:
    Observation load(const CanonicalUrl& url);

    LiveFetcher _fetcher;
    CanonicalUrl _current;
    Observation _currentObservation;
    std::vector<CanonicalUrl> _history;
};

/// The JSON object embedded in a model reply (code fences and prose stripped).
std::string extract_json_object(std::string_view reply);

/// Replaces {USER_QUERY} and {ROOT_URL} in a prompt template.
std::string fill_prompt(std::string_view tmpl, std::string_view query, std::string_view rootUrl);

} // namespace mango::live
