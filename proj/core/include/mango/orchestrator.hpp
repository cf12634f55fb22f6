// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/bandit.hpp>
#include <mango/errors.hpp>
#include <mango/crawler.hpp>
#include <mango/memory.hpp>
#include <mango/navigation.hpp>
#include <mango/ranking.hpp>
#include <mango/reflection.hpp>
#include <mango/search_augment.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mango
{

/// Where the arms come from.
enum class CandidateStrategy
{
    /// Crawl top-k merged with site search (the default pipeline).
    Global,
    /// As many pages as the global set would hold, drawn uniformly from the crawl.
    Random,
    /// Site-search results only.
    SearchOnly,
};

enum class SelectionStrategy
{
    Thompson,
    /// Each arm once in descending initial lambda, no posterior updates.
    Greedy,
};

struct RunPolicy
{
    CandidateStrategy candidates = CandidateStrategy::Global;
    SelectionStrategy selection = SelectionStrategy::Thompson;
    bool use_memory = true;

    bool operator==(const RunPolicy&) const = default;
};

/// Non-owning adapter bindings. `search` may be null (search disabled).
struct RunAdapters
{
    PageFetcher* fetcher = nullptr;
    SearchClient* search = nullptr;
    KeywordAdapter* keyworder = nullptr;
    AgentAdapter* agent = nullptr;
    ReflectorAdapter* reflector = nullptr;
    BrowserEnv* env = nullptr;
};

struct RunConfig
{
    Query query;
    CanonicalUrl root_url;
    std::size_t max_iterations = 10;
    NavigationConfig navigation;
    CrawlConfig crawl;
    RankingConfig ranking;
    BanditConfig bandit;
    std::size_t search_k = kDefaultSearchK;
    RunPolicy policy;
    RunAdapters adapters;

    explicit RunConfig(Query q, CanonicalUrl root);

    /// Throws std::invalid_argument.
    void validate() const;
};

enum class EventKind
{
    CrawlDone,
    CandidatesBuilt,
    ArmSelected,
    NavigationDone,
    ReflectionDone,
    BanditUpdated,
    Terminated,
};

std::string_view to_string(EventKind kind);

struct RunEvent
{
    std::size_t seq = 0;
    EventKind kind = EventKind::Terminated;
    nlohmann::json payload;

    bool operator==(const RunEvent&) const = default;
};

/// One JSON line: {"seq", "kind", "payload"}.
std::string event_line(const RunEvent& event);

enum class RunStatus
{
    Answered,
    Unanswered,
};

std::string_view to_string(RunStatus status);

struct RunResult
{
    RunStatus status = RunStatus::Unanswered;
    std::optional<std::string> answer;
    std::optional<CanonicalUrl> source;
    std::size_t iterations_used = 0;
    std::size_t total_actions = 0;
    /// Bandit state after initialization and after every iteration.
    std::vector<nlohmann::json> arm_snapshots;
    std::vector<RunEvent> event_trace;
    /// Output of the latest inadequate verdict, kept when the run ends unanswered.
    std::optional<std::string> best_partial;
    std::size_t candidate_count = 0;
};

nlohmann::json to_json(const RunResult& result);

/// A fatal error together with everything the run produced before it.
class RunFailure: public Error
{
  public:
    RunFailure(const std::string& message, RunResult partial, std::exception_ptr cause);

    [[nodiscard]] const RunResult& partial() const noexcept { return _partial; }
    [[nodiscard]] std::exception_ptr cause() const noexcept { return _cause; }

  private:
    RunResult _partial;
    std::exception_ptr _cause;
};

using EventObserver = std::function<void(const RunEvent&)>;

/// Crawl, rank, search and merge into the candidate set (events go to `emit`).
/// Throws RootUnreachable, EmptyCandidates; search outages degrade to crawl-only.
CandidateSet analyze_structure(const RunConfig& config, const std::function<void(EventKind, nlohmann::json)>& emit = {});

/// `size` pages drawn uniformly without replacement from the crawl, BM25-scored
/// and normalized among themselves.
CandidateSet random_candidate_set(const CrawlResult& crawl, const Query& query, std::size_t size, std::uint64_t seed, const RankingConfig& config);

/// The full loop. Episodes go to `memory`; events are also streamed to `observer`.
/// Throws RunFailure wrapping any fatal error.
RunResult run(const RunConfig& config, MemoryStore& memory, const EventObserver& observer = {});

} // namespace mango
