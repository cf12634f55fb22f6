// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/agent_types.hpp>
#include <mango/ranking.hpp>
#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace mango
{

/// Observations are cut to this many bytes (UTF-8 safe) before an agent sees them.
inline constexpr std::size_t kMaxObservationChars = 20000;

struct NavigationConfig
{
    /// Hard cap on recorded steps per attempt; the initial reset counts as one.
    std::size_t budget = 10;

    void validate() const;
};

struct Completed
{
    std::string result;
    CanonicalUrl source;

    bool operator==(const Completed&) const = default;
};

struct BudgetExhausted
{
    /// Set when the attempt ended early because the environment or the agent failed.
    std::optional<std::string> failure;

    bool operator==(const BudgetExhausted&) const = default;
};

using NavigationOutcome = std::variant<Completed, BudgetExhausted>;

/// Chooses the next browser action. Throws AgentFailure.
class AgentAdapter
{
  public:
    virtual ~AgentAdapter() = default;
    virtual Action decide(const Query& query,
                          const CanonicalUrl& startUrl,
                          std::span<const EpisodeRecord> memoryContext,
                          const Trajectory& trajectorySoFar,
                          const Observation& latest) = 0;
};

/// Plug-in browser. Both calls throw EnvironmentFailure when the browser itself
/// breaks; recoverable problems (unknown link, missing page) come back as an
/// Observation with `error` set.
class BrowserEnv
{
  public:
    virtual ~BrowserEnv() = default;
    virtual Observation reset(const CanonicalUrl& url) = 0;
    virtual Observation apply(const Action& action) = 0;
};

struct NavigationResult
{
    Trajectory trajectory;
    NavigationOutcome outcome;
};

/// One budgeted attempt from `startUrl`. Step 0 is the reset (recorded as a visit),
/// each further step is one agent action applied to the environment, including the
/// final finish. Agent and environment failures end the attempt as BudgetExhausted.
NavigationResult navigate(const Query& query,
                          const CanonicalUrl& startUrl,
                          std::span<const EpisodeRecord> memoryContext,
                          AgentAdapter& agent,
                          BrowserEnv& env,
                          const NavigationConfig& config);

[[nodiscard]] bool is_completed(const NavigationOutcome& outcome);

void to_json(nlohmann::json& j, const NavigationOutcome& outcome);

} // namespace mango
