// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/html_text.hpp>
#include <mango/navigation.hpp>

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace mango
{

namespace
{

    Observation clipped(Observation observation)
    {
        if (observation.content.size() > kMaxObservationChars)
            observation.content = truncate_utf8(observation.content, kMaxObservationChars);
        return observation;
    }

    Observation errorObservation(const CanonicalUrl& url, std::string message)
    {
        return Observation { .url = url, .content = {}, .interactables = {}, .error = std::move(message) };
    }

} // namespace

void NavigationConfig::validate() const
{
    if (budget < 1)
        throw std::invalid_argument("navigation budget must be >= 1");
}

NavigationResult navigate(const Query& query,
                          const CanonicalUrl& startUrl,
                          std::span<const EpisodeRecord> memoryContext,
                          AgentAdapter& agent,
                          BrowserEnv& env,
                          const NavigationConfig& config)
{
    config.validate();

    NavigationResult out { .trajectory = Trajectory { .start_url = startUrl, .steps = {} }, .outcome = BudgetExhausted {} };
    auto& steps = out.trajectory.steps;

    try
    {
        steps.push_back({ Action::visit(startUrl), clipped(env.reset(startUrl)) });
    }
    catch (const EnvironmentFailure& e)
    {
        steps.push_back({ Action::visit(startUrl), errorObservation(startUrl, e.what()) });
        out.outcome = BudgetExhausted { e.what() };
        return out;
    }

    while (steps.size() < config.budget)
    {
        Action action;
        try
        {
            action = agent.decide(query, startUrl, memoryContext, out.trajectory, steps.back().observation);
            action.validate();
        }
        catch (const AgentFailure& e)
        {
            out.outcome = BudgetExhausted { std::string("agent failure: ") + e.what() };
            return out;
        }
        catch (const std::invalid_argument& e)
        {
            out.outcome = BudgetExhausted { std::string("agent failure: ") + e.what() };
            return out;
        }

        try
        {
            steps.push_back({ action, clipped(env.apply(action)) });
        }
        catch (const EnvironmentFailure& e)
        {
            steps.push_back({ action, errorObservation(steps.back().observation.url, e.what()) });
            out.outcome = BudgetExhausted { std::string("environment failure: ") + e.what() };
            return out;
        }

        if (action.kind == ActionKind::Finish)
        {
            out.outcome = Completed { *action.result, *action.source };
            return out;
        }
    }
    return out;
}

bool is_completed(const NavigationOutcome& outcome)
{
    return std::holds_alternative<Completed>(outcome);
}

void to_json(nlohmann::json& j, const NavigationOutcome& outcome)
{
    if (auto const* done = std::get_if<Completed>(&outcome))
    {
        j = nlohmann::json { { "kind", "completed" }, { "result", done->result }, { "source", done->source.str() } };
        return;
    }
    auto const& exhausted = std::get<BudgetExhausted>(outcome);
    j = nlohmann::json { { "kind", "budget-exhausted" } };
    if (exhausted.failure)
        j["failure"] = *exhausted.failure;
}

} // namespace mango
