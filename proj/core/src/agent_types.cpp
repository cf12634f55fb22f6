// SPDX-License-Identifier: Apache-2.0
#include <mango/agent_types.hpp>
#include <mango/errors.hpp>
#include <mango/html_text.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <cstdio>
#include <stdexcept>

namespace mango
{

namespace
{

    constexpr std::array kActionNames {
        std::pair { ActionKind::Visit, std::string_view("visit") },   std::pair { ActionKind::Click, std::string_view("click") },
        std::pair { ActionKind::Type, std::string_view("type") },     std::pair { ActionKind::Scroll, std::string_view("scroll") },
        std::pair { ActionKind::Back, std::string_view("back") },     std::pair { ActionKind::Finish, std::string_view("finish") },
    };

    template <typename T>
    std::optional<T> optionalField(const nlohmann::json& j, const char* key)
    {
        if (!j.contains(key) || j.at(key).is_null())
            return std::nullopt;
        return j.at(key).get<T>();
    }

    std::optional<CanonicalUrl> optionalUrl(const nlohmann::json& j, const char* key)
    {
        auto text = optionalField<std::string>(j, key);
        if (!text)
            return std::nullopt;
        return CanonicalUrl::parse(*text);
    }

} // namespace

std::string_view to_string(ActionKind kind)
{
    for (auto const& [k, name]: kActionNames)
        if (k == kind)
            return name;
    return "scroll";
}

ActionKind action_kind_from_string(std::string_view text)
{
    for (auto const& [k, name]: kActionNames)
        if (name == text)
            return k;
    throw std::invalid_argument("unknown action kind: " + std::string(text));
}

Action Action::visit(const CanonicalUrl& url)
{
    return Action { .kind = ActionKind::Visit, .target = url.str() };
}

Action Action::click(std::string ref)
{
    return Action { .kind = ActionKind::Click, .target = std::move(ref) };
}

Action Action::type(std::string ref, std::string text)
{
    return Action { .kind = ActionKind::Type, .target = std::move(ref), .argument = std::move(text) };
}

Action Action::scroll()
{
    return Action { .kind = ActionKind::Scroll };
}

Action Action::back()
{
    return Action { .kind = ActionKind::Back };
}

Action Action::finish(std::string result, CanonicalUrl source)
{
    return Action { .kind = ActionKind::Finish, .result = std::move(result), .source = std::move(source) };
}

void Action::validate() const
{
    switch (kind)
    {
        case ActionKind::Finish:
            if (!result || !source)
                throw std::invalid_argument("finish action needs result and source");
            break;
        case ActionKind::Visit:
        case ActionKind::Click:
        case ActionKind::Type:
            if (!target)
                throw std::invalid_argument(std::string(to_string(kind)) + " action needs a target");
            break;
        case ActionKind::Scroll:
        case ActionKind::Back: break;
    }
}

const Observation* Trajectory::last_observation() const
{
    return steps.empty() ? nullptr : &steps.back().observation;
}

std::string_view to_string(ReflectionStatus status)
{
    switch (status)
    {
        case ReflectionStatus::Adequate: return "adequate";
        case ReflectionStatus::Inadequate: return "inadequate";
        case ReflectionStatus::Feasible: return "feasible";
        case ReflectionStatus::Infeasible: return "infeasible";
    }
    return "infeasible";
}

std::optional<ReflectionStatus> reflection_status_from_string(std::string_view text)
{
    for (auto s: { ReflectionStatus::Adequate, ReflectionStatus::Inadequate, ReflectionStatus::Feasible, ReflectionStatus::Infeasible })
        if (to_string(s) == text)
            return s;
    return std::nullopt;
}

std::string content_digest(std::string_view content)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c: content)
    {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    std::array<char, 17> hex {};
    std::snprintf(hex.data(), hex.size(), "%016llx", static_cast<unsigned long long>(hash));
    return "fnv1a64:" + std::string(hex.data());
}

StoredObservation StoredObservation::from(const Observation& observation)
{
    return StoredObservation {
        .url = observation.url,
        .content = truncate_utf8(observation.content, kStoredObservationLimit),
        .digest = content_digest(observation.content),
        .size = observation.content.size(),
        .error = observation.error,
    };
}

EpisodeRecord EpisodeRecord::from(std::size_t iteration,
                                  const Trajectory& trajectory,
                                  std::optional<std::string> finalOutput,
                                  ReflectionVerdict reflection)
{
    EpisodeRecord record;
    record.url = trajectory.start_url;
    record.iteration = iteration;
    record.final_output = std::move(finalOutput);
    record.reflection = std::move(reflection);
    record.actions_used = trajectory.steps.size();
    record.trajectory.reserve(trajectory.steps.size());
    for (auto const& step: trajectory.steps)
        record.trajectory.push_back(EpisodeStep { .action = step.action, .observation = StoredObservation::from(step.observation) });
    return record;
}

void to_json(nlohmann::json& j, const Action& action)
{
    j = nlohmann::json { { "kind", std::string(to_string(action.kind)) } };
    if (action.target)
        j["target"] = *action.target;
    if (action.argument)
        j["argument"] = *action.argument;
    if (action.result)
        j["result"] = *action.result;
    if (action.source)
        j["source"] = action.source->str();
}

void from_json(const nlohmann::json& j, Action& action)
{
    action = Action {};
    action.kind = action_kind_from_string(j.at("kind").get<std::string>());
    action.target = optionalField<std::string>(j, "target");
    action.argument = optionalField<std::string>(j, "argument");
    action.result = optionalField<std::string>(j, "result");
    action.source = optionalUrl(j, "source");
}

void to_json(nlohmann::json& j, const Observation& observation)
{
    auto interactables = nlohmann::json::array();
    for (auto const& item: observation.interactables)
        interactables.push_back({ { "ref", item.ref }, { "text", item.text } });
    j = nlohmann::json { { "url", observation.url.str() }, { "content", observation.content }, { "interactables", std::move(interactables) } };
    if (observation.error)
        j["error"] = *observation.error;
}

void to_json(nlohmann::json& j, const Trajectory& trajectory)
{
    auto steps = nlohmann::json::array();
    for (auto const& step: trajectory.steps)
        steps.push_back({ { "action", step.action }, { "observation", step.observation } });
    j = nlohmann::json { { "start_url", trajectory.start_url.str() }, { "steps", std::move(steps) } };
}

void to_json(nlohmann::json& j, const ReflectionVerdict& verdict)
{
    j = nlohmann::json { { "status", std::string(to_string(verdict.status)) }, { "reason", verdict.reason } };
    if (verdict.output)
        j["output"] = *verdict.output;
    if (verdict.source)
        j["source"] = verdict.source->str();
}

void from_json(const nlohmann::json& j, ReflectionVerdict& verdict)
{
    auto const status = reflection_status_from_string(j.at("status").get<std::string>());
    if (!status)
        throw std::invalid_argument("unknown reflection status: " + j.at("status").dump());
    verdict.status = *status;
    verdict.reason = j.at("reason").get<std::string>();
    verdict.output = optionalField<std::string>(j, "output");
    verdict.source = optionalUrl(j, "source");
}

void to_json(nlohmann::json& j, const StoredObservation& observation)
{
    j = nlohmann::json {
        { "url", observation.url.str() },
        { "content", observation.content },
        { "digest", observation.digest },
        { "size", observation.size },
    };
    if (observation.error)
        j["error"] = *observation.error;
}

void from_json(const nlohmann::json& j, StoredObservation& observation)
{
    observation.url = CanonicalUrl::parse(j.at("url").get<std::string>());
    observation.content = j.at("content").get<std::string>();
    observation.digest = j.at("digest").get<std::string>();
    observation.size = j.at("size").get<std::size_t>();
    observation.error = optionalField<std::string>(j, "error");
}

void to_json(nlohmann::json& j, const EpisodeRecord& record)
{
    auto steps = nlohmann::json::array();
    for (auto const& step: record.trajectory)
        steps.push_back({ { "action", step.action }, { "observation_digest", step.observation } });
    j = nlohmann::json {
        { "url", record.url.str() },
        { "iteration", record.iteration },
        { "actions_used", record.actions_used },
        { "trajectory", std::move(steps) },
        { "final_output", record.final_output ? nlohmann::json(*record.final_output) : nlohmann::json(nullptr) },
        { "reflection", record.reflection },
    };
}

void from_json(const nlohmann::json& j, EpisodeRecord& record)
{
    record = EpisodeRecord {};
    record.url = CanonicalUrl::parse(j.at("url").get<std::string>());
    record.iteration = j.at("iteration").get<std::size_t>();
    record.actions_used = j.at("actions_used").get<std::size_t>();
    for (auto const& step: j.at("trajectory"))
        record.trajectory.push_back(EpisodeStep { .action = step.at("action").get<Action>(),
                                                  .observation = step.at("observation_digest").get<StoredObservation>() });
    record.final_output = optionalField<std::string>(j, "final_output");
    record.reflection = j.at("reflection").get<ReflectionVerdict>();
}

} // namespace mango
