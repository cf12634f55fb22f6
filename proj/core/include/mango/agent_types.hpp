// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/url.hpp>

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mango
{

// Types shared by navigation, reflection and memory.

enum class ActionKind
{
    Visit,
    Click,
    Type,
    Scroll,
    Back,
    Finish,
};

std::string_view to_string(ActionKind kind);
ActionKind action_kind_from_string(std::string_view text);

struct Action
{
    ActionKind kind = ActionKind::Scroll;
    /// Element reference or URL.
    std::optional<std::string> target;
    std::optional<std::string> argument;
    std::optional<std::string> result;
    std::optional<CanonicalUrl> source;

    static Action visit(const CanonicalUrl& url);
    static Action click(std::string ref);
    static Action type(std::string ref, std::string text);
    static Action scroll();
    static Action back();
    static Action finish(std::string result, CanonicalUrl source);

    /// Throws std::invalid_argument: finish needs result+source, visit/click a target.
    void validate() const;

    bool operator==(const Action&) const = default;
};

struct Interactable
{
    std::string ref;
    std::string text;

    bool operator==(const Interactable&) const = default;
};

struct Observation
{
    CanonicalUrl url;
    std::string content;
    std::vector<Interactable> interactables;
    std::optional<std::string> error;

    bool operator==(const Observation&) const = default;
};

struct TrajectoryStep
{
    Action action;
    Observation observation;

    bool operator==(const TrajectoryStep&) const = default;
};

struct Trajectory
{
    CanonicalUrl start_url;
    std::vector<TrajectoryStep> steps;

    [[nodiscard]] const Observation* last_observation() const;

    bool operator==(const Trajectory&) const = default;
};

enum class ReflectionStatus
{
    Adequate,
    Inadequate,
    Feasible,
    Infeasible,
};

std::string_view to_string(ReflectionStatus status);
std::optional<ReflectionStatus> reflection_status_from_string(std::string_view text);

struct ReflectionVerdict
{
    ReflectionStatus status = ReflectionStatus::Infeasible;
    std::string reason;
    std::optional<std::string> output;
    std::optional<CanonicalUrl> source;

    bool operator==(const ReflectionVerdict&) const = default;
};

inline constexpr std::size_t kStoredObservationLimit = 4096;

/// Observation as persisted in memory: payloads above 4 KB keep a 4 KB prefix
/// plus the digest and byte size of the full content.
struct StoredObservation
{
    CanonicalUrl url;
    std::string content;
    std::string digest;
    std::size_t size = 0;
    std::optional<std::string> error;

    static StoredObservation from(const Observation& observation);

    bool operator==(const StoredObservation&) const = default;
};

struct EpisodeStep
{
    Action action;
    StoredObservation observation;

    bool operator==(const EpisodeStep&) const = default;
};

struct EpisodeRecord
{
    CanonicalUrl url;
    std::size_t iteration = 0;
    std::vector<EpisodeStep> trajectory;
    std::optional<std::string> final_output;
    ReflectionVerdict reflection;
    std::size_t actions_used = 0;

    static EpisodeRecord from(std::size_t iteration,
                              const Trajectory& trajectory,
                              std::optional<std::string> finalOutput,
                              ReflectionVerdict reflection);

    bool operator==(const EpisodeRecord&) const = default;
};

/// FNV-1a 64-bit, rendered as "fnv1a64:<16 hex digits>".
std::string content_digest(std::string_view content);

void to_json(nlohmann::json& j, const Action& action);
void from_json(const nlohmann::json& j, Action& action);
void to_json(nlohmann::json& j, const Observation& observation);
void to_json(nlohmann::json& j, const Trajectory& trajectory);
void to_json(nlohmann::json& j, const ReflectionVerdict& verdict);
void from_json(const nlohmann::json& j, ReflectionVerdict& verdict);
void to_json(nlohmann::json& j, const StoredObservation& observation);
void from_json(const nlohmann::json& j, StoredObservation& observation);
void to_json(nlohmann::json& j, const EpisodeRecord& record);
void from_json(const nlohmann::json& j, EpisodeRecord& record);

} // namespace mango
