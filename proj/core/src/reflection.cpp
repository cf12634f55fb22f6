// SPDX-License-Identifier: Apache-2.0
#include <mango/errors.hpp>
#include <mango/reflection.hpp>

#include <nlohmann/json.hpp>

namespace mango
{

namespace
{

    bool belongsTo(ReflectionStatus status, VerdictFamily family)
    {
        switch (status)
        {
            case ReflectionStatus::Adequate:
            case ReflectionStatus::Inadequate: return family == VerdictFamily::Completed;
            case ReflectionStatus::Feasible:
            case ReflectionStatus::Infeasible: return family == VerdictFamily::Exhausted;
        }
        return false;
    }

    template <typename Call>
    ReflectionVerdict judgeWithRetry(Call&& call, VerdictFamily family)
    {
        for (int attempt = 0; attempt < 2; ++attempt)
        {
            try
            {
                return parse_verdict(call(), family);
            }
            catch (const ReflectorFailure&)
            {
            }
            catch (const AdapterFailure&)
            {
            }
        }
        return ReflectionVerdict { .status = ReflectionStatus::Infeasible, .reason = std::string(kReflectorFailureReason), .output = {}, .source = {} };
    }

} // namespace

ReflectionVerdict parse_verdict(std::string_view raw, VerdictFamily family)
{
    auto const j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ReflectorFailure("reflector reply is not a JSON object");
    if (!j.contains("status") || !j.at("status").is_string())
        throw ReflectorFailure("reflector reply lacks a status string");
    if (!j.contains("reason") || !j.at("reason").is_string())
        throw ReflectorFailure("reflector reply lacks a reason string");

    auto const status = reflection_status_from_string(j.at("status").get<std::string>());
    if (!status || !belongsTo(*status, family))
        throw ReflectorFailure("unexpected reflector status: " + j.at("status").dump());

    ReflectionVerdict verdict { .status = *status, .reason = j.at("reason").get<std::string>(), .output = {}, .source = {} };
    bool const hasOutput = j.contains("output") && !j.at("output").is_null();
    bool const hasSource = j.contains("source") && !j.at("source").is_null();
    if (family == VerdictFamily::Completed)
    {
        if (!hasOutput || !j.at("output").is_string() || !hasSource || !j.at("source").is_string())
            throw ReflectorFailure("completed verdict needs output and source strings");
        verdict.output = j.at("output").get<std::string>();
        try
        {
            verdict.source = CanonicalUrl::parse(j.at("source").get<std::string>());
        }
        catch (const InvalidUrl& e)
        {
            throw ReflectorFailure(std::string("bad verdict source: ") + e.what());
        }
    }
    else if (hasOutput || hasSource)
        throw ReflectorFailure("exhausted verdict must not carry output or source");
    return verdict;
}

ReflectionVerdict reflect(const Query& query, const Trajectory& trajectory, const NavigationOutcome& outcome, ReflectorAdapter& reflector)
{
    if (auto const* done = std::get_if<Completed>(&outcome))
        return judgeWithRetry([&] { return reflector.judge_completed(query, trajectory, done->result, done->source); },
                              VerdictFamily::Completed);
    return judgeWithRetry([&] { return reflector.judge_exhausted(query, trajectory); }, VerdictFamily::Exhausted);
}

RewardDecision decide_reward(const ReflectionVerdict& verdict)
{
    switch (verdict.status)
    {
        case ReflectionStatus::Adequate: return Terminate { verdict.output.value_or(""), verdict.source.value_or(CanonicalUrl {}) };
        case ReflectionStatus::Inadequate: return Continue { Reward::One, false };
        case ReflectionStatus::Feasible: return Continue { Reward::One, false };
        case ReflectionStatus::Infeasible: return Continue { Reward::Zero, true };
    }
    return Continue { Reward::Zero, true };
}

} // namespace mango
