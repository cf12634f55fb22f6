// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <mango/agent_types.hpp>
#include <mango/bandit.hpp>
#include <mango/navigation.hpp>
#include <mango/ranking.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace mango
{

/// Judges a finished attempt. Both calls return the raw JSON text
/// {status, reason[, output, source]}; parsing happens in reflect().
class ReflectorAdapter
{
  public:
    virtual ~ReflectorAdapter() = default;
    virtual std::string judge_completed(const Query& query,
                                        const Trajectory& trajectory,
                                        std::string_view output,
                                        const CanonicalUrl& source) = 0;
    virtual std::string judge_exhausted(const Query& query, const Trajectory& trajectory) = 0;
};

enum class VerdictFamily
{
    Completed,
    Exhausted,
};

/// Strict parse of a reflector reply. Completed replies must be adequate or
/// inadequate and carry output and source; exhausted replies must be feasible or
/// infeasible and carry neither. Throws ReflectorFailure.
ReflectionVerdict parse_verdict(std::string_view raw, VerdictFamily family);

inline constexpr std::string_view kReflectorFailureReason = "reflector-failure";

/// Routes the outcome to the matching judge, retrying once on a bad reply and
/// falling back to Infeasible("reflector-failure").
ReflectionVerdict reflect(const Query& query, const Trajectory& trajectory, const NavigationOutcome& outcome, ReflectorAdapter& reflector);

struct Terminate
{
    std::string answer;
    CanonicalUrl source;

    bool operator==(const Terminate&) const = default;
};

struct Continue
{
    Reward reward = Reward::Zero;
    bool exhaust = false;

    bool operator==(const Continue&) const = default;
};

using RewardDecision = std::variant<Terminate, Continue>;

/// adequate -> Terminate, inadequate/feasible -> r=1, infeasible -> r=0 and exhaust.
RewardDecision decide_reward(const ReflectionVerdict& verdict);

} // namespace mango
