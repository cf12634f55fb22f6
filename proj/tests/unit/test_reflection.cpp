// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <mango/errors.hpp>
#include <mango/reflection.hpp>

#include <gtest/gtest.h>

namespace mango
{
namespace
{

    using testing::CannedReflector;

    auto const kUrl = CanonicalUrl::parse("https://r.example/page");
    Query const kQuery("when does the pool open");
    Trajectory const kTrajectory { .start_url = kUrl, .steps = { { Action::visit(kUrl), Observation { .url = kUrl, .content = "pool" } } } };

    TEST(ParseVerdict, AcceptsEachFamily)
    {
        auto const adequate = parse_verdict(R"({"status":"adequate","reason":"found","output":"9am","source":"https://r.example/page"})",
                                            VerdictFamily::Completed);
        EXPECT_EQ(adequate.status, ReflectionStatus::Adequate);
        EXPECT_EQ(adequate.output, "9am");
        EXPECT_EQ(adequate.source, kUrl);
        auto const feasible = parse_verdict(R"({"status":"feasible","reason":"one more click"})", VerdictFamily::Exhausted);
        EXPECT_EQ(feasible.status, ReflectionStatus::Feasible);
        EXPECT_EQ(feasible.reason, "one more click");
    }

    TEST(ParseVerdict, RejectsMalformedReplies)
    {
        std::string_view const bad[] = {
            "not json",
            R"({"reason":"x"})",
            R"({"status":"Adequate","reason":"x","output":"o","source":"https://r.example"})",
            R"({"status":"feasible","reason":"x"})",
            R"({"status":"adequate","reason":"x"})",
            R"({"status":"adequate","reason":"x","output":"o","source":"relative/path"})",
            R"({"status":"maybe","reason":"x"})",
            R"(["adequate"])",
        };
        for (auto const raw: bad)
            EXPECT_THROW(parse_verdict(raw, VerdictFamily::Completed), ReflectorFailure) << raw;
        EXPECT_THROW(parse_verdict(R"({"status":"adequate","reason":"x","output":"o","source":"https://r.example"})", VerdictFamily::Exhausted),
                     ReflectorFailure);
        EXPECT_THROW(parse_verdict(R"({"status":"infeasible","reason":"x","output":"o"})", VerdictFamily::Exhausted), ReflectorFailure);
        EXPECT_THROW(parse_verdict(R"({"status":"infeasible"})", VerdictFamily::Exhausted), ReflectorFailure);
    }

    TEST(Reflect, RoutesByOutcome)
    {
        CannedReflector r;
        r.completed_replies = { R"({"status":"inadequate","reason":"year missing","output":"June","source":"https://r.example/page"})" };
        r.exhausted_replies = { R"({"status":"infeasible","reason":"dead end"})" };
        auto const completed = reflect(kQuery, kTrajectory, Completed { "June", kUrl }, r);
        EXPECT_EQ(completed.status, ReflectionStatus::Inadequate);
        EXPECT_EQ(completed.reason, "year missing");
        auto const exhausted = reflect(kQuery, kTrajectory, BudgetExhausted {}, r);
        EXPECT_EQ(exhausted.status, ReflectionStatus::Infeasible);
        EXPECT_EQ(exhausted.reason, "dead end");
    }

    TEST(Reflect, RetriesOnceThenFallsBackToInfeasible)
    {
        CannedReflector once;
        once.exhausted_replies = { "garbage", R"({"status":"feasible","reason":"close"})" };
        EXPECT_EQ(reflect(kQuery, kTrajectory, BudgetExhausted {}, once).status, ReflectionStatus::Feasible);
        EXPECT_EQ(once.calls, 2u);

        CannedReflector broken;
        broken.completed_replies = { "garbage" };
        auto const v = reflect(kQuery, kTrajectory, Completed { "x", kUrl }, broken);
        EXPECT_EQ(v.status, ReflectionStatus::Infeasible);
        EXPECT_EQ(v.reason, kReflectorFailureReason);
        EXPECT_EQ(broken.calls, 2u);
    }

    TEST(Reflect, AdapterErrorsCountAsFailures)
    {
        class Throwing final: public ReflectorAdapter
        {
          public:
            std::string judge_completed(const Query&, const Trajectory&, std::string_view, const CanonicalUrl&) override
            {
                throw AdapterFailure("http 500");
            }
            std::string judge_exhausted(const Query&, const Trajectory&) override { throw AdapterFailure("http 500"); }
        } throwing;
        EXPECT_EQ(reflect(kQuery, kTrajectory, BudgetExhausted {}, throwing).reason, kReflectorFailureReason);
    }

    TEST(DecideReward, MapsEveryStatus)
    {
        EXPECT_EQ(decide_reward({ .status = ReflectionStatus::Adequate, .reason = "r", .output = "42", .source = kUrl }),
                  RewardDecision(Terminate { "42", kUrl }));
        EXPECT_EQ(decide_reward({ .status = ReflectionStatus::Inadequate, .reason = "r", .output = "4", .source = kUrl }),
                  RewardDecision(Continue { Reward::One, false }));
        EXPECT_EQ(decide_reward({ .status = ReflectionStatus::Feasible, .reason = "r" }), RewardDecision(Continue { Reward::One, false }));
        EXPECT_EQ(decide_reward({ .status = ReflectionStatus::Infeasible, .reason = "r" }), RewardDecision(Continue { Reward::Zero, true }));
    }

    TEST(DecideReward, ExhaustImpliesZeroReward)
    {
        for (auto status: { ReflectionStatus::Inadequate, ReflectionStatus::Feasible, ReflectionStatus::Infeasible })
        {
            auto const d = std::get<Continue>(decide_reward({ .status = status, .reason = "r", .output = "o", .source = kUrl }));
            if (d.exhaust)
                EXPECT_EQ(d.reward, Reward::Zero);
        }
    }

} // namespace
} // namespace mango
