// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <mango/errors.hpp>
#include <mango/memory.hpp>
#include <mango/rng.hpp>

#include <gtest/gtest.h>

#include <fstream>

namespace mango
{
namespace
{

    using testing::TempDir;

    EpisodeRecord episode(const std::string& url, std::size_t iteration, std::size_t steps, std::uint64_t seed = 0)
    {
        Xoshiro256 rng(seed + iteration);
        Trajectory t { .start_url = CanonicalUrl::parse(url), .steps = {} };
        t.steps.push_back({ Action::visit(t.start_url), Observation { .url = t.start_url, .content = "start page" } });
        for (std::size_t i = 1; i < steps; ++i)
        {
            auto const target = url + "/p" + std::to_string(rng.below(50));
            std::string content(static_cast<std::size_t>(rng.below(6000)), 'c');
            t.steps.push_back({ Action::click(target), Observation { .url = CanonicalUrl::parse(target), .content = content } });
        }
        auto const failed = rng.below(2) == 0;
        return EpisodeRecord::from(iteration, t, failed ? std::nullopt : std::optional<std::string>("partial"),
                                   failed ? ReflectionVerdict { .status = ReflectionStatus::Feasible, .reason = "close" }
                                          : ReflectionVerdict { .status = ReflectionStatus::Inadequate,
                                                                .reason = "missing year",
                                                                .output = "partial",
                                                                .source = t.start_url });
    }

    TEST(MemoryStore, AppendsPerUrlInIterationOrder)
    {
        MemoryStore store;
        auto const u = CanonicalUrl::parse("https://m.example/a");
        EXPECT_TRUE(store.retrieve(u).empty());
        store.store(episode(u.str(), 1, 3));
        EXPECT_EQ(store.retrieve(u).size(), 1u);
        store.store(episode("https://m.example/b", 2, 2));
        store.store(episode(u.str(), 4, 5));
        store.store(episode(u.str(), 6, 1));
        auto const got = store.retrieve(u);
        ASSERT_EQ(got.size(), 3u);
        EXPECT_EQ(got[0].iteration, 1u);
        EXPECT_EQ(got[1].iteration, 4u);
        EXPECT_EQ(got[2].iteration, 6u);
        EXPECT_EQ(store.size(), 4u);
    }

    TEST(MemoryStore, RejectsNonIncreasingIteration)
    {
        MemoryStore store;
        store.store(episode("https://m.example/a", 3, 2));
        EXPECT_THROW(store.store(episode("https://m.example/a", 3, 2)), std::invalid_argument);
        EXPECT_THROW(store.store(episode("https://m.example/a", 2, 2)), std::invalid_argument);
    }

    TEST(MemoryStore, TruncatesLargeObservations)
    {
        MemoryStore store;
        auto record = episode("https://m.example/a", 1, 1);
        Trajectory t { .start_url = CanonicalUrl::parse("https://m.example/a"), .steps = {} };
        t.steps.push_back({ Action::visit(t.start_url), Observation { .url = t.start_url, .content = std::string(10000, 'z') } });
        auto const big = EpisodeRecord::from(1, t, std::nullopt, ReflectionVerdict { .status = ReflectionStatus::Feasible, .reason = "r" });
        EXPECT_EQ(big.trajectory[0].observation.content.size(), kStoredObservationLimit);
        EXPECT_EQ(big.trajectory[0].observation.size, 10000u);
        EXPECT_EQ(big.trajectory[0].observation.digest, content_digest(std::string(10000, 'z')));
    }

    TEST(MemoryStore, ReloadIsIdentity)
    {
        TempDir dir("memory");
        auto const path = dir.path() / "memory.jsonl";
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            Xoshiro256 rng(seed);
            auto store = MemoryStore::create(path);
            std::map<std::string, std::size_t> next;
            for (auto n = 1 + rng.below(15); n > 0; --n)
            {
                auto const url = "https://m.example/" + std::to_string(rng.below(4));
                next[url] += 1 + rng.below(3);
                store.store(episode(url, next[url], 1 + rng.below(10), seed));
            }
            auto const loaded = MemoryStore::load(path);
            EXPECT_EQ(loaded, store) << "seed " << seed;
            for (auto const& [url, records]: store.episodes())
                EXPECT_EQ(loaded.retrieve(url), records);
        }
    }

    TEST(MemoryStore, OpenAppendsAfterExistingRecords)
    {
        TempDir dir("memory-open");
        auto const path = dir.path() / "memory.jsonl";
        {
            auto store = MemoryStore::create(path);
            store.store(episode("https://m.example/a", 1, 2));
        }
        {
            auto store = MemoryStore::open(path);
            EXPECT_EQ(store.size(), 1u);
            store.store(episode("https://m.example/a", 2, 2));
        }
        auto const loaded = MemoryStore::load(path);
        EXPECT_EQ(loaded.retrieve(CanonicalUrl::parse("https://m.example/a")).size(), 2u);
    }

    TEST(MemoryStore, PersistenceProblemsAreReported)
    {
        TempDir dir("memory-bad");
        EXPECT_THROW(MemoryStore::create(dir.path() / "missing" / "dir" / "m.jsonl"), PersistenceFailure);
        auto const path = dir.path() / "broken.jsonl";
        std::ofstream(path) << "{not json\n";
        EXPECT_THROW(MemoryStore::load(path), PersistenceFailure);
    }

    TEST(MemoryStore, LineFormatCarriesDigestedObservations)
    {
        TempDir dir("memory-format");
        auto const path = dir.path() / "m.jsonl";
        auto store = MemoryStore::create(path);
        store.store(episode("https://m.example/a", 1, 2));
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        auto const j = nlohmann::json::parse(line);
        for (auto const* key: { "url", "iteration", "actions_used", "trajectory", "final_output", "reflection" })
            EXPECT_TRUE(j.contains(key)) << key;
        EXPECT_TRUE(j.at("trajectory")[0].contains("observation_digest"));
        EXPECT_TRUE(j.at("reflection").contains("status"));
    }

} // namespace
} // namespace mango
