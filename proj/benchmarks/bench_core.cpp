// SPDX-License-Identifier: Apache-2.0
#include <mango/bandit.hpp>
#include <mango/crawler.hpp>
#include <mango/errors.hpp>
#include <mango/ranking.hpp>
#include <mango/rng.hpp>
#include <mango/simharness.hpp>
#include <mango/site_graph.hpp>

#include <benchmark/benchmark.h>

namespace
{

using namespace mango;

CandidateSet armsOf(std::size_t n)
{
    CandidateSet set { .arms = {}, .query = Query("q"), .root_url = CanonicalUrl::parse("https://bench.example") };
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const rho = static_cast<double>(i) / static_cast<double>(n);
        set.arms.push_back(ScoredUrl { .url = CanonicalUrl::parse("https://bench.example/" + std::to_string(i)), .lambda = rho, .rho = rho });
    }
    return set;
}

void BM_SelectArm(benchmark::State& state)
{
    auto bandit = init_arms(armsOf(static_cast<std::size_t>(state.range(0))), BanditConfig { .kappa = 3.0, .rng_seed = 1 });
    for (auto _: state)
        benchmark::DoNotOptimize(bandit.select_arm());
}
BENCHMARK(BM_SelectArm)->Arg(2)->Arg(20)->Arg(200);

void BM_SelectAndUpdate(benchmark::State& state)
{
    auto bandit = init_arms(armsOf(20), BanditConfig { .kappa = 3.0, .rng_seed = 2 });
    Xoshiro256 rng(3);
    for (auto _: state)
    {
        auto const draw = bandit.select_arm();
        bandit.update(draw.url, rng.below(2) == 0 ? Reward::Zero : Reward::One);
    }
}
BENCHMARK(BM_SelectAndUpdate);

void BM_Tokenize(benchmark::State& state)
{
    std::string text;
    for (int i = 0; i < 200; ++i)
        text += "The council published the annual budget report, page " + std::to_string(i) + ". ";
    for (auto _: state)
        benchmark::DoNotOptimize(tokenize(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

// Crawl of a synthetic site, then BM25 ranking of the result.
void BM_CrawlAndRank(benchmark::State& state)
{
    auto const site = generate_site(7, 3, static_cast<std::size_t>(state.range(0)), 1, 0.3);
    for (auto _: state)
    {
        SiteFetcher fetcher(site.graph);
        auto const result = crawl(CrawlConfig { .root_url = site.root_url() }, fetcher);
        benchmark::DoNotOptimize(rank_candidates(result, Query(site.query()), {}));
    }
    state.counters["pages"] = static_cast<double>(site.graph.pages.size());
}
BENCHMARK(BM_CrawlAndRank)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ScriptedRun(benchmark::State& state)
{
    auto const site = generate_site(standard_batch()[17]);
    std::uint64_t seed = 0;
    for (auto _: state)
        benchmark::DoNotOptimize(run_task(PolicyName::Mango, site, seed++, SimulationOptions::desk_scale()));
}
BENCHMARK(BM_ScriptedRun)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
