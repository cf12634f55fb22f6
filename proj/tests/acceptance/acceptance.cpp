// SPDX-License-Identifier: Apache-2.0
// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "test_support.hpp"

#include <mango/bandit.hpp>
#include <mango/crawler.hpp>
#include <mango/errors.hpp>
#include <mango/memory.hpp>
#include <mango/orchestrator.hpp>
#include <mango/ranking.hpp>
#include <mango/rng.hpp>
#include <mango/simharness.hpp>
#include <mango/site_graph.hpp>
#include <mango_cli/commands.hpp>
#include <mango_cli/config.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

namespace
{

using namespace mango;
using Clock = std::chrono::steady_clock;

struct Verdict
{
    bool pass = true;
    std::string detail;
};

// Collects failures without stopping at the first one.
class Check
{
  public:
    void expect(bool ok, const std::string& what)
    {
        if (!ok && _failures++ < 5)
            _notes += (_notes.empty() ? "" : "; ") + what;
    }

    [[nodiscard]] Verdict verdict(std::string detail) const
    {
        if (_failures == 0)
            return { true, std::move(detail) };
        return { false, std::to_string(_failures) + " violation(s): " + _notes + " | " + detail };
    }

  private:
    std::size_t _failures = 0;
    std::string _notes;
};

std::string fmt(const char* format, double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

double ulp(double x)
{
    return std::nextafter(x, std::numeric_limits<double>::infinity()) - x;
}

CanonicalUrl armUrl(std::size_t i)
{
    return CanonicalUrl::parse("https://arm.example/" + std::to_string(i));
}

// 1. alpha - alpha0 = sum r and beta - beta0 = sum (1 - r), exactly.
Verdict updateExactness(double& budgetSeconds)
{
    budgetSeconds = 1.0;
    Check check;
    Xoshiro256 rng(1);
    for (int seq = 0; seq < 1000; ++seq)
    {
        auto const n = 1 + rng.below(6);
        std::vector<CandidateArm> arms;
        for (std::size_t i = 0; i < n; ++i)
        {
            // Every fourth sequence uses integer priors, where the difference is exact too.
            bool const integral = seq % 4 == 0;
            auto const a0 = integral ? static_cast<double>(1 + rng.below(4)) : 1.0 + 3.0 * rng.uniform_open();
            auto const b0 = integral ? static_cast<double>(1 + rng.below(4)) : 1.0 + 3.0 * rng.uniform_open();
            arms.push_back(CandidateArm { .url = armUrl(i), .alpha = a0, .beta = b0, .prior_alpha = a0, .prior_beta = b0 });
        }
        BanditState state(arms, static_cast<std::uint64_t>(seq));
        std::vector<std::uint64_t> ones(n, 0);
        std::vector<std::uint64_t> zeros(n, 0);
        for (auto len = rng.below(200); len > 0; --len)
        {
            auto const i = rng.below(n);
            auto const r = rng.below(2) == 0 ? Reward::Zero : Reward::One;
            state.update(armUrl(i), r);
            (r == Reward::One ? ones : zeros)[i] += 1;
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            auto const& arm = state.arm(armUrl(i));
            auto const sumR = static_cast<double>(ones[i]);
            auto const sumNotR = static_cast<double>(zeros[i]);
            // Integer counts match exactly; the posterior equals one rounded
            // addition of the count to the prior, so no drift builds up.
            check.expect(arm.successes == ones[i] && arm.failures == zeros[i], "count mismatch in sequence " + std::to_string(seq));
            check.expect(arm.alpha == arms[i].alpha + sumR, "alpha differs from alpha0 + sum r in sequence " + std::to_string(seq));
            check.expect(arm.beta == arms[i].beta + sumNotR, "beta differs from beta0 + sum(1 - r) in sequence " + std::to_string(seq));
            // alpha - alpha0 recovers sum r up to the single rounding of that addition.
            check.expect(std::abs((arm.alpha - arm.prior_alpha) - sumR) <= ulp(arm.alpha), "alpha - alpha0 off in sequence " + std::to_string(seq));
            check.expect(std::abs((arm.beta - arm.prior_beta) - sumNotR) <= ulp(arm.beta), "beta - beta0 off in sequence " + std::to_string(seq));
            if (seq % 4 == 0)
                check.expect(arm.alpha - arm.prior_alpha == sumR && arm.beta - arm.prior_beta == sumNotR,
                             "integer prior not exact in sequence " + std::to_string(seq));
        }
    }
    return check.verdict("1000 sequences");
}

// 2. alpha = 1 + kappa rho, beta = 1 + kappa (1 - rho).
Verdict priors(double& budgetSeconds)
{
    budgetSeconds = 1.0;
    Check check;
    std::size_t cases = 0;
    for (double kappa: { 0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 100.0 })
    {
        CandidateSet set { .arms = {}, .query = Query("q"), .root_url = armUrl(0) };
        std::vector<double> rhos;
        for (int k = 0; k <= 20; ++k)
            rhos.push_back(k / 20.0);
        rhos.push_back(1.0 / 3.0);
        rhos.push_back(1e-9);
        for (std::size_t i = 0; i < rhos.size(); ++i)
            set.arms.push_back(ScoredUrl { .url = armUrl(i), .lambda = rhos[i], .rho = rhos[i] });
        auto const state = init_arms(set, BanditConfig { .kappa = kappa, .rng_seed = 0 });
        for (std::size_t i = 0; i < rhos.size(); ++i)
        {
            auto const& arm = state.arm(armUrl(i));
            check.expect(std::abs(arm.alpha - (1.0 + kappa * rhos[i])) <= 1e-12, "alpha at kappa " + std::to_string(kappa));
            check.expect(std::abs(arm.beta - (1.0 + kappa * (1.0 - rhos[i]))) <= 1e-12, "beta at kappa " + std::to_string(kappa));
            if (kappa == 0.0)
                check.expect(arm.alpha == 1.0 && arm.beta == 1.0, "kappa 0 is not Beta(1,1)");
            ++cases;
        }
    }
    return check.verdict(std::to_string(cases) + " (kappa, rho) cases");
}

// 3. P(theta_1 > theta_2) for Beta(4,1) vs Beta(1,4) is 69/70.
Verdict selectionProbability(double& budgetSeconds)
{
    budgetSeconds = 5.0;
    // tests/oracles/selection_oracle.py: exact integral 69/70, Monte Carlo 0.985619.
    constexpr double kExact = 69.0 / 70.0;
    std::vector<CandidateArm> arms {
        CandidateArm { .url = armUrl(1), .alpha = 4, .beta = 1, .prior_alpha = 4, .prior_beta = 1 },
        CandidateArm { .url = armUrl(2), .alpha = 1, .beta = 4, .prior_alpha = 1, .prior_beta = 4 },
    };
    BanditState state(arms, 20240601);
    constexpr int kDraws = 100000;
    int first = 0;
    for (int i = 0; i < kDraws; ++i)
        first += state.select_arm().url == armUrl(1) ? 1 : 0;
    auto const rate = static_cast<double>(first) / kDraws;
    Check check;
    check.expect(std::abs(rate - kExact) <= 0.01, "rate " + fmt("%.5f", rate));
    return check.verdict("rate " + fmt("%.5f", rate) + " vs " + fmt("%.5f", kExact));
}

// Lazily generated 10,000-page tree: page i links to 10i+1..10i+10 plus an
// external page, an image and a stylesheet.
class TreeFetcher final: public PageFetcher
{
  public:
    static constexpr std::size_t kPages = 10000;
    std::size_t fetches = 0;

    static std::string url(std::size_t i) { return "https://big.example/p/" + std::to_string(i); }

    FetchResponse fetch(const CanonicalUrl& target) override
    {
        ++fetches;
        auto const path = std::string(target.path());
        if (!path.starts_with("/p/") || target.host() != "big.example")
            throw FetchError("not in tree: " + target.str());
        auto const i = std::stoul(path.substr(3));
        if (i >= kPages)
            throw FetchError("past end: " + target.str());
        FetchResponse response { .content_type = "text/html", .body = "<p>page " + std::to_string(i) + "</p>", .outlinks = {} };
        for (std::size_t c = 10 * i + 1; c <= 10 * i + 10 && c < kPages; ++c)
            response.outlinks.push_back(url(c));
        response.outlinks.push_back("https://elsewhere.example/ref/" + std::to_string(i));
        response.outlinks.push_back("/img/" + std::to_string(i) + ".png");
        response.outlinks.push_back("/css/site.css");
        return response;
    }
};

// 4. Exactly tau pages, BFS prefix, nothing external or non-HTML.
Verdict crawlerContract(double& budgetSeconds)
{
    budgetSeconds = 10.0;
    TreeFetcher fetcher;
    auto const result = crawl(CrawlConfig { .root_url = CanonicalUrl::parse(TreeFetcher::url(0)), .max_pages = 1000 }, fetcher);
    Check check;
    check.expect(result.pages.size() == 1000, "pages " + std::to_string(result.pages.size()));
    check.expect(fetcher.fetches == 1000, "fetches " + std::to_string(fetcher.fetches));

    // Independent BFS over the same tree: in this layout BFS order is numeric order.
    std::vector<std::string> expected;
    std::deque<std::size_t> queue { 0 };
    while (!queue.empty() && expected.size() < 1000)
    {
        auto const i = queue.front();
        queue.pop_front();
        expected.push_back(CanonicalUrl::parse(TreeFetcher::url(i)).str());
        for (std::size_t c = 10 * i + 1; c <= 10 * i + 10 && c < TreeFetcher::kPages; ++c)
            queue.push_back(c);
    }
    auto const ordered = result.in_fetch_order();
    for (std::size_t k = 0; k < ordered.size() && k < expected.size(); ++k)
        check.expect(ordered[k]->url.str() == expected[k], "fetch order differs at " + std::to_string(k));
    for (auto const& [u, page]: result.pages)
    {
        check.expect(u.host() == "big.example", "external page " + u.str());
        check.expect(!has_non_html_extension(u), "non-HTML page " + u.str());
    }
    return check.verdict(std::to_string(result.pages.size()) + " pages, " + std::to_string(fetcher.fetches) + " fetches");
}

// 5. BM25 against the reference table; normalization recomputed here.
Verdict bm25Table(double& budgetSeconds)
{
    budgetSeconds = 1.0;
    // tests/oracles/bm25_oracle.py fixtures/bm25_corpus.json (k1 = 1.2, b = 0.75).
    static constexpr double kExpected[3][20] = {
        { 3.8098431532210943, 1.5079766442995508, 0, 0, 2.8645814650267472, 0, 5.0545300301857674, 0, 0, 0, 1.3692559325494598, 0, 0, 0,
          1.3692559325494598, 0, 0, 2.9435982971360324, 0, 1.4322907325133736 },
        { 0, 3.0159532885991016, 0, 6.0239854819888805, 0, 0, 0, 1.6468184836723996, 0, 2.00792348026093, 0, 0, 0, 3.2936369673447992,
          1.5743423645865726, 0, 1.5079766442995508, 0, 4.5770056457733563, 0 },
        { 0, 0, 5.4777926940935098, 0, 0, 5.0159647386195836, 0, 0, 0, 0, 0, 1.5079766442995508, 1.6176143804261924, 0, 0, 0,
          3.2619706914595672, 0, 0, 0 },
    };
    auto const corpus = nlohmann::json::parse(std::ifstream(testing::fixture_dir() / "bm25_corpus.json"));
    std::vector<std::vector<std::string>> docs;
    for (auto const& d: corpus.at("documents"))
        docs.push_back(tokenize(d.get<std::string>()));
    auto const stats = build_corpus_stats(docs);
    Check check;
    double worst = 0.0;
    constexpr double kEpsilon = 1e-9;
    for (std::size_t q = 0; q < 3; ++q)
    {
        Query const query(corpus.at("queries")[q].get<std::string>());
        std::vector<double> lambdas;
        for (std::size_t d = 0; d < docs.size(); ++d)
        {
            auto const score = bm25_score(query, docs[d], stats, {});
            worst = std::max(worst, std::abs(score - kExpected[q][d]));
            check.expect(std::abs(score - kExpected[q][d]) <= 1e-9, "query " + std::to_string(q) + " doc " + std::to_string(d));
            lambdas.push_back(score);
        }
        auto const rho = normalize_scores(lambdas, kEpsilon);
        double lo = kExpected[q][0];
        double hi = kExpected[q][0];
        for (double v: kExpected[q])
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (std::size_t d = 0; d < docs.size(); ++d)
            check.expect(std::abs(rho[d] - (kExpected[q][d] - lo) / (hi - lo + kEpsilon)) <= 1e-9, "rho query " + std::to_string(q));
    }
    return check.verdict("60 scores, max error " + fmt("%.2e", worst));
}

std::string readFile(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// 6. Seed-42 fixture run reproduces the frozen trace; replay agrees.
Verdict goldenTrace(double& budgetSeconds)
{
    budgetSeconds = 5.0;
    testing::TempDir dir("acceptance-golden");
    auto const runDir = dir.path() / "run";
    auto const settings = cli::resolve_settings(
        nullptr, { { "site", (testing::fixture_dir() / "site.json").string() }, { "seed", "42" }, { "output_dir", runDir.string() } }, nullptr);
    std::ostringstream out;
    std::ostringstream err;
    Check check;
    auto const runCode = cli::cmd_run(settings, out, err);
    check.expect(runCode == cli::kExitOk, "run exit " + std::to_string(runCode) + " " + err.str());
    auto const produced = readFile(runDir / "events.jsonl");
    auto const golden = readFile(testing::golden_dir() / "events.jsonl");
    check.expect(!golden.empty() && produced == golden, "events.jsonl differs from golden");
    auto const replayCode = cli::cmd_replay(runDir, out, err);
    check.expect(replayCode == cli::kExitOk, "replay exit " + std::to_string(replayCode));
    return check.verdict(std::to_string(std::count(golden.begin(), golden.end(), '\n')) + " events bit-identical, replay exit " +
                         std::to_string(replayCode));
}

// 7. total_actions <= T * b and every attempt <= b over randomized runs.
Verdict budgetInvariants(double& budgetSeconds)
{
    budgetSeconds = 300.0;
    Check check;
    Xoshiro256 rng(7);
    std::size_t attempts = 0;
    std::size_t maxTotal = 0;
    std::vector<PolicyName> const policies { PolicyName::Mango, PolicyName::Random, PolicyName::GoogleOnly, PolicyName::Greedy,
                                             PolicyName::NoMemory };
    for (int runIndex = 0; runIndex < 500; ++runIndex)
    {
        auto const site = generate_site(SiteSpec { .seed = 5000 + rng.below(100000),
                                                   .branching = 2 + rng.below(3),
                                                   .depth = 2 + rng.below(5),
                                                   .targets = 1 + rng.below(2),
                                                   .distractor_density = rng.uniform_open() });
        bool const defaults = runIndex % 2 == 0;
        std::size_t const budget = defaults ? 10 : 1 + rng.below(15);
        std::size_t const iterations = defaults ? 10 : 1 + rng.below(15);
        SiteFetcher fetcher(site.graph);
        ScriptedSearchClient search(site.graph.search_results);
        FallbackKeywordAdapter keyworder;
        ScriptedAgent agent(site.graph);
        ScriptedReflector reflector(site.graph, 1 + rng.below(12));
        SimulatedBrowserEnv env(site.graph);
        RunConfig config(Query(site.query()), site.root_url());
        config.max_iterations = iterations;
        config.navigation.budget = budget;
        config.crawl.max_pages = 10 + rng.below(200);
        config.bandit.kappa = 5.0 * rng.uniform_open();
        config.bandit.rng_seed = rng.below(1u << 30);
        config.policy = policy_spec(policies[rng.below(policies.size())]);
        config.adapters = RunAdapters { &fetcher, &search, &keyworder, &agent, &reflector, &env };
        MemoryStore memory;
        RunResult result;
        try
        {
            result = run(config, memory);
        }
        catch (const RunFailure& e)
        {
            result = e.partial();
        }
        std::size_t sum = 0;
        for (auto const& e: result.event_trace)
            if (e.kind == EventKind::NavigationDone)
            {
                auto const steps = e.payload.at("steps").get<std::size_t>();
                check.expect(steps <= budget, "attempt of " + std::to_string(steps) + " steps with b=" + std::to_string(budget));
                sum += steps;
                ++attempts;
            }
        check.expect(sum == result.total_actions, "total_actions does not match attempts");
        check.expect(result.total_actions <= iterations * budget, "total " + std::to_string(result.total_actions));
        check.expect(result.iterations_used <= iterations, "iterations over cap");
        if (defaults)
        {
            check.expect(result.total_actions <= 100, "over 100 actions at defaults");
            maxTotal = std::max(maxTotal, result.total_actions);
        }
    }
    return check.verdict("500 runs, " + std::to_string(attempts) + " attempts, max total at defaults " + std::to_string(maxTotal));
}

// 8. Paired ablation on the standard batch.
Verdict ablation(double& budgetSeconds)
{
    budgetSeconds = 600.0;
    std::vector<SyntheticSite> tasks;
    for (auto const& spec: standard_batch())
        tasks.push_back(generate_site(spec));
    auto const report = run_comparison({ PolicyName::Mango, PolicyName::Random, PolicyName::Greedy, PolicyName::NoMemory }, tasks, { 42 },
                                       SimulationOptions::desk_scale());
    auto const sr = [&](PolicyName p) { return report.summary.at(p).success_rate; };
    auto const vsRandom = paired_exact_test(report, PolicyName::Mango, PolicyName::Random);
    auto const vsGreedy = paired_exact_test(report, PolicyName::Mango, PolicyName::Greedy);
    auto const vsNoMemory = paired_exact_test(report, PolicyName::Mango, PolicyName::NoMemory);
    Check check;
    check.expect(sr(PolicyName::Mango) > sr(PolicyName::Random) && vsRandom.p_value < 0.05, "mango vs random");
    check.expect(sr(PolicyName::Mango) >= sr(PolicyName::Greedy) && vsGreedy.p_value < 0.05, "mango vs greedy");
    check.expect(sr(PolicyName::Mango) > sr(PolicyName::NoMemory) && vsNoMemory.p_value < 0.05, "mango vs no_memory");
    auto const pct = [](double v) { return fmt("%.1f%%", 100.0 * v); };
    return check.verdict("SR mango " + pct(sr(PolicyName::Mango)) + ", random " + pct(sr(PolicyName::Random)) + " (p=" +
                         fmt("%.2g", vsRandom.p_value) + "), greedy " + pct(sr(PolicyName::Greedy)) + " (p=" + fmt("%.2g", vsGreedy.p_value) +
                         "), no_memory " + pct(sr(PolicyName::NoMemory)) + " (p=" + fmt("%.2g", vsNoMemory.p_value) + ")");
}

// Wraps the scripted agent and records the memory handed to every decision.
class SpyAgent final: public AgentAdapter
{
  public:
    explicit SpyAgent(AgentAdapter& inner): _inner(inner) {}

    Action decide(const Query& query,
                  const CanonicalUrl& startUrl,
                  std::span<const EpisodeRecord> memory,
                  const Trajectory& soFar,
                  const Observation& latest) override
    {
        memory_sizes[attempt].push_back(memory.size());
        return _inner.decide(query, startUrl, memory, soFar, latest);
    }

    std::size_t attempt = 0;
    std::map<std::size_t, std::vector<std::size_t>> memory_sizes;

  private:
    AgentAdapter& _inner;
};

std::vector<Action> actionsOf(const Trajectory& t)
{
    std::vector<Action> out;
    for (auto const& s: t.steps)
        out.push_back(s.action);
    return out;
}

// 9. Revisits see memory; the avoidance rule changes the path.
Verdict memoryRevisits(double& budgetSeconds)
{
    budgetSeconds = 120.0;
    Check check;
    std::size_t revisitCalls = 0;
    std::size_t revisits = 0;
    std::size_t diverged = 0;
    // Revisit-designed tasks: every fork carries a decoy branch, the budget is tight
    // and the reflector keeps arms alive, so the bandit returns to failed start pages.
    for (std::uint64_t seed = 0; seed < 120; ++seed)
    {
        auto const site = generate_site(SiteSpec { .seed = 9000 + seed, .branching = 2 + seed % 3, .depth = 4 + seed % 3, .targets = 1,
                                                   .distractor_density = 1.0 });
        SiteFetcher fetcher(site.graph);
        ScriptedSearchClient search(site.graph.search_results);
        FallbackKeywordAdapter keyworder;
        ScriptedAgent scripted(site.graph);
        SpyAgent spy(scripted);
        ScriptedReflector reflector(site.graph, 100);
        SimulatedBrowserEnv env(site.graph);
        RunConfig config(Query(site.query()), site.root_url());
        config.navigation.budget = 6;
        config.crawl.max_pages = 40;
        config.ranking.top_k = 3;
        config.bandit.rng_seed = seed;
        config.adapters = RunAdapters { &fetcher, &search, &keyworder, &spy, &reflector, &env };
        MemoryStore memory;
        RunResult result;
        try
        {
            result = run(config, memory, [&](const RunEvent& e) {
                if (e.kind == EventKind::ArmSelected)
                    spy.attempt = e.payload.at("iteration").get<std::size_t>();
            });
        }
        catch (const RunFailure& e)
        {
            result = e.partial();
        }

        std::map<CanonicalUrl, std::size_t> visits;
        for (auto const& e: result.event_trace)
        {
            if (e.kind != EventKind::NavigationDone)
                continue;
            auto const url = CanonicalUrl::parse(e.payload.at("url").get<std::string>());
            auto const iteration = e.payload.at("iteration").get<std::size_t>();
            if (visits[url]++ == 0)
                continue;
            ++revisits;
            check.expect(e.payload.at("memory_episodes").get<std::size_t>() > 0, "revisit without memory");
            for (auto const size: spy.memory_sizes[iteration])
            {
                ++revisitCalls;
                check.expect(size > 0, "agent saw empty memory on a revisit");
            }

            // Same start, same environment: with the episodes before this iteration
            // versus none at all.
            std::vector<EpisodeRecord> before;
            for (auto const& r: memory.retrieve(url))
                if (r.iteration < iteration)
                    before.push_back(r);
            SimulatedBrowserEnv envA(site.graph);
            SimulatedBrowserEnv envB(site.graph);
            Query const q(site.query());
            auto const withMemory = navigate(q, url, before, scripted, envA, config.navigation);
            auto const withoutMemory = navigate(q, url, {}, scripted, envB, config.navigation);
            diverged += actionsOf(withMemory.trajectory) != actionsOf(withoutMemory.trajectory) ? 1 : 0;
        }
    }
    auto const share = revisits == 0 ? 0.0 : static_cast<double>(diverged) / static_cast<double>(revisits);
    check.expect(revisits >= 50, "only " + std::to_string(revisits) + " revisits");
    check.expect(share >= 0.95, "divergence " + fmt("%.3f", share));
    return check.verdict(std::to_string(revisits) + " revisits, 100% with memory, " + std::to_string(revisitCalls) +
                         " agent calls all with memory, divergence " + fmt("%.1f%%", 100.0 * share));
}

// 10. Random operation sequences against a reference model of the active set.
Verdict exhaustionFuzz(double& budgetSeconds)
{
    budgetSeconds = 60.0;
    Check check;
    Xoshiro256 rng(10);
    std::size_t raised = 0;
    std::size_t selections = 0;
    for (int seq = 0; seq < 10000; ++seq)
    {
        auto const n = 1 + rng.below(8);
        std::vector<CandidateArm> arms;
        for (std::size_t i = 0; i < n; ++i)
        {
            auto const a = 1.0 + 4.0 * rng.uniform_open();
            auto const b = 1.0 + 4.0 * rng.uniform_open();
            arms.push_back(CandidateArm { .url = armUrl(i), .alpha = a, .beta = b, .prior_alpha = a, .prior_beta = b });
        }
        BanditState state(arms, static_cast<std::uint64_t>(seq));
        std::vector<bool> active(n, true);
        std::size_t activeCount = n;
        try
        {
            for (auto ops = 1 + rng.below(40); ops > 0; --ops)
            {
                auto const op = rng.below(10);
                auto const i = rng.below(n + 1); // index n is an unknown arm
                auto const url = armUrl(i == n ? 999 : i);
                if (op < 4)
                {
                    try
                    {
                        auto const draw = state.select_arm();
                        ++selections;
                        auto const picked = static_cast<std::size_t>(std::stoul(std::string(draw.url.path().substr(1))));
                        check.expect(activeCount > 0, "selection with empty active set");
                        check.expect(picked < n && active[picked], "selected an exhausted arm");
                        check.expect(draw.theta_samples.size() == activeCount, "theta count differs from active count");
                    }
                    catch (const AllArmsExhausted&)
                    {
                        ++raised;
                        check.expect(activeCount == 0, "AllArmsExhausted with active arms");
                    }
                }
                else if (op < 7)
                {
                    try
                    {
                        state.update(url, rng.below(2) == 0 ? Reward::Zero : Reward::One);
                        check.expect(i < n && active[i], "update accepted for exhausted or unknown arm");
                    }
                    catch (const UnknownArm&)
                    {
                        check.expect(i == n, "UnknownArm for a known arm");
                    }
                    catch (const ArmAlreadyExhausted&)
                    {
                        check.expect(i < n && !active[i], "ArmAlreadyExhausted for an active arm");
                    }
                }
                else
                {
                    try
                    {
                        state.exhaust_arm(url);
                        check.expect(i < n, "exhaust accepted an unknown arm");
                        if (i < n && active[i])
                        {
                            active[i] = false;
                            --activeCount;
                        }
                    }
                    catch (const UnknownArm&)
                    {
                        check.expect(i == n, "UnknownArm for a known arm");
                    }
                }
                check.expect(state.active_count() == activeCount, "active count drift");
                check.expect(state.has_active_arm() == (activeCount > 0), "has_active_arm drift");
            }
        }
        catch (const std::exception& e)
        {
            check.expect(false, std::string("unexpected exception: ") + e.what());
        }
    }
    return check.verdict("10000 sequences, " + std::to_string(selections) + " selections, " + std::to_string(raised) + " AllArmsExhausted");
}

struct Criterion
{
    int number;
    const char* name;
    std::function<Verdict(double&)> body;
};

} // namespace

int main()
{
    std::vector<Criterion> const criteria {
        { 1, "bandit update exactness", updateExactness },
        { 2, "prior initialization", priors },
        { 3, "selection probability 69/70", selectionProbability },
        { 4, "crawler contract on 10k pages", crawlerContract },
        { 5, "BM25 reference table", bm25Table },
        { 6, "golden trace and replay", goldenTrace },
        { 7, "budget invariants", budgetInvariants },
        { 8, "paired ablation", ablation },
        { 9, "memory on revisits", memoryRevisits },
        { 10, "exhaustion fuzz", exhaustionFuzz },
    };
    int failures = 0;
    for (auto const& c: criteria)
    {
        double budgetSeconds = 0.0;
        auto const start = Clock::now();
        Verdict verdict;
        try
        {
            verdict = c.body(budgetSeconds);
        }
        catch (const std::exception& e)
        {
            verdict = { false, std::string("threw: ") + e.what() };
        }
        auto const seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (verdict.pass && budgetSeconds > 0.0 && seconds > budgetSeconds)
            verdict = { false, verdict.detail + " | runtime over " + fmt("%.0fs", budgetSeconds) };
        failures += verdict.pass ? 0 : 1;
        std::cout << (verdict.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.name << " - " << verdict.detail << " ("
                  << fmt("%.2fs", seconds) << ")" << std::endl;
    }
    std::cout << (failures == 0 ? "all 10 criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
